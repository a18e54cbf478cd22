/**
 * SVG renderers for the solver artifacts: semilog convergence histories
 * with restart markers, complex-plane spectra, per-cycle smallest-Ritz
 * traces, and 2D partition maps. Rendering is read-only over the parsed
 * data; no numerics are recomputed here.
 */
import {
  ConvergencePoint,
  RitzPoint,
  SpectrumPoint,
} from "./csv.js";
import {
  DEFAULT_MARGIN,
  Svg,
  colorFor,
  linearScale,
  logTicks,
  sci,
  ticks,
} from "./svg.js";

const WIDTH = 720;
const HEIGHT = 480;

export interface ConvergenceSeries {
  label: string;
  points: ConvergencePoint[];
}

export function plotConvergence(series: ConvergenceSeries[]): string {
  if (series.length === 0) {
    throw new Error("need at least one convergence series");
  }
  const m = DEFAULT_MARGIN;
  const svg = new Svg(WIDTH, HEIGHT);
  const allPoints = series.flatMap((s) => s.points);
  const maxIter = Math.max(...allPoints.map((p) => p.iter));
  const positive = allPoints.map((p) => p.resnorm).filter((r) => r > 0);
  const rMin = Math.min(...positive);
  const rMax = Math.max(...positive);
  const x = linearScale(0, maxIter || 1, m.left, WIDTH - m.right);
  const y = linearScale(Math.log10(rMin), Math.log10(rMax), HEIGHT - m.bottom, m.top);

  drawFrame(svg);
  for (const t of ticks(0, maxIter || 1)) {
    svg.line(x(t), HEIGHT - m.bottom, x(t), HEIGHT - m.bottom + 4, "#333");
    svg.text(x(t), HEIGHT - m.bottom + 18, String(t), { anchor: "middle" });
  }
  for (const t of logTicks(rMin, rMax)) {
    const py = y(Math.log10(t));
    svg.line(m.left - 4, py, m.left, py, "#333");
    svg.line(m.left, py, WIDTH - m.right, py, "#eee");
    svg.text(m.left - 8, py + 4, sci(t), { anchor: "end" });
  }
  svg.text(WIDTH / 2, HEIGHT - 8, "iteration", { anchor: "middle" });
  svg.text(14, HEIGHT / 2, "residual norm", {
    anchor: "middle",
    rotate: -90,
  });

  series.forEach((s, i) => {
    const color = colorFor(i);
    const pts = s.points
      .filter((p) => p.resnorm > 0)
      .map((p): [number, number] => [x(p.iter), y(Math.log10(p.resnorm))]);
    svg.polyline(pts, color);
    // restart markers: small verticals where the cycle index steps
    for (let j = 1; j < s.points.length; j++) {
      if (s.points[j].restartIndex !== s.points[j - 1].restartIndex) {
        const px = x(s.points[j].iter);
        svg.line(px, m.top, px, m.top + 8, color);
      }
    }
    const ly = m.top + 16 + 16 * i;
    svg.line(WIDTH - m.right - 150, ly - 4, WIDTH - m.right - 120, ly - 4, color, 2);
    svg.text(WIDTH - m.right - 114, ly, s.label, { size: 12 });
  });
  return svg.render();
}

export function plotSpectrum(points: SpectrumPoint[]): string {
  const m = DEFAULT_MARGIN;
  const svg = new Svg(WIDTH, HEIGHT);
  const res = points.map((p) => p.re);
  const ims = points.map((p) => p.im);
  const pad = (lo: number, hi: number): [number, number] => {
    const span = hi - lo || Math.max(Math.abs(hi), 1);
    return [lo - 0.06 * span, hi + 0.06 * span];
  };
  const [xlo, xhi] = pad(Math.min(...res), Math.max(...res));
  const [ylo, yhi] = pad(Math.min(...ims), Math.max(...ims));
  const x = linearScale(xlo, xhi, m.left, WIDTH - m.right);
  const y = linearScale(ylo, yhi, HEIGHT - m.bottom, m.top);

  drawFrame(svg);
  for (const t of ticks(xlo, xhi)) {
    svg.line(x(t), HEIGHT - m.bottom, x(t), HEIGHT - m.bottom + 4, "#333");
    svg.text(x(t), HEIGHT - m.bottom + 18, sci(t), { anchor: "middle" });
  }
  for (const t of ticks(ylo, yhi)) {
    svg.line(m.left - 4, y(t), m.left, y(t), "#333");
    svg.text(m.left - 8, y(t) + 4, sci(t), { anchor: "end" });
  }
  svg.text(WIDTH / 2, HEIGHT - 8, "Re", { anchor: "middle" });
  svg.text(14, HEIGHT / 2, "Im", { anchor: "middle", rotate: -90 });
  for (const p of points) {
    svg.circle(x(p.re), y(p.im), 3, colorFor(0));
  }
  return svg.render();
}

export function plotRitzTrace(points: RitzPoint[]): string {
  const m = DEFAULT_MARGIN;
  const svg = new Svg(WIDTH, HEIGHT);
  const cycles = [...new Set(points.map((p) => p.cycle))].sort((a, b) => a - b);
  const mags = points.map((p) => Math.hypot(p.re, p.im)).filter((v) => v > 0);
  const lo = Math.min(...mags);
  const hi = Math.max(...mags);
  const total = points.length;
  const x = linearScale(0, total, m.left, WIDTH - m.right);
  const y = linearScale(Math.log10(lo), Math.log10(hi), HEIGHT - m.bottom, m.top);

  drawFrame(svg);
  for (const t of logTicks(lo, hi)) {
    const py = y(Math.log10(t));
    svg.line(m.left - 4, py, m.left, py, "#333");
    svg.text(m.left - 8, py + 4, sci(t), { anchor: "end" });
  }
  svg.text(WIDTH / 2, HEIGHT - 8, "iteration", { anchor: "middle" });
  svg.text(14, HEIGHT / 2, "smallest Ritz magnitude", {
    anchor: "middle",
    rotate: -90,
  });

  let offset = 0;
  for (const cycle of cycles) {
    const mine = points.filter((p) => p.cycle === cycle);
    const pts = mine
      .map((p, j): [number, number] | null => {
        const mag = Math.hypot(p.re, p.im);
        return mag > 0 ? [x(offset + j), y(Math.log10(mag))] : null;
      })
      .filter((p): p is [number, number] => p !== null);
    svg.polyline(pts, colorFor(cycle));
    offset += mine.length;
  }
  return svg.render();
}

/** Colored cell map of one z-slice of a partition (row iy, column ix). */
export function plotPartition(
  labels: number[],
  nx: number,
  ny: number,
  z = 0,
): string {
  if (nx < 1 || ny < 1) throw new Error("grid dimensions must be positive");
  const perSlice = nx * ny;
  if (labels.length % perSlice !== 0) {
    throw new Error(
      `partition length ${labels.length} is not a multiple of nx*ny = ${perSlice}`,
    );
  }
  const nz = labels.length / perSlice;
  if (z < 0 || z >= nz) throw new Error(`slice ${z} outside [0, ${nz})`);

  const m = DEFAULT_MARGIN;
  const cell = Math.min(
    (WIDTH - m.left - m.right) / nx,
    (HEIGHT - m.top - m.bottom) / ny,
  );
  const svg = new Svg(WIDTH, HEIGHT);
  const slice = labels.slice(z * perSlice, (z + 1) * perSlice);
  const used = [...new Set(slice)].sort((a, b) => a - b);
  for (let iy = 0; iy < ny; iy++) {
    for (let ix = 0; ix < nx; ix++) {
      const label = slice[ix + nx * iy];
      svg.rect(
        m.left + ix * cell,
        m.top + (ny - 1 - iy) * cell,
        cell,
        cell,
        colorFor(label),
      );
    }
  }
  used.forEach((label, i) => {
    const ly = m.top + 16 + 16 * i;
    svg.rect(m.left + nx * cell + 14, ly - 10, 12, 12, colorFor(label));
    svg.text(m.left + nx * cell + 32, ly, `region ${label}`, { size: 12 });
  });
  return svg.render();
}

function drawFrame(svg: Svg): void {
  const m = DEFAULT_MARGIN;
  svg.line(m.left, HEIGHT - m.bottom, WIDTH - m.right, HEIGHT - m.bottom, "#333");
  svg.line(m.left, m.top, m.left, HEIGHT - m.bottom, "#333");
}
