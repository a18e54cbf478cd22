import { readFileSync } from "node:fs";
import { join } from "node:path";
import { describe, expect, it } from "vitest";

import {
  parseConvergence,
  parsePartition,
  parseRitzTrace,
  parseSpectrum,
} from "../src/csv.js";
import {
  plotConvergence,
  plotPartition,
  plotRitzTrace,
  plotSpectrum,
} from "../src/plots.js";

const FIX = join(__dirname, "fixtures");
const read = (name: string) => readFileSync(join(FIX, name), "utf8");

const count = (svg: string, re: RegExp) => (svg.match(re) ?? []).length;

describe("plotConvergence", () => {
  it("renders one labeled curve per method", () => {
    const methods = ["gmres", "rdgmres", "pdgmres"];
    const series = methods.map((m) => ({
      label: m,
      points: parseConvergence(read(`convergence.${m}.csv`)),
    }));
    const svg = plotConvergence(series);
    expect(svg).toContain("<svg");
    expect(count(svg, /<polyline/g)).toBe(3);
    for (const m of methods) {
      expect(svg).toContain(`>${m}</text>`);
    }
  });

  it("marks restarts on a restarted run", () => {
    const pts = parseConvergence(read("convergence.gmres.csv"));
    const restarts = new Set(pts.map((p) => p.restartIndex)).size - 1;
    const single = plotConvergence([{ label: "gmres", points: pts }]);
    // frame + ticks are horizontal/vertical; restart markers add one short
    // vertical line per cycle boundary
    const base = plotConvergence([
      { label: "gmres", points: pts.map((p) => ({ ...p, restartIndex: 0 })) },
    ]);
    expect(count(single, /<line/g) - count(base, /<line/g)).toBe(restarts);
  });

  it("rejects an empty series list", () => {
    expect(() => plotConvergence([])).toThrow();
  });
});

describe("plotSpectrum", () => {
  it("renders one marker per eigenvalue", () => {
    const pts = parseSpectrum(read("spectrum.csv"));
    const svg = plotSpectrum(pts);
    expect(count(svg, /<circle/g)).toBe(pts.length);
    expect(svg).toContain(">Re</text>");
    expect(svg).toContain(">Im</text>");
  });

  it("places the identity spectrum in a single cluster", () => {
    const pts = [0, 1, 2].map((i) => ({ index: i, re: 1, im: 0, abs: 1 }));
    const svg = plotSpectrum(pts);
    const xs = [...svg.matchAll(/<circle cx="([\d.]+)"/g)].map((m) =>
      Number(m[1]),
    );
    expect(Math.max(...xs) - Math.min(...xs)).toBeLessThan(1);
  });
});

describe("plotRitzTrace", () => {
  it("renders one trace per cycle", () => {
    const pts = parseRitzTrace(read("ritz.csv"));
    const cycles = new Set(pts.map((p) => p.cycle)).size;
    const svg = plotRitzTrace(pts);
    expect(count(svg, /<polyline/g)).toBe(cycles);
  });
});

describe("plotPartition", () => {
  it("renders a colored cell per grid cell plus a legend", () => {
    const labels = parsePartition(read("partition.txt"));
    const svg = plotPartition(labels, 7, 7, 1);
    // 49 cells + 1 background + legend swatches (one per label in slice)
    const sliceLabels = new Set(labels.slice(49, 98)).size;
    expect(count(svg, /<rect/g)).toBe(49 + 1 + sliceLabels);
    expect(count(svg, /region \d/g)).toBe(sliceLabels);
  });

  it("distinct slices show their own regions", () => {
    const labels = parsePartition(read("partition.txt"));
    const top = plotPartition(labels, 7, 7, 2);
    expect(top).toContain("region 2");
  });

  it("rejects inconsistent dimensions", () => {
    expect(() => plotPartition([0, 1, 0], 2, 2)).toThrow();
    expect(() => plotPartition([0, 1, 0, 1], 2, 2, 5)).toThrow();
  });

  it("renders a quadrant map with four legend entries", () => {
    // 4x4 single-slice grid split into quadrants
    const labels: number[] = [];
    for (let iy = 0; iy < 4; iy++) {
      for (let ix = 0; ix < 4; ix++) {
        labels.push((ix >= 2 ? 1 : 0) + (iy >= 2 ? 2 : 0));
      }
    }
    const svg = plotPartition(labels, 4, 4);
    expect(count(svg, /region \d/g)).toBe(4);
  });
});
