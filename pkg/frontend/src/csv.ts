/**
 * Parsers for the solver CLI's file formats.
 *
 * Each CSV kind is identified by its exact header line; a mismatched header
 * is a schema error, not a best-effort parse. Partition files are one
 * integer label per line in linear cell order.
 */

export interface ConvergencePoint {
  iter: number;
  resnorm: number;
  restartIndex: number;
  deflated: boolean;
}

export interface SpectrumPoint {
  index: number;
  re: number;
  im: number;
  abs: number;
}

export interface RitzPoint {
  cycle: number;
  k: number;
  re: number;
  im: number;
}

export const CONVERGENCE_HEADER = "iter,resnorm,restart_index,deflated_flag";
export const SPECTRUM_HEADER = "index,re,im,abs";
export const RITZ_HEADER = "cycle,k,re,im";

export class SchemaError extends Error {}

function rows(text: string, header: string, kind: string): string[][] {
  const lines = text.split(/\r?\n/).filter((l) => l.trim().length > 0);
  if (lines.length === 0 || lines[0] !== header) {
    throw new SchemaError(
      `expected a ${kind} CSV with header '${header}', got '${lines[0] ?? ""}'`,
    );
  }
  if (lines.length === 1) {
    throw new SchemaError(`${kind} CSV has no data rows`);
  }
  const ncols = header.split(",").length;
  return lines.slice(1).map((line, i) => {
    const parts = line.split(",");
    if (parts.length !== ncols) {
      throw new SchemaError(`${kind} CSV row ${i + 1}: expected ${ncols} fields`);
    }
    return parts;
  });
}

function num(tok: string, where: string): number {
  const v = Number(tok);
  if (!Number.isFinite(v)) {
    throw new SchemaError(`${where}: '${tok}' is not a finite number`);
  }
  return v;
}

export function parseConvergence(text: string): ConvergencePoint[] {
  return rows(text, CONVERGENCE_HEADER, "convergence").map((p, i) => ({
    iter: num(p[0], `convergence row ${i + 1}`),
    resnorm: num(p[1], `convergence row ${i + 1}`),
    restartIndex: num(p[2], `convergence row ${i + 1}`),
    deflated: p[3] === "1",
  }));
}

export function parseSpectrum(text: string): SpectrumPoint[] {
  return rows(text, SPECTRUM_HEADER, "spectrum").map((p, i) => ({
    index: num(p[0], `spectrum row ${i + 1}`),
    re: num(p[1], `spectrum row ${i + 1}`),
    im: num(p[2], `spectrum row ${i + 1}`),
    abs: num(p[3], `spectrum row ${i + 1}`),
  }));
}

export function parseRitzTrace(text: string): RitzPoint[] {
  return rows(text, RITZ_HEADER, "ritz-trace").map((p, i) => ({
    cycle: num(p[0], `ritz row ${i + 1}`),
    k: num(p[1], `ritz row ${i + 1}`),
    re: num(p[2], `ritz row ${i + 1}`),
    im: num(p[3], `ritz row ${i + 1}`),
  }));
}

export function parsePartition(text: string): number[] {
  const labels = text
    .split(/\s+/)
    .filter((t) => t.length > 0)
    .map((t, i) => {
      const v = Number(t);
      if (!Number.isInteger(v) || v < 0) {
        throw new SchemaError(`partition entry ${i}: '${t}' is not a label`);
      }
      return v;
    });
  if (labels.length === 0) {
    throw new SchemaError("partition file is empty");
  }
  return labels;
}
