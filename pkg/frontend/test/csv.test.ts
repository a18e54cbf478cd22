import { readFileSync } from "node:fs";
import { join } from "node:path";
import { describe, expect, it } from "vitest";

import {
  parseConvergence,
  parsePartition,
  parseRitzTrace,
  parseSpectrum,
  SchemaError,
} from "../src/csv.js";

const FIX = join(__dirname, "fixtures");
const read = (name: string) => readFileSync(join(FIX, name), "utf8");

describe("parseConvergence", () => {
  it("reads solver output", () => {
    const pts = parseConvergence(read("convergence.pdgmres.csv"));
    expect(pts.length).toBeGreaterThan(5);
    expect(pts[0].iter).toBe(0);
    expect(pts[0].resnorm).toBeGreaterThan(0);
    expect(pts.every((p) => p.deflated)).toBe(true);
    // residuals reach the solve tolerance
    expect(pts[pts.length - 1].resnorm).toBeLessThan(pts[0].resnorm);
  });

  it("keeps restart indices nondecreasing", () => {
    const pts = parseConvergence(read("convergence.gmres.csv"));
    for (let i = 1; i < pts.length; i++) {
      expect(pts[i].restartIndex).toBeGreaterThanOrEqual(pts[i - 1].restartIndex);
    }
    expect(pts[pts.length - 1].restartIndex).toBeGreaterThan(0);
  });

  it("rejects a wrong header", () => {
    expect(() => parseConvergence("a,b,c\n1,2,3\n")).toThrow(SchemaError);
  });

  it("rejects an empty body", () => {
    expect(() =>
      parseConvergence("iter,resnorm,restart_index,deflated_flag\n"),
    ).toThrow(SchemaError);
  });

  it("rejects non-numeric fields", () => {
    expect(() =>
      parseConvergence(
        "iter,resnorm,restart_index,deflated_flag\n0,abc,0,0\n",
      ),
    ).toThrow(SchemaError);
  });
});

describe("parseSpectrum", () => {
  it("reads the eigenvalue table in magnitude order", () => {
    const pts = parseSpectrum(read("spectrum.csv"));
    expect(pts.length).toBe(147);
    for (let i = 1; i < pts.length; i++) {
      expect(pts[i].abs).toBeGreaterThanOrEqual(pts[i - 1].abs);
    }
    // the two isolated small eigenvalues sit far left of the cluster
    expect(pts[1].abs * 100).toBeLessThan(pts[2].abs);
  });

  it("rejects short rows", () => {
    expect(() => parseSpectrum("index,re,im,abs\n0,1.0\n")).toThrow(SchemaError);
  });
});

describe("parseRitzTrace", () => {
  it("groups points by cycle", () => {
    const pts = parseRitzTrace(read("ritz.csv"));
    const cycles = new Set(pts.map((p) => p.cycle));
    expect(cycles.size).toBeGreaterThan(1);
    expect(pts.every((p) => p.k >= 1)).toBe(true);
  });
});

describe("parsePartition", () => {
  it("reads one label per line", () => {
    const labels = parsePartition(read("partition.txt"));
    expect(labels.length).toBe(147);
    expect(new Set(labels)).toEqual(new Set([0, 1, 2]));
  });

  it("rejects non-integer labels", () => {
    expect(() => parsePartition("0\n1.5\n")).toThrow(SchemaError);
  });

  it("rejects empty input", () => {
    expect(() => parsePartition("\n")).toThrow(SchemaError);
  });
});
