#!/usr/bin/env node
/**
 * Render solver CSV artifacts to SVG.
 *
 * Usage:
 *   defkrylov-plots convergence out.svg label1=conv1.csv [label2=conv2.csv ...]
 *   defkrylov-plots spectrum out.svg spectrum.csv
 *   defkrylov-plots ritz out.svg ritz.csv
 *   defkrylov-plots partition out.svg partition.txt nx ny [z]
 */
import { readFileSync, writeFileSync } from "node:fs";
import { basename } from "node:path";

import {
  parseConvergence,
  parsePartition,
  parseRitzTrace,
  parseSpectrum,
  SchemaError,
} from "./csv.js";
import {
  plotConvergence,
  plotPartition,
  plotRitzTrace,
  plotSpectrum,
} from "./plots.js";

function usageError(msg: string): never {
  process.stderr.write(`error: ${msg}\n`);
  process.exit(2);
}

export function main(argv: string[]): void {
  const [command, out, ...rest] = argv;
  if (!command || !out) {
    usageError("usage: defkrylov-plots <convergence|spectrum|ritz|partition> out.svg ...");
  }
  let svg: string;
  try {
    switch (command) {
      case "convergence": {
        if (rest.length === 0) usageError("need at least one convergence CSV");
        const series = rest.map((arg) => {
          const eq = arg.indexOf("=");
          const label = eq > 0 ? arg.slice(0, eq) : basename(arg, ".csv");
          const path = eq > 0 ? arg.slice(eq + 1) : arg;
          return { label, points: parseConvergence(readFileSync(path, "utf8")) };
        });
        svg = plotConvergence(series);
        break;
      }
      case "spectrum": {
        if (rest.length !== 1) usageError("spectrum takes exactly one CSV");
        svg = plotSpectrum(parseSpectrum(readFileSync(rest[0], "utf8")));
        break;
      }
      case "ritz": {
        if (rest.length !== 1) usageError("ritz takes exactly one CSV");
        svg = plotRitzTrace(parseRitzTrace(readFileSync(rest[0], "utf8")));
        break;
      }
      case "partition": {
        if (rest.length < 3) usageError("partition needs file, nx, ny [, z]");
        const labels = parsePartition(readFileSync(rest[0], "utf8"));
        const nx = Number(rest[1]);
        const ny = Number(rest[2]);
        const z = rest.length > 3 ? Number(rest[3]) : 0;
        svg = plotPartition(labels, nx, ny, z);
        break;
      }
      default:
        usageError(`unknown command '${command}'`);
    }
  } catch (e) {
    if (e instanceof SchemaError || e instanceof Error) {
      usageError(e.message);
    }
    throw e;
  }
  writeFileSync(out, svg);
  process.stdout.write(`wrote ${out}\n`);
}

const isDirectRun =
  process.argv[1] !== undefined &&
  import.meta.url.endsWith(basename(process.argv[1]));
if (isDirectRun) {
  main(process.argv.slice(2));
}
