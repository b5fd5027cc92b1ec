#!/usr/bin/env node
import { realpathSync } from "node:fs";
import { pathToFileURL } from "node:url";
import { CsvError } from "./csv.js";
import { RenderError, renderRun } from "./render.js";

const USAGE = `usage: fastdiff-plots render <run_dir> <out_dir>

Renders the CSV artifacts of a solver run directory into SVG panels:
one exact-vs-numerical density overlay per snapshot, plus the error curve.`;

export function main(argv: string[]): number {
  if (argv.length !== 3 || argv[0] !== "render") {
    console.error(USAGE);
    return 2;
  }
  const runDir = argv[1]!;
  const outDir = argv[2]!;
  try {
    const result = renderRun(runDir, outDir);
    for (const warning of result.warnings) console.error(`warning: ${warning}`);
    for (const path of result.written) console.log(`wrote ${path}`);
    return 0;
  } catch (err) {
    if (err instanceof CsvError || err instanceof RenderError) {
      console.error(`error: ${err.message}`);
      return 1;
    }
    console.error(`error: ${err instanceof Error ? err.message : String(err)}`);
    return 1;
  }
}

function invokedDirectly(): boolean {
  const argv1 = process.argv[1];
  if (argv1 === undefined) return false;
  try {
    return import.meta.url === pathToFileURL(realpathSync(argv1)).href;
  } catch {
    return false;
  }
}

if (invokedDirectly()) {
  process.exit(main(process.argv.slice(2)));
}
