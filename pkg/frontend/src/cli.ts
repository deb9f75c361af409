#!/usr/bin/env node
/**
 * figplots: render SVG figures from the simulator's CSV/JSON outputs.
 *
 * Usage:
 *   figplots --kind heatmap --input sweep.csv [--summary summary.json] --output fig.svg
 *   figplots --kind distance_curves --input sweep.csv --output fig.svg
 *   figplots --kind trajectory --input trajectory.csv --output fig.svg
 *   figplots --kind metrics --input trajectory.csv --output fig.svg
 *
 * Rendering never touches the simulator; it consumes files only.
 */

import { readFileSync, writeFileSync } from "node:fs";
import { parseArgs } from "node:util";

import { SchemaError, parseCsv } from "./csv.js";
import { KIND_COLUMNS, PlotKind } from "./schema.js";
import {
  renderDistanceCurves,
  renderHeatmap,
  renderMetrics,
  renderTrajectory,
} from "./render.js";

export function run(argv: string[]): number {
  let values;
  try {
    ({ values } = parseArgs({
      args: argv,
      options: {
        kind: { type: "string" },
        input: { type: "string" },
        output: { type: "string" },
        summary: { type: "string" },
      },
    }));
  } catch (err) {
    console.error(`argument error: ${(err as Error).message}`);
    return 2;
  }

  const kind = values.kind as PlotKind | undefined;
  if (!kind || !(kind in KIND_COLUMNS)) {
    console.error(`--kind must be one of ${Object.keys(KIND_COLUMNS).join(", ")}`);
    return 2;
  }
  if (!values.input || !values.output) {
    console.error("--input and --output are required");
    return 2;
  }

  try {
    const table = parseCsv(readFileSync(values.input, "utf-8"), KIND_COLUMNS[kind]);
    let svg: string;
    if (kind === "heatmap") {
      let tauStar: number | null = null;
      if (values.summary) {
        const summary = JSON.parse(readFileSync(values.summary, "utf-8"));
        tauStar = typeof summary.tau_star === "number" ? summary.tau_star : null;
      }
      svg = renderHeatmap(table, tauStar);
    } else if (kind === "distance_curves") {
      svg = renderDistanceCurves(table);
    } else if (kind === "trajectory") {
      svg = renderTrajectory(table);
    } else {
      svg = renderMetrics(table);
    }
    writeFileSync(values.output, svg + "\n");
    return 0;
  } catch (err) {
    if (err instanceof SchemaError) {
      console.error(`schema error: ${err.message}`);
      return 3;
    }
    console.error(`error: ${(err as Error).message}`);
    return 1;
  }
}

if (process.argv[1] && import.meta.url.endsWith(process.argv[1].split("/").pop()!)) {
  process.exit(run(process.argv.slice(2)));
}
