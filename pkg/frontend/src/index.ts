/** Programmatic API: render an experiment CSV to an SVG file. */

import * as fs from "fs";

import { buildChart } from "./figures";
import { ExperimentId, parseCsv, SchemaError } from "./schema";
import { DEFAULT_STYLE, renderChart, Style } from "./svg";

export { SCHEMAS, SchemaError, isExperimentId, experimentIds, parseCsv } from "./schema";
export { DEFAULT_STYLE, renderChart } from "./svg";
export { buildChart } from "./figures";
export type { Style, ChartSpec, Series } from "./svg";
export type { ExperimentId, Row } from "./schema";

export function loadStyle(path?: string): Style {
  if (!path) return DEFAULT_STYLE;
  const overrides = JSON.parse(fs.readFileSync(path, "utf-8"));
  const known = new Set(Object.keys(DEFAULT_STYLE));
  for (const key of Object.keys(overrides)) {
    if (!known.has(key)) {
      throw new SchemaError(`unknown style key: ${key}`);
    }
  }
  return { ...DEFAULT_STYLE, ...overrides };
}

/**
 * Render `inPath` (an fmx experiment CSV) to an SVG at `outPath`.
 *
 * Validates the CSV against the experiment schema first; on any validation
 * error nothing is written.
 */
export function renderFile(experiment: ExperimentId, inPath: string, outPath: string,
                           style: Style = DEFAULT_STYLE): void {
  const text = fs.readFileSync(inPath, "utf-8");
  const rows = parseCsv(text, experiment);
  const svg = renderChart(buildChart(experiment, rows), style);
  fs.writeFileSync(outPath, svg, "utf-8");
}
