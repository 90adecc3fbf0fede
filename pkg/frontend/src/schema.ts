/** Column schemas for the experiment CSVs and strict validation. */

import Papa from "papaparse";

export type ExperimentId = "fig2" | "fig3" | "fig4a" | "fig4b";

export const SCHEMAS: Record<ExperimentId, string[]> = {
  fig2: ["distance_m", "gain_classical_db", "gain_direct_db", "gain_plus_db", "gain_minus_db"],
  fig3: ["model", "branch", "estimator", "p_db", "nmse", "nmse_avg_energy"],
  fig4a: ["i", "sv", "model", "cond_db"],
  fig4b: ["p_db", "rate_mc", "rate_mc_se", "rate_bound", "rate_mimo", "rate_mimo_se"],
};

/** Columns that hold labels rather than numbers. */
const TEXT_COLUMNS = new Set(["model", "branch", "estimator"]);

export type Row = Record<string, string | number>;

export class SchemaError extends Error {}

export function experimentIds(): ExperimentId[] {
  return Object.keys(SCHEMAS) as ExperimentId[];
}

export function isExperimentId(name: string): name is ExperimentId {
  return name in SCHEMAS;
}

/**
 * Parse a numeric cell. The producer writes non-finite sentinels ("inf" for
 * a singular correlation matrix), which are legal values that the renderer
 * later skips; anything else non-numeric is a schema violation.
 */
function parseNumber(raw: string): number | undefined {
  const lower = raw.trim().toLowerCase();
  if (lower === "inf" || lower === "+inf") return Infinity;
  if (lower === "-inf") return -Infinity;
  if (lower === "nan") return NaN;
  if (lower === "") return undefined;
  const value = Number(raw);
  return Number.isNaN(value) ? undefined : value;
}

/**
 * Parse CSV text against an experiment's schema.
 *
 * Rejects missing or unknown columns (listing both), empty files, and
 * non-numeric values in numeric columns.
 */
export function parseCsv(text: string, experiment: ExperimentId): Row[] {
  const expected = SCHEMAS[experiment];
  const parsed = Papa.parse<string[]>(text.trim(), { skipEmptyLines: true });
  if (parsed.errors.length > 0) {
    throw new SchemaError(`malformed CSV: ${parsed.errors[0].message}`);
  }
  const lines = parsed.data;
  if (lines.length === 0) {
    throw new SchemaError("empty CSV: no header row");
  }
  const header = lines[0];
  const missing = expected.filter((c) => !header.includes(c));
  const unknown = header.filter((c) => !expected.includes(c));
  if (missing.length > 0 || unknown.length > 0) {
    const parts = [];
    if (missing.length > 0) parts.push(`missing columns: ${missing.join(", ")}`);
    if (unknown.length > 0) parts.push(`unknown columns: ${unknown.join(", ")}`);
    throw new SchemaError(`schema mismatch for ${experiment}: ${parts.join("; ")}`);
  }
  if (lines.length === 1) {
    throw new SchemaError("empty CSV: header but no data rows");
  }
  const rows: Row[] = [];
  for (let i = 1; i < lines.length; i++) {
    const line = lines[i];
    if (line.length !== header.length) {
      throw new SchemaError(`row ${i + 1}: expected ${header.length} fields, got ${line.length}`);
    }
    const row: Row = {};
    header.forEach((col, j) => {
      const raw = line[j];
      if (TEXT_COLUMNS.has(col)) {
        row[col] = raw;
        return;
      }
      const value = parseNumber(raw);
      if (value === undefined) {
        throw new SchemaError(`row ${i + 1}, column ${col}: not a number: ${raw}`);
      }
      row[col] = value;
    });
    rows.push(row);
  }
  return rows;
}
