/**
 * Strict readers for the blowup2d CSV artifacts.
 *
 * The producing side writes UTF-8, a single header line, '.' decimal
 * separators and `repr(float)` values (so non-finite entries appear as
 * "inf" / "-inf" / "nan").  Columns are located by name; missing columns
 * raise a SchemaError that lists the full expected header.
 */

import { readFileSync } from "node:fs";
import Papa from "papaparse";

export class SchemaError extends Error {}

export type Row = Record<string, number | string>;

export interface ColumnSpec {
  name: string;
  kind: "number" | "string";
}

function parseNumber(token: string, column: string, line: number): number {
  const t = token.trim();
  if (t === "inf") return Infinity;
  if (t === "-inf") return -Infinity;
  if (t === "nan") return NaN;
  const v = Number(t);
  if (t === "" || Number.isNaN(v)) {
    throw new SchemaError(
      `line ${line}: column '${column}': cannot parse '${token}' as a number`,
    );
  }
  return v;
}

/** Parse CSV text against an expected column list. */
export function parseCsv(text: string, columns: ColumnSpec[]): Row[] {
  const parsed = Papa.parse<string[]>(text.trim(), {
    delimiter: ",",
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    const e = parsed.errors[0];
    throw new SchemaError(`CSV parse error: ${e.message} (row ${e.row})`);
  }
  const grid = parsed.data;
  if (grid.length === 0) {
    throw new SchemaError(
      `empty file; expected header: ${columns.map((c) => c.name).join(",")}`,
    );
  }
  const header = grid[0].map((h) => h.trim());
  const index = new Map<string, number>();
  header.forEach((h, i) => index.set(h, i));
  const missing = columns.filter((c) => !index.has(c.name));
  if (missing.length > 0) {
    throw new SchemaError(
      `missing column(s) ${missing.map((c) => `'${c.name}'`).join(", ")}; ` +
        `expected header: ${columns.map((c) => c.name).join(",")}; ` +
        `found: ${header.join(",")}`,
    );
  }
  const rows: Row[] = [];
  for (let r = 1; r < grid.length; r++) {
    const raw = grid[r];
    const row: Row = {};
    for (const col of columns) {
      const token = raw[index.get(col.name)!] ?? "";
      row[col.name] =
        col.kind === "number"
          ? parseNumber(token, col.name, r + 1)
          : token.trim();
    }
    rows.push(row);
  }
  return rows;
}

export function readCsv(path: string, columns: ColumnSpec[]): Row[] {
  return parseCsv(readFileSync(path, "utf-8"), columns);
}

function numeric(...names: string[]): ColumnSpec[] {
  return names.map((name) => ({ name, kind: "number" as const }));
}

/** Documented artifact schemas, keyed by figure input. */
export const SCHEMAS = {
  surface: [
    ...numeric("x1", "x2", "T", "grad1", "grad2", "margin"),
    { name: "classification", kind: "string" as const },
  ],
  timeline: numeric(
    "x1", "x2", "T", "A", "s_left", "s_up", "s_up_rel", "s_right_plus",
    "s_min", "chronology_ok",
  ),
  residuals: numeric("s", "residual_1", "residual_2", "residual_4"),
  fan: numeric("nu0", "s", "phi"),
};
