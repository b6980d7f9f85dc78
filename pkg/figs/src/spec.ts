/**
 * Figure specs: a small JSON file naming the input CSV, the figure kind,
 * optional axis scales, and the output image path.  Relative paths are
 * resolved against the spec file's directory.
 */

import { readFileSync } from "node:fs";
import { dirname, resolve } from "node:path";
import { SchemaError } from "./csv.js";
import type { AxisScales, ScaleKind } from "./figures.js";

export const KINDS = [
  "surface_heatmap",
  "timeline",
  "residuals",
  "shooting_fan",
] as const;

export type FigureKind = (typeof KINDS)[number];

export interface FigureSpec {
  kind: FigureKind;
  input: string;
  output: string;
  scales: AxisScales;
}

function scaleKind(value: unknown, field: string, fallback: ScaleKind):
  ScaleKind {
  if (value === undefined) return fallback;
  if (value === "linear" || value === "log") return value;
  throw new SchemaError(
    `spec field '${field}' must be "linear" or "log", got ${JSON.stringify(value)}`,
  );
}

export function parseSpec(raw: unknown, baseDir: string): FigureSpec {
  if (typeof raw !== "object" || raw === null || Array.isArray(raw)) {
    throw new SchemaError("spec must be a JSON object");
  }
  const obj = raw as Record<string, unknown>;
  const kind = obj.kind;
  if (typeof kind !== "string" || !KINDS.includes(kind as FigureKind)) {
    throw new SchemaError(
      `spec field 'kind' must be one of ${KINDS.join(", ")}, got ` +
        `${JSON.stringify(kind)}`,
    );
  }
  for (const field of ["input", "output"] as const) {
    if (typeof obj[field] !== "string" || obj[field] === "") {
      throw new SchemaError(`spec field '${field}' must be a non-empty path`);
    }
  }
  const known = new Set(["kind", "input", "output", "xscale", "yscale"]);
  for (const key of Object.keys(obj)) {
    if (!known.has(key)) {
      throw new SchemaError(
        `unknown spec field '${key}'; known fields: ${[...known].join(", ")}`,
      );
    }
  }
  return {
    kind: kind as FigureKind,
    input: resolve(baseDir, obj.input as string),
    output: resolve(baseDir, obj.output as string),
    scales: {
      x: scaleKind(obj.xscale, "xscale", "linear"),
      // residual decay is the log-scale story by default
      y: scaleKind(obj.yscale, "yscale",
        kind === "residuals" ? "log" : "linear"),
    },
  };
}

export function loadSpec(path: string): FigureSpec {
  const abs = resolve(path);
  let raw: unknown;
  try {
    raw = JSON.parse(readFileSync(abs, "utf-8"));
  } catch (e) {
    if (e instanceof SyntaxError) {
      throw new SchemaError(`spec ${abs} is not valid JSON: ${e.message}`);
    }
    throw e;
  }
  return parseSpec(raw, dirname(abs));
}
