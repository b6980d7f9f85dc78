/**
 * Dispatch a figure spec to its renderer.
 *
 * Rendering is a pure function of (CSV bytes, spec): no timestamps,
 * randomness or environment state enter the output, so identical inputs
 * produce byte-identical SVG.
 */

import { mkdirSync, writeFileSync } from "node:fs";
import { dirname } from "node:path";
import { SCHEMAS, readCsv } from "./csv.js";
import {
  residualsFigure, shootingFan, surfaceHeatmap, timelineFigure,
} from "./figures.js";
import type { FigureSpec } from "./spec.js";

export function render(spec: FigureSpec): string {
  switch (spec.kind) {
    case "surface_heatmap":
      return surfaceHeatmap(readCsv(spec.input, SCHEMAS.surface));
    case "timeline":
      return timelineFigure(readCsv(spec.input, SCHEMAS.timeline), spec.scales);
    case "residuals":
      return residualsFigure(
        readCsv(spec.input, SCHEMAS.residuals), spec.scales);
    case "shooting_fan":
      return shootingFan(readCsv(spec.input, SCHEMAS.fan), spec.scales);
  }
}

export function renderToFile(spec: FigureSpec): string {
  const svg = render(spec);
  mkdirSync(dirname(spec.output), { recursive: true });
  writeFileSync(spec.output, svg, "utf-8");
  return spec.output;
}
