#!/usr/bin/env node
/**
 * render --spec PATH
 *
 * Reads a figure spec (JSON), renders the named CSV artifact to a
 * deterministic SVG, and writes it to the spec's output path.
 * Exit 0 on success (including empty inputs), 1 on schema or IO errors.
 */

import { SchemaError } from "./csv.js";
import { renderToFile } from "./render.js";
import { loadSpec } from "./spec.js";

export function main(argv: string[]): number {
  const i = argv.indexOf("--spec");
  if (i === -1 || i + 1 >= argv.length || argv.length !== 2) {
    console.error("usage: render --spec PATH");
    return 2;
  }
  try {
    const out = renderToFile(loadSpec(argv[i + 1]));
    console.log(out);
    return 0;
  } catch (e) {
    if (e instanceof SchemaError) {
      console.error(`schema error: ${e.message}`);
      return 1;
    }
    if (e instanceof Error && "code" in e) {
      console.error(`error: ${e.message}`);
      return 1;
    }
    throw e;
  }
}

process.exit(main(process.argv.slice(2)));
