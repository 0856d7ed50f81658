#!/usr/bin/env node
/** figures <kind> <inputs...> -o out.svg [--dump-verify]
 *
 * Renders one SVG per invocation from rydrx CSV/JSON outputs. With
 * --dump-verify the parsed numeric columns are re-emitted byte-identically
 * to stdout instead (plotting never alters the data).
 */

import { writeFileSync } from "fs";
import { exit } from "process";

import { dumpVerify, parseAny, SchemaError } from "./data.js";
import { buildFigure, Kind, KINDS } from "./figures.js";

function usage(): never {
  console.error(
    `usage: figures <${KINDS.join("|")}> <inputs...> -o out.svg [--dump-verify]`,
  );
  exit(2);
}

export function main(argv: string[]): number {
  const args = [...argv];
  let out: string | null = null;
  let dump = false;
  const positional: string[] = [];
  while (args.length > 0) {
    const a = args.shift() as string;
    if (a === "-o" || a === "--out") {
      out = args.shift() ?? null;
      if (out === null) usage();
    } else if (a === "--dump-verify") {
      dump = true;
    } else if (a === "-h" || a === "--help") {
      usage();
    } else {
      positional.push(a);
    }
  }
  if (positional.length < 2) usage();
  const kind = positional[0] as Kind;
  const inputs = positional.slice(1);
  if (!KINDS.includes(kind)) usage();

  try {
    if (dump) {
      for (const path of inputs) {
        process.stdout.write(dumpVerify(parseAny(path)));
      }
      return 0;
    }
    if (out === null) usage();
    const svg = buildFigure(kind, inputs);
    writeFileSync(out, svg, "utf8");
    console.log(`wrote ${out}`);
    return 0;
  } catch (err) {
    if (err instanceof SchemaError || err instanceof Error) {
      console.error(`error: ${err.message}`);
      return 1;
    }
    throw err;
  }
}

exit(main(process.argv.slice(2)));
