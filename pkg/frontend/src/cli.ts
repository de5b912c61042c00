/** Command line: plot --kind {learning_curve,wallclock,qdist} --in CSV [--in CSV ...] --out IMG
 *
 * Exit codes: 0 success, 2 usage or schema error, 3 I/O error.
 */

import { readFileSync, writeFileSync } from "node:fs";
import { parseCsv, SchemaError } from "./csv.js";
import { FigureKind, KINDS, renderFigure } from "./figures.js";

export interface Args {
  kind: FigureKind;
  inputs: string[];
  out: string;
}

export function parseArgs(argv: string[]): Args {
  let kind: string | undefined;
  const inputs: string[] = [];
  let out: string | undefined;
  for (let i = 0; i < argv.length; i++) {
    const flag = argv[i];
    const value = argv[i + 1];
    switch (flag) {
      case "--kind":
        kind = value;
        i++;
        break;
      case "--in":
        if (value !== undefined) inputs.push(value);
        i++;
        break;
      case "--out":
        out = value;
        i++;
        break;
      default:
        throw new UsageError(`unknown argument: ${flag}`);
    }
  }
  if (!kind || !(KINDS as readonly string[]).includes(kind)) {
    throw new UsageError(`--kind must be one of ${KINDS.join(", ")}`);
  }
  if (inputs.length === 0) {
    throw new UsageError("at least one --in CSV is required");
  }
  if (!out) {
    throw new UsageError("--out IMG is required");
  }
  return { kind: kind as FigureKind, inputs, out };
}

export class UsageError extends Error {}

export function main(argv: string[]): number {
  let args: Args;
  try {
    args = parseArgs(argv);
  } catch (err) {
    if (err instanceof UsageError) {
      console.error(`usage error: ${err.message}`);
      return 2;
    }
    throw err;
  }
  let texts: string[];
  try {
    texts = args.inputs.map((path) => readFileSync(path, "utf8"));
  } catch (err) {
    console.error(`i/o error: ${(err as Error).message}`);
    return 3;
  }
  let svg: string;
  try {
    svg = renderFigure(args.kind, texts.map(parseCsv));
  } catch (err) {
    if (err instanceof SchemaError) {
      console.error(`validation error: ${err.message}`);
      return 2;
    }
    throw err;
  }
  try {
    writeFileSync(args.out, svg);
  } catch (err) {
    console.error(`i/o error: ${(err as Error).message}`);
    return 3;
  }
  console.log(`wrote ${args.out}`);
  return 0;
}

const invokedDirectly = process.argv[1] && import.meta.url.endsWith(process.argv[1].split("/").pop()!);
if (invokedDirectly) {
  process.exit(main(process.argv.slice(2)));
}
