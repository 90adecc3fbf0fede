#!/usr/bin/env node
/** fmx-plot <experiment> --in <csv> --out <img> [--style <file>] */

import { experimentIds, isExperimentId, SchemaError } from "./schema";
import { loadStyle, renderFile } from "./index";

interface Args {
  experiment: string;
  inPath: string;
  outPath: string;
  stylePath?: string;
}

export function parseArgs(argv: string[]): Args {
  const [experiment, ...rest] = argv;
  if (!experiment || experiment === "--help" || experiment === "-h") {
    throw new UsageError(usage());
  }
  const flags: Record<string, string> = {};
  for (let i = 0; i < rest.length; i += 2) {
    const flag = rest[i];
    const value = rest[i + 1];
    if (!flag.startsWith("--") || value === undefined) {
      throw new UsageError(`bad argument ${flag}; ${usage()}`);
    }
    flags[flag.slice(2)] = value;
  }
  const known = new Set(["in", "out", "style"]);
  for (const key of Object.keys(flags)) {
    if (!known.has(key)) throw new UsageError(`unknown flag --${key}; ${usage()}`);
  }
  if (!flags.in || !flags.out) throw new UsageError(`--in and --out are required; ${usage()}`);
  return { experiment, inPath: flags.in, outPath: flags.out, stylePath: flags.style };
}

export class UsageError extends Error {}

function usage(): string {
  return `usage: fmx-plot <${experimentIds().join("|")}> --in <csv> --out <svg> [--style <json>]`;
}

export function main(argv: string[]): number {
  let args: Args;
  try {
    args = parseArgs(argv);
  } catch (err) {
    console.error(`fmx-plot: ${(err as Error).message}`);
    return 2;
  }
  if (!isExperimentId(args.experiment)) {
    console.error(`fmx-plot: unknown experiment '${args.experiment}'; ${usage()}`);
    return 2;
  }
  try {
    renderFile(args.experiment, args.inPath, args.outPath, loadStyle(args.stylePath));
  } catch (err) {
    if (err instanceof SchemaError) {
      console.error(`fmx-plot: ${err.message}`);
      return 1;
    }
    console.error(`fmx-plot: ${(err as Error).message}`);
    return 1;
  }
  console.log(args.outPath);
  return 0;
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)));
}
