#!/usr/bin/env node
/** Command-line entry: engine exports in, scorer protocol file out.
 *
 * Usage:
 *   linkqa-export --tokens tokens.jsonl --graphs graphs.jsonl --out scores.jsonl
 *                 [--model mini-12] [--seed 0] [--batch-size 8]
 *                 [--max-pieces 384] [--max-span-len 10]
 *                 [--no-single-token] [--device cpu]
 *
 * Prints a JSON summary to stdout; warnings go to stderr. Exits 0 on
 * success, 2 on bad arguments or malformed inputs.
 */

import { pathToFileURL } from "node:url";
import { parseArgs } from "node:util";

import { ExportJob, runExport } from "./export.js";

const USAGE =
  "usage: linkqa-export --tokens FILE --graphs FILE --out FILE " +
  "[--model ID] [--seed N] [--batch-size N] [--max-pieces N] " +
  "[--max-span-len N] [--no-single-token] [--device cpu]";

function parseIntArg(value: string, name: string): number {
  const parsed = Number(value);
  if (!Number.isInteger(parsed)) {
    throw new Error(`--${name} expects an integer, got ${JSON.stringify(value)}`);
  }
  return parsed;
}

/** Parse argv into an ExportJob; throws on unknown or missing options. */
export function parseJob(argv: string[]): ExportJob {
  const { values } = parseArgs({
    args: argv,
    options: {
      tokens: { type: "string" },
      graphs: { type: "string" },
      out: { type: "string" },
      model: { type: "string" },
      seed: { type: "string" },
      "batch-size": { type: "string" },
      "max-pieces": { type: "string" },
      "max-span-len": { type: "string" },
      "no-single-token": { type: "boolean" },
      device: { type: "string" },
      help: { type: "boolean", short: "h" },
    },
    allowPositionals: false,
  });
  if (values.help) {
    throw new HelpRequested();
  }
  for (const required of ["tokens", "graphs", "out"] as const) {
    if (!values[required]) {
      throw new Error(`--${required} is required`);
    }
  }
  const job: ExportJob = {
    tokensPath: values.tokens as string,
    graphsPath: values.graphs as string,
    outPath: values.out as string,
  };
  if (values.model !== undefined) job.model = values.model;
  if (values.seed !== undefined) job.seed = parseIntArg(values.seed, "seed");
  if (values["batch-size"] !== undefined) {
    job.batchSize = parseIntArg(values["batch-size"], "batch-size");
  }
  if (values["max-pieces"] !== undefined) {
    job.maxPieces = parseIntArg(values["max-pieces"], "max-pieces");
  }
  if (values["max-span-len"] !== undefined) {
    job.maxSpanLen = parseIntArg(values["max-span-len"], "max-span-len");
  }
  if (values["no-single-token"]) job.allowSingleToken = false;
  if (values.device !== undefined) job.device = values.device;
  return job;
}

class HelpRequested extends Error {}

/** Run the CLI; returns the process exit code. */
export async function main(argv: string[]): Promise<number> {
  let job: ExportJob;
  try {
    job = parseJob(argv);
  } catch (exc) {
    if (exc instanceof HelpRequested) {
      console.log(USAGE);
      return 0;
    }
    console.error(`error: ${exc instanceof Error ? exc.message : exc}`);
    console.error(USAGE);
    return 2;
  }
  try {
    const summary = await runExport(job);
    console.log(JSON.stringify(summary, null, 2));
    return 0;
  } catch (exc) {
    console.error(`error: ${exc instanceof Error ? exc.message : exc}`);
    return 2;
  }
}

const invokedDirectly =
  process.argv[1] !== undefined &&
  import.meta.url === pathToFileURL(process.argv[1]).href;

if (invokedDirectly) {
  main(process.argv.slice(2)).then((code) => {
    process.exitCode = code;
  });
}
