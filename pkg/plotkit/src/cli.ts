#!/usr/bin/env node
/**
 * dadrl-plot: offline figures from harness outputs.
 *
 *   dadrl-plot ablation --in DIR --out DIR
 *   dadrl-plot training --in DIR --out DIR [--window N]
 *
 * Exit codes: 0 ok, 1 usage/input error.
 */

import { statSync } from "node:fs";
import { join } from "node:path";
import { parseArgs } from "node:util";

import { AblationError, plotAblation } from "./ablation.js";
import { SchemaError } from "./schema.js";
import { plotTraining, TrainingPlotError } from "./training.js";

function usage(): string {
  return "usage: dadrl-plot ablation|training --in DIR --out DIR [--window N]";
}

export function run(argv: string[]): number {
  const [command, ...rest] = argv;
  if (command !== "ablation" && command !== "training") {
    console.error(usage());
    return 1;
  }
  let values: { in?: string; out?: string; window?: string };
  try {
    ({ values } = parseArgs({
      args: rest,
      options: {
        in: { type: "string" },
        out: { type: "string" },
        window: { type: "string", default: "10" },
      },
    }));
  } catch (err) {
    console.error(String(err));
    console.error(usage());
    return 1;
  }
  if (!values.in || !values.out) {
    console.error(usage());
    return 1;
  }
  const warn = (msg: string) => console.error(`warning: ${msg}`);
  try {
    let written: string[];
    if (command === "ablation") {
      written = plotAblation(values.in, values.out, warn);
    } else {
      const window = Number(values.window);
      if (!Number.isInteger(window) || window < 1) {
        console.error(`--window must be a positive integer, got ${values.window}`);
        return 1;
      }
      const logPath = statSync(values.in).isDirectory()
        ? join(values.in, "train_log.csv")
        : values.in;
      written = plotTraining(logPath, values.out, window, warn);
    }
    for (const path of written) {
      console.log(path);
    }
    return 0;
  } catch (err) {
    if (
      err instanceof AblationError ||
      err instanceof SchemaError ||
      err instanceof TrainingPlotError ||
      (err as NodeJS.ErrnoException).code === "ENOENT"
    ) {
      console.error(`error: ${(err as Error).message}`);
      return 1;
    }
    throw err;
  }
}

const invokedDirectly =
  process.argv[1] !== undefined &&
  import.meta.url === new URL(`file://${process.argv[1]}`).href;
if (invokedDirectly) {
  process.exit(run(process.argv.slice(2)));
}
