/**
 * Training curves from the harness train log: episode return and rolling
 * success rate against environment steps, with optional trailing-window
 * smoothing (window recorded in the figure caption and the sidecar).
 */

import { mkdirSync, readFileSync, writeFileSync } from "node:fs";
import { basename, join } from "node:path";

import { lineChart } from "./svg.js";

export class TrainingPlotError extends Error {}

const LOG_HEADER =
  "kind,env_step,episode,return,length,outcome,success_rate," +
  "critic_loss,policy_loss,alpha,entropy,buffer_size";

export interface EpisodePoint {
  env_step: number;
  ret: number;
  success_rate: number;
}

export function parseTrainLog(
  text: string,
  source: string,
): { points: EpisodePoint[]; skipped: number } {
  const lines = text.split(/\r?\n/).filter((l) => l.length > 0);
  if (lines.length === 0 || lines[0] !== LOG_HEADER) {
    throw new TrainingPlotError(
      `${source}: not a train log (header mismatch)`,
    );
  }
  const points: EpisodePoint[] = [];
  let skipped = 0;
  for (const line of lines.slice(1)) {
    const cells = line.split(",");
    if (cells[0] !== "episode") continue;
    const env_step = Number(cells[1]);
    const ret = Number(cells[3]);
    const success_rate = Number(cells[6]);
    if (!Number.isFinite(env_step) || !Number.isFinite(ret) || !Number.isFinite(success_rate)) {
      skipped += 1;
      continue;
    }
    points.push({ env_step, ret, success_rate });
  }
  return { points, skipped };
}

/** Trailing moving average whose window ramps up from 1 at the start. */
export function movingAverage(values: number[], window: number): number[] {
  const out: number[] = [];
  let acc = 0;
  for (let i = 0; i < values.length; i++) {
    acc += values[i];
    if (i >= window) acc -= values[i - window];
    out.push(acc / Math.min(i + 1, window));
  }
  return out;
}

export interface TrainingSidecar {
  source: string;
  smoothing_window: number;
  skipped_rows: number;
  env_steps: number[];
  return_raw: number[];
  return_smoothed: number[];
  success_rate: number[];
}

export function plotTraining(
  logPath: string,
  outDir: string,
  window: number,
  warn: (msg: string) => void,
): string[] {
  const { points, skipped } = parseTrainLog(
    readFileSync(logPath, "utf8"),
    logPath,
  );
  if (skipped > 0) {
    warn(`${logPath}: skipped ${skipped} malformed row(s)`);
  }
  if (points.length < 2) {
    throw new TrainingPlotError(
      `${logPath}: need >= 2 episode rows, found ${points.length}`,
    );
  }
  mkdirSync(outDir, { recursive: true });
  const xs = points.map((p) => p.env_step);
  const returns = points.map((p) => p.ret);
  const success = points.map((p) => p.success_rate);
  const smoothed = movingAverage(returns, window);
  const caption = `smoothing window: ${window} episodes`;

  const returnSvg = lineChart("Episode Return vs Env Steps", caption, [
    { label: "return (raw)", xs, ys: returns },
    { label: `return (avg ${window})`, xs, ys: smoothed },
  ]);
  const successSvg = lineChart("Training Success Rate vs Env Steps", caption, [
    { label: "rolling success rate", xs, ys: success },
  ]);

  const sidecar: TrainingSidecar = {
    source: basename(logPath),
    smoothing_window: window,
    skipped_rows: skipped,
    env_steps: xs,
    return_raw: returns,
    return_smoothed: smoothed,
    success_rate: success,
  };
  const written = [
    join(outDir, "training_return.svg"),
    join(outDir, "training_success.svg"),
    join(outDir, "training_curves.json"),
  ];
  writeFileSync(written[0], returnSvg);
  writeFileSync(written[1], successSvg);
  writeFileSync(written[2], JSON.stringify(sidecar, null, 1) + "\n");
  return written;
}
