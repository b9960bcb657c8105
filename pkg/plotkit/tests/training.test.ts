import { mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { describe, expect, it } from "vitest";

import { movingAverage, parseTrainLog, plotTraining, TrainingPlotError } from "../src/training.js";
import { run } from "../src/cli.js";

const LOG_HEADER =
  "kind,env_step,episode,return,length,outcome,success_rate," +
  "critic_loss,policy_loss,alpha,entropy,buffer_size";

function episodeRow(step: number, ret: number, success = 1.0): string {
  return `episode,${step},1,${ret},200,success,${success},,,,,${step}`;
}

function writeLog(dir: string, rows: string[]): string {
  const path = join(dir, "train_log.csv");
  writeFileSync(path, [LOG_HEADER, ...rows].join("\n") + "\n");
  return path;
}

/** Independent trailing moving average with a warm-up ramp. */
function referenceMovingAverage(values: number[], window: number): number[] {
  return values.map((_, i) => {
    const lo = Math.max(0, i - window + 1);
    const slice = values.slice(lo, i + 1);
    return slice.reduce((a, b) => a + b, 0) / slice.length;
  });
}

describe("parseTrainLog", () => {
  it("keeps episode rows and counts malformed ones", () => {
    const dir = mkdtempSync(join(tmpdir(), "plotkit-"));
    const path = writeLog(dir, [
      episodeRow(100, 5.0),
      "update,120,,,,,,0.4,-1.2,0.2,1.4,120",
      "episode,abc,1,notanumber,200,success,xyz,,,,,1",
      episodeRow(200, 7.5),
    ]);
    const { points, skipped } = parseTrainLog(readFileSync(path, "utf8"), path);
    expect(points).toHaveLength(2);
    expect(skipped).toBe(1);
  });

  it("refuses a foreign header", () => {
    expect(() => parseTrainLog("a,b,c\n1,2,3\n", "t")).toThrow(TrainingPlotError);
  });
});

describe("movingAverage", () => {
  it("window 1 equals the raw series", () => {
    const values = [3.0, -1.0, 2.5, 8.0];
    expect(movingAverage(values, 1)).toEqual(values);
  });

  it("matches an independently computed moving average", () => {
    const values = Array.from({ length: 40 }, (_, i) => Math.sin(i) * 10 + i / 3);
    for (const window of [2, 5, 10]) {
      const ours = movingAverage(values, window);
      const ref = referenceMovingAverage(values, window);
      ours.forEach((v, i) => expect(v).toBeCloseTo(ref[i], 12));
    }
  });
});

describe("plotTraining", () => {
  it("constant return plots a flat line whose sidecar equals the constant", () => {
    const dir = mkdtempSync(join(tmpdir(), "plotkit-"));
    const path = writeLog(dir, [100, 200, 300, 400].map((s) => episodeRow(s, 42.5)));
    const out = join(dir, "figs");
    plotTraining(path, out, 10, () => {});
    const sidecar = JSON.parse(readFileSync(join(out, "training_curves.json"), "utf8"));
    expect(sidecar.return_raw).toEqual([42.5, 42.5, 42.5, 42.5]);
    expect(sidecar.return_smoothed).toEqual([42.5, 42.5, 42.5, 42.5]);
    expect(sidecar.smoothing_window).toBe(10);
    const svg = readFileSync(join(out, "training_return.svg"), "utf8");
    expect(svg).toContain("smoothing window: 10");
  });

  it("fewer than two rows is an error", () => {
    const dir = mkdtempSync(join(tmpdir(), "plotkit-"));
    const path = writeLog(dir, [episodeRow(100, 1.0)]);
    expect(() => plotTraining(path, join(dir, "f"), 10, () => {})).toThrow(
      TrainingPlotError,
    );
  });

  it("cli accepts a directory containing train_log.csv", () => {
    const dir = mkdtempSync(join(tmpdir(), "plotkit-"));
    writeLog(dir, [episodeRow(100, 1.0), episodeRow(220, 2.0)]);
    const out = join(dir, "figs");
    expect(run(["training", "--in", dir, "--out", out])).toBe(0);
    const sidecar = JSON.parse(readFileSync(join(out, "training_curves.json"), "utf8"));
    expect(sidecar.env_steps).toEqual([100, 220]);
  });

  it("cli rejects a bad window", () => {
    const dir = mkdtempSync(join(tmpdir(), "plotkit-"));
    writeLog(dir, [episodeRow(100, 1.0), episodeRow(220, 2.0)]);
    expect(run(["training", "--in", dir, "--out", join(dir, "f"), "--window", "0"])).toBe(1);
  });
});
