/**
 * Frozen interchange schemas produced by the training harness.
 * This package reads them and never recomputes any summary statistic.
 */

import { readFileSync, readdirSync } from "node:fs";
import { join } from "node:path";

export const METRICS_HEADER = [
  "episode",
  "seed",
  "outcome",
  "steps",
  "progress_frac",
  "mean_abs_jerk",
  "mean_abs_angacc",
] as const;

export const SUMMARY_KEYS = [
  "succ_pct",
  "coll_pct",
  "stag_pct",
  "humanness_error",
  "overall_score",
] as const;

export type SummaryKey = (typeof SUMMARY_KEYS)[number];

export interface MetricsRow {
  episode: number;
  seed: number;
  outcome: string;
  steps: number;
  progress_frac: number;
  mean_abs_jerk: number;
  mean_abs_angacc: number;
}

export interface MetricsFrame {
  scenario: string;
  variant: string;
  rows: MetricsRow[];
  summary: Record<SummaryKey, number>;
}

export class SchemaError extends Error {}

/** Parse the frozen metrics CSV; refuse any header drift. */
export function parseMetricsCsv(text: string, source: string): MetricsRow[] {
  const lines = text.split(/\r?\n/).filter((l) => l.length > 0);
  if (lines.length === 0) {
    throw new SchemaError(`${source}: empty metrics file`);
  }
  if (lines[0] !== METRICS_HEADER.join(",")) {
    throw new SchemaError(
      `${source}: header ${JSON.stringify(lines[0])} does not match the ` +
        `frozen schema ${METRICS_HEADER.join(",")}`,
    );
  }
  return lines.slice(1).map((line, i) => {
    const cells = line.split(",");
    if (cells.length !== METRICS_HEADER.length) {
      throw new SchemaError(`${source}: row ${i + 1} has ${cells.length} cells`);
    }
    const num = (j: number, field: string): number => {
      const v = Number(cells[j]);
      if (!Number.isFinite(v)) {
        throw new SchemaError(`${source}: row ${i + 1} field ${field} is not a number`);
      }
      return v;
    };
    return {
      episode: num(0, "episode"),
      seed: num(1, "seed"),
      outcome: cells[2],
      steps: num(3, "steps"),
      progress_frac: num(4, "progress_frac"),
      mean_abs_jerk: num(5, "mean_abs_jerk"),
      mean_abs_angacc: num(6, "mean_abs_angacc"),
    };
  });
}

function parseSummary(text: string, source: string): Record<SummaryKey, number> {
  let raw: unknown;
  try {
    raw = JSON.parse(text);
  } catch (err) {
    throw new SchemaError(`${source}: invalid JSON (${String(err)})`);
  }
  if (typeof raw !== "object" || raw === null) {
    throw new SchemaError(`${source}: summary must be an object`);
  }
  const out = {} as Record<SummaryKey, number>;
  for (const key of SUMMARY_KEYS) {
    const v = (raw as Record<string, unknown>)[key];
    if (typeof v !== "number" || !Number.isFinite(v)) {
      throw new SchemaError(`${source}: missing or non-numeric key ${key}`);
    }
    out[key] = v;
  }
  return out;
}

/** `<scenario>__<variant>__summary.json` -> labels, or null when foreign. */
export function parseSummaryName(name: string): { scenario: string; variant: string } | null {
  if (!name.endsWith("__summary.json")) return null;
  const stem = name.slice(0, -"__summary.json".length);
  const split = stem.lastIndexOf("__");
  if (split <= 0) return null;
  return { scenario: stem.slice(0, split), variant: stem.slice(split + 2) };
}

/** Load every matched summary/metrics pair in a directory. */
export function loadFrames(dir: string): MetricsFrame[] {
  const frames: MetricsFrame[] = [];
  const entries = readdirSync(dir).sort();
  for (const name of entries) {
    const labels = parseSummaryName(name);
    if (!labels) continue;
    const summary = parseSummary(readFileSync(join(dir, name), "utf8"), name);
    const csvName = `${labels.scenario}__${labels.variant}__metrics.csv`;
    let rows: MetricsRow[] = [];
    try {
      rows = parseMetricsCsv(readFileSync(join(dir, csvName), "utf8"), csvName);
    } catch (err) {
      if ((err as NodeJS.ErrnoException).code !== "ENOENT") throw err;
    }
    frames.push({ scenario: labels.scenario, variant: labels.variant, rows, summary });
  }
  return frames;
}
