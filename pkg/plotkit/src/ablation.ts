/**
 * Ablation bar charts: one figure per metric (humanness error, overall
 * score), bars grouped by scenario with one bar per variant, plus a JSON
 * sidecar per figure carrying every plotted value verbatim.
 */

import { mkdirSync, writeFileSync } from "node:fs";
import { join } from "node:path";

import { loadFrames, MetricsFrame, SummaryKey } from "./schema.js";
import { BarGroup, groupedBarChart } from "./svg.js";

export class AblationError extends Error {}

const METRICS: { key: SummaryKey; title: string; file: string }[] = [
  { key: "humanness_error", title: "Humanness Error", file: "ablation_humanness_error" },
  { key: "overall_score", title: "Overall Score", file: "ablation_overall_score" },
];

export interface AblationSidecar {
  metric: string;
  variants: string[];
  groups: { scenario: string; bars: { variant: string; value: number | null }[] }[];
  warnings: string[];
}

export function buildSidecar(
  frames: MetricsFrame[],
  key: SummaryKey,
): AblationSidecar {
  const scenarios = [...new Set(frames.map((f) => f.scenario))].sort();
  const variants = [...new Set(frames.map((f) => f.variant))].sort();
  const warnings: string[] = [];
  const groups = scenarios.map((scenario) => ({
    scenario,
    bars: variants.map((variant) => {
      const frame = frames.find(
        (f) => f.scenario === scenario && f.variant === variant,
      );
      if (!frame) {
        warnings.push(`missing variant ${variant} for scenario ${scenario}`);
        return { variant, value: null };
      }
      return { variant, value: frame.summary[key] };
    }),
  }));
  return { metric: key, variants, groups, warnings };
}

export function plotAblation(inDir: string, outDir: string, warn: (msg: string) => void) {
  const frames = loadFrames(inDir);
  if (frames.length === 0) {
    throw new AblationError(`no <scenario>__<variant>__summary.json files in ${inDir}`);
  }
  const variants = [...new Set(frames.map((f) => f.variant))];
  const scenarios = [...new Set(frames.map((f) => f.scenario))];
  if (variants.length < 2 || scenarios.length < 1) {
    throw new AblationError(
      `need >= 2 variants for >= 1 scenario, found ${variants.length} ` +
        `variant(s) across ${scenarios.length} scenario(s)`,
    );
  }
  mkdirSync(outDir, { recursive: true });
  const written: string[] = [];
  for (const metric of METRICS) {
    const sidecar = buildSidecar(frames, metric.key);
    sidecar.warnings.forEach(warn);
    const groups: BarGroup[] = sidecar.groups.map((g) => ({
      label: g.scenario,
      bars: g.bars.map((b) => ({ label: b.variant, value: b.value })),
    }));
    const svg = groupedBarChart(metric.title, groups, sidecar.variants);
    const svgPath = join(outDir, `${metric.file}.svg`);
    const jsonPath = join(outDir, `${metric.file}.json`);
    writeFileSync(svgPath, svg);
    writeFileSync(jsonPath, JSON.stringify(sidecar, null, 1) + "\n");
    written.push(svgPath, jsonPath);
  }
  return written;
}
