"""Paired-seed ablation: context-only vs context-free vs the full encoder."""

from __future__ import annotations

import copy
import csv
import json
from pathlib import Path

from .evaluate import evaluate
from .metrics import CSV_HEADER
from .train import Trainer

VARIANTS = ("context_only", "context_free", "full")


def config_for_variant(config, variant):
    cfg = copy.deepcopy(config)
    cfg.run.variant = variant
    cfg.encoder.variant = variant
    return cfg


def run_ablation(config, out_dir=None):
    """Train and evaluate all three variants with identical per-episode seeds.

    Writes per-variant `<scenario>__<variant>__metrics.csv` and
    `..__summary.json`, a combined `ablation.csv`, and `ablation_meta.json`
    carrying the dimension and instrumentation evidence.
    """
    out = Path(out_dir or config.run.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    meta = {"scenario": None, "variants": {}}
    combined_rows = []

    for variant in VARIANTS:
        vcfg = config_for_variant(config, variant)
        trainer = Trainer(vcfg, out / variant)
        train_summary = trainer.run()
        scenario_name = trainer.scenario.name
        meta["scenario"] = scenario_name
        records, summary = evaluate(
            vcfg, agent=trainer.agent, scenario=trainer.scenario,
            out_dir=out, label=f"{scenario_name}__{variant}")
        meta["variants"][variant] = {
            "state_dim": trainer.encoder.out_dim,
            "attention_calls": trainer.encoder.attention_calls,
            "train_reset_seeds": trainer.reset_seeds[:32],
            "eval_seeds": [r.seed for r in records],
            "train": {k: v for k, v in train_summary.items()
                      if k != "wall_seconds"},
            "summary": summary,
        }
        for r in records:
            combined_rows.append([scenario_name, variant, r.episode, r.seed,
                                  r.outcome, r.steps, repr(r.progress_frac),
                                  repr(r.mean_abs_jerk), repr(r.mean_abs_angacc)])

    with open(out / "ablation.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["scenario", "variant"] + CSV_HEADER)
        writer.writerows(combined_rows)
    with open(out / "ablation_meta.json", "w") as fh:
        json.dump(meta, fh, indent=1, sort_keys=True)
    return meta
