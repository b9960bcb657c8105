"""Episode records, aggregate rates, comfort statistics, and the overall score."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass

CSV_HEADER = ["episode", "seed", "outcome", "steps", "progress_frac",
              "mean_abs_jerk", "mean_abs_angacc"]

OUTCOMES = ("success", "collision", "offroad", "stagnation", "timeout")

JERK_BOUND = 4.0      # m/s^3 comfort normalization
ANGACC_BOUND = 2.0    # rad/s^2
SCORE_WEIGHTS = (0.5, 0.3, 0.2)   # progress, rule compliance, comfort


@dataclass
class EpisodeRecord:
    episode: int
    seed: int
    outcome: str
    steps: int
    progress_frac: float
    mean_abs_jerk: float
    mean_abs_angacc: float
    violated: bool = False   # any offroute / wrong-way / offroad event fired
    ret: float = 0.0         # undiscounted return, not part of the frozen CSV

    def humanness(self, j_max=JERK_BOUND, a_max=ANGACC_BOUND):
        return (self.mean_abs_jerk / j_max + self.mean_abs_angacc / a_max) / 2.0


def rate(records, outcome):
    if not records:
        return 0.0
    return 100.0 * sum(1 for r in records if r.outcome == outcome) / len(records)


def _ordered_mean(values):
    """Mean over a canonical (sorted) order: episode order cannot shift ulps."""
    values = sorted(values)
    return sum(values) / len(values) if values else 0.0


def humanness_error(records):
    if not records:
        return 0.0
    return _ordered_mean([r.humanness() for r in records])


def compute_overall_score(records, weights=SCORE_WEIGHTS,
                          j_max=JERK_BOUND, a_max=ANGACC_BOUND):
    """w_p * mean progress + w_r * (1 - violation rate) + w_c * (1 - comfort error).

    Progress fractions and the normalized humanness error are clamped to
    [0, 1], so the score is monotone in each factor and lands in [0, 1].
    """
    if not records:
        return 0.0
    w_p, w_r, w_c = weights
    progress = _ordered_mean([min(max(r.progress_frac, 0.0), 1.0) for r in records])
    violation_rate = sum(1 for r in records if r.violated) / len(records)
    comfort = _ordered_mean([min(max(r.humanness(j_max, a_max), 0.0), 1.0)
                             for r in records])
    return w_p * progress + w_r * (1.0 - violation_rate) + w_c * (1.0 - comfort)


def summarize(records):
    return {
        "succ_pct": rate(records, "success"),
        "coll_pct": rate(records, "collision"),
        "stag_pct": rate(records, "stagnation"),
        "humanness_error": humanness_error(records),
        "overall_score": compute_overall_score(records),
    }


def write_metrics_csv(path, records):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        for r in records:
            writer.writerow([r.episode, r.seed, r.outcome, r.steps,
                             repr(r.progress_frac), repr(r.mean_abs_jerk),
                             repr(r.mean_abs_angacc)])


def write_summary_json(path, records, extra=None):
    summary = summarize(records)
    summary["episodes"] = len(records)
    if extra:
        summary.update(extra)
    with open(path, "w") as fh:
        json.dump(summary, fh, indent=1, sort_keys=True)
    return summary
