"""Command-line interface: train, eval, gradcheck, replay, ablate.

Exit codes: 0 ok, 2 configuration/load error, 3 acceptance-check failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from ..rl import SACConfig
from ..sim.scenario import ScenarioError
from .builders import build_agent
from .ablate import run_ablation
from .config import AppConfig, ConfigError, load_config
from .evaluate import evaluate
from .gradcheck_cmd import run_gradcheck
from .replay import ReplayRefused, replay_log
from .train import Trainer

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CHECK_FAILED = 3


def _load(args):
    config = load_config(args.config) if args.config else AppConfig()
    if getattr(args, "seed", None) is not None:
        config.run.seed = args.seed
    if getattr(args, "out", None) is not None:
        config.run.out_dir = args.out
    if getattr(args, "scenario", None) is not None:
        config.run.scenario = args.scenario
    return config


def cmd_train(args):
    config = _load(args)
    trainer = Trainer(config)
    summary = trainer.run()
    wall = summary.pop("wall_seconds")
    out = Path(config.run.out_dir)
    with open(out / "train_summary.json", "w") as fh:
        json.dump(summary, fh, indent=1, sort_keys=True)
    print(f"trained {summary['env_steps']} env steps, "
          f"{summary['updates']} updates, {summary['episodes']} episodes "
          f"in {wall:.1f}s (early stop: {summary['stopped_early']})")
    print(f"checkpoint: {summary['checkpoint']}")
    return EXIT_OK


def cmd_eval(args):
    config = _load(args)
    agent = None
    if args.policy == "agent":
        agent = build_agent(config)
        sidecar = Path(args.checkpoint).with_suffix(".json")
        agent.load(args.checkpoint,
                   sidecar if sidecar.exists() else None)
    records, summary = evaluate(
        config, agent=agent, episodes=args.episodes, policy=args.policy,
        out_dir=config.run.out_dir)
    for key in ("succ_pct", "coll_pct", "stag_pct", "humanness_error",
                "overall_score"):
        print(f"{key}: {summary[key]:.4g}")
    return EXIT_OK


def cmd_gradcheck(args):
    _reports, ok = run_gradcheck(seeds=args.seeds, tolerance=args.tolerance,
                                 base_seed=args.seed or 0)
    print("gradcheck:", "PASS" if ok else "FAIL")
    return EXIT_OK if ok else EXIT_CHECK_FAILED


def cmd_replay(args):
    report = replay_log(args.log)
    if report.clean:
        print(f"replay clean over {report.steps_checked} steps")
        return EXIT_OK
    print(f"replay diverged at step {report.first_divergence}: {report.detail}")
    return EXIT_CHECK_FAILED


def cmd_ablate(args):
    config = _load(args)
    meta = run_ablation(config)
    for variant, info in meta["variants"].items():
        print(f"{variant}: state_dim={info['state_dim']} "
              f"attention_calls={info['attention_calls']} "
              f"succ_pct={info['summary']['succ_pct']:.4g}")
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="dadrl",
        description="Attention-driven RL driving lab: train, evaluate, and "
                    "audit policies in the built-in traffic simulator.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, checkpoint=False):
        p.add_argument("--config", help="JSON config path (defaults apply without it)")
        p.add_argument("--seed", type=int, help="override run.seed")
        p.add_argument("--out", help="override run.out_dir")
        p.add_argument("--scenario", help="override run.scenario")
        if checkpoint:
            p.add_argument("--checkpoint", required=False,
                           help="parameter checkpoint path")

    p_train = sub.add_parser("train", help="run seeded vectorized training")
    common(p_train)
    p_train.set_defaults(fn=cmd_train)

    p_eval = sub.add_parser("eval", help="50-episode deterministic evaluation")
    common(p_eval, checkpoint=True)
    p_eval.add_argument("--episodes", type=int, default=None)
    p_eval.add_argument("--policy", choices=("agent", "random"), default="agent")
    p_eval.set_defaults(fn=cmd_eval)

    p_grad = sub.add_parser("gradcheck",
                            help="finite-difference audit of the full composite")
    p_grad.add_argument("--config", help="JSON config path (seed only)")
    p_grad.add_argument("--seed", type=int, default=0)
    p_grad.add_argument("--seeds", type=int, default=5)
    p_grad.add_argument("--tolerance", type=float, default=1e-4)
    p_grad.set_defaults(fn=cmd_gradcheck)

    p_replay = sub.add_parser("replay", help="verify a trajectory log bitwise")
    p_replay.add_argument("--log", required=True)
    p_replay.set_defaults(fn=cmd_replay)

    p_ablate = sub.add_parser("ablate",
                              help="train and evaluate the three encoder variants")
    common(p_ablate)
    p_ablate.set_defaults(fn=cmd_ablate)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "eval" and args.policy == "agent" and not args.checkpoint:
        print("eval with --policy agent needs --checkpoint", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return args.fn(args)
    except (ConfigError, ScenarioError, ReplayRefused, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
