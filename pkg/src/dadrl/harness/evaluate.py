"""Deterministic evaluation over seeded episodes with the metric suite."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from ..rl import compute_reward, map_action
from ..seeds import derive_rng, derive_seed
from ..sim import TrafficSim, load_scenario
from ..sim.geometry import project_point
from .builders import random_raw_actions
from .metrics import EpisodeRecord, summarize, write_metrics_csv, write_summary_json


def run_episode(sim, policy_fn, reward_cfg, v_max, seed, trajectory=None):
    """Roll one episode; returns (record fields, transitions not collected).

    ``policy_fn(obs) -> raw action`` decides; the simulator and the reward
    function do the rest. ``trajectory`` optionally logs every step.
    """
    obs = sim.reset(seed)
    scen = sim.scenario
    s_goal, _, _ = project_point(scen.progress_points, scen.progress_cum,
                                 np.asarray(scen.goal_center))
    s_start = sim.progress_s
    denom = max(s_goal - s_start, 1e-9)

    total_reward = 0.0
    jerk_sum = 0.0
    angacc_sum = 0.0
    violated = False
    steps = 0
    if trajectory is not None:
        trajectory.log_state(step=0, records=sim.state_records())
    while not sim.done:
        raw = policy_fn(obs)
        command = map_action(raw, v_max)
        obs, events = sim.step(command)
        steps += 1
        total_reward += compute_reward(events, sim.ego, reward_cfg)
        jerk_sum += abs(sim.last_jerk)
        angacc_sum += abs(sim.last_yaw_acc)
        violated = violated or events.offroute or events.wrong_way or events.offroad
        if trajectory is not None:
            trajectory.log_step(step=steps, command=command,
                                records=sim.state_records(), events=events)
    progress_frac = (sim.progress_s - s_start) / denom
    return {
        "outcome": sim.outcome,
        "steps": steps,
        "progress_frac": float(progress_frac),
        "mean_abs_jerk": jerk_sum / max(steps, 1),
        "mean_abs_angacc": angacc_sum / max(steps, 1),
        "violated": violated,
        "ret": total_reward,
    }


def evaluate(config, agent=None, scenario=None, episodes=None, root_seed=None,
             policy="agent", out_dir=None, label=None, seed_tag="eval"):
    """Run the seeded evaluation suite; optionally write metrics CSV + summary.

    policy="agent" uses the deterministic squashed mean; policy="random"
    draws uniform raw actions (the no-training baseline). ``seed_tag``
    selects the seed family; validation during training uses "val" so its
    episodes stay disjoint from the held-out "eval" set.
    """
    scenario = scenario or load_scenario(config.run.scenario)
    episodes = episodes or config.run.eval_episodes
    root_seed = config.run.seed if root_seed is None else root_seed
    sim = TrafficSim(scenario, config.sim)

    records = []
    for i in range(episodes):
        seed = derive_seed(root_seed, seed_tag, i)
        if policy == "agent":
            policy_fn = lambda obs: agent.act([obs], deterministic=True)[0]
        else:
            rng = derive_rng(root_seed, seed_tag + "-random", i)
            policy_fn = lambda obs: random_raw_actions(rng, 1)[0]
        fields = run_episode(sim, policy_fn, config.reward,
                             config.reward.v_max, seed)
        records.append(EpisodeRecord(episode=i, seed=seed, **fields))

    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        stem = label or f"{scenario.name}__{config.run.variant}"
        write_metrics_csv(out / f"{stem}__metrics.csv", records)
        summary = write_summary_json(out / f"{stem}__summary.json", records)
    else:
        summary = summarize(records)
        summary["episodes"] = len(records)
    return records, summary
