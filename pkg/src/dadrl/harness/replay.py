"""Trajectory logs (JSONL) and bitwise replay verification."""

from __future__ import annotations

import json
from dataclasses import dataclass

from .. import __version__
from ..sim import EgoCommand, LaneCommand, SimConfig, TrafficSim, load_scenario

FORMAT = 1


class ReplayRefused(RuntimeError):
    """Log version does not match this artifact version."""


class TrajectoryLogger:
    def __init__(self, path, scenario_name, seed):
        self.fh = open(path, "w")
        self._emit({"type": "header", "format": FORMAT, "version": __version__,
                    "scenario": scenario_name, "seed": int(seed)})

    def _emit(self, record):
        self.fh.write(json.dumps(record) + "\n")

    def log_state(self, step, records):
        for vid, x, y, heading, speed in records:
            self._emit({"type": "state", "step": step, "id": int(vid),
                        "x": x, "y": y, "heading": heading, "speed": speed})

    def log_step(self, step, command, records, events=None):
        self._emit({"type": "cmd", "step": step,
                    "target_speed": command.target_speed,
                    "lane": command.lane.value})
        self.log_state(step, records)
        if events is not None:
            self._emit({"type": "events", "step": step,
                        "crash": events.crash, "offroad": events.offroad,
                        "offroute": events.offroute,
                        "wrong_way": events.wrong_way,
                        "reached_goal": events.reached_goal,
                        "stagnant": events.stagnant,
                        "progress_delta": events.progress_delta})

    def close(self):
        self.fh.close()


def record_rollout(scenario_spec, seed, commands, path, sim_config=None):
    """Run a command sequence and log every step (stops early at terminal)."""
    scenario = load_scenario(scenario_spec)
    sim = TrafficSim(scenario, sim_config or SimConfig())
    sim.reset(seed)
    logger = TrajectoryLogger(path, scenario_spec, seed)
    logger.log_state(step=0, records=sim.state_records())
    for step, command in enumerate(commands, start=1):
        _, events = sim.step(command)
        logger.log_step(step, command, sim.state_records(), events)
        if sim.done:
            break
    logger.close()
    return sim.outcome


@dataclass
class ReplayReport:
    steps_checked: int
    first_divergence: int = None   # step index, None when clean
    detail: str = ""

    @property
    def clean(self):
        return self.first_divergence is None


def _load_log(path):
    header = None
    steps = {}
    with open(path) as fh:
        for line in fh:
            rec = json.loads(line)
            if rec["type"] == "header":
                header = rec
            else:
                entry = steps.setdefault(rec["step"], {"states": []})
                if rec["type"] == "cmd":
                    entry["cmd"] = rec
                elif rec["type"] == "state":
                    entry["states"].append(rec)
                elif rec["type"] == "events":
                    entry["events"] = rec
    if header is None:
        raise ReplayRefused(f"{path}: missing header record")
    return header, steps


def replay_log(path, sim_config=None):
    """Re-simulate a log; report the first step whose states diverge.

    State floats round-trip exactly through JSON, so comparison is bitwise.
    Logged events are re-checked as well.
    """
    header, steps = _load_log(path)
    if header["format"] != FORMAT or header["version"] != __version__:
        raise ReplayRefused(
            f"log from format={header['format']} version={header['version']}, "
            f"this artifact is format={FORMAT} version={__version__}")
    scenario = load_scenario(header["scenario"])
    sim = TrafficSim(scenario, sim_config or SimConfig())
    sim.reset(header["seed"])

    def mismatch(step, logged_states):
        actual = {vid: (x, y, h, v) for vid, x, y, h, v in sim.state_records()}
        logged = {r["id"]: (r["x"], r["y"], r["heading"], r["speed"])
                  for r in logged_states}
        if actual != logged:
            return f"step {step}: vehicle states differ"
        return None

    detail = mismatch(0, steps.get(0, {}).get("states", []))
    if detail:
        return ReplayReport(steps_checked=0, first_divergence=0, detail=detail)

    checked = 0
    for step in sorted(k for k in steps if k > 0):
        entry = steps[step]
        cmd = entry.get("cmd")
        if cmd is None:
            break
        command = EgoCommand(cmd["target_speed"], LaneCommand(cmd["lane"]))
        _, events = sim.step(command)
        checked = step
        detail = mismatch(step, entry["states"])
        if detail is None and "events" in entry:
            logged_ev = entry["events"]
            actual_ev = {"crash": events.crash, "offroad": events.offroad,
                         "offroute": events.offroute,
                         "wrong_way": events.wrong_way,
                         "reached_goal": events.reached_goal,
                         "stagnant": events.stagnant,
                         "progress_delta": events.progress_delta}
            for key, value in actual_ev.items():
                if logged_ev[key] != value:
                    detail = f"step {step}: event {key!r} differs"
                    break
        if detail:
            return ReplayReport(steps_checked=checked, first_divergence=step,
                                detail=detail)
        if sim.done:
            break
    return ReplayReport(steps_checked=checked)
