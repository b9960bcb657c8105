"""Run configuration: JSON files with sim / encoder / rl / run sections."""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from pathlib import Path

from ..encoder import EncoderConfig
from ..rl import RewardConfig, SACConfig
from ..sim import ControlConfig, IDMParams, SimConfig


class ConfigError(ValueError):
    pass


@dataclass
class RunSection:
    scenario: str = "straight"
    seed: int = 0
    workers: int = 4
    total_steps: int = 200_000
    eval_episodes: int = 50
    out_dir: str = "runs/out"
    checkpoint_every: int = 25_000
    log_updates_every: int = 25
    early_stop_success: float = 0.95   # rolling train success that stops training
    early_stop_window: int = 20        # episodes in the rolling window
    eval_every: int = 0                # validation cadence in env steps; 0 disables
    eval_episodes_val: int = 20        # episodes per validation pass
    variant: str = "full"

    def __post_init__(self):
        if self.eval_episodes < 1:
            raise ConfigError("eval_episodes must be >= 1")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if self.total_steps < 1:
            raise ConfigError("total_steps must be >= 1")


@dataclass
class AppConfig:
    sim: SimConfig = field(default_factory=SimConfig)
    encoder: EncoderConfig = field(default_factory=EncoderConfig)
    rl: SACConfig = field(default_factory=SACConfig)
    reward: RewardConfig = field(default_factory=RewardConfig)
    run: RunSection = field(default_factory=RunSection)

    def __post_init__(self):
        # the sim serves observations shaped for the encoder
        self.sim.n_slots = self.encoder.n
        self.sim.map_size = self.encoder.map_size
        self.sim.resolution = self.encoder.resolution
        self.sim.sensor_range = self.encoder.sensor_range
        self.sim.history_samples = self.encoder.history_samples
        self.sim.history_stride = self.encoder.history_stride
        self.encoder.variant = self.run.variant


def _build(cls, raw, where):
    if not isinstance(raw, dict):
        raise ConfigError(f"section {where!r} must be an object")
    names = {f.name for f in dataclasses.fields(cls)}
    unknown = set(raw) - names
    if unknown:
        raise ConfigError(f"unknown key(s) in {where!r}: {sorted(unknown)}")
    coerced = {}
    for f in dataclasses.fields(cls):
        if f.name not in raw:
            continue
        value = raw[f.name]
        if f.name in ("hidden", "conv_channels", "speed_range") and isinstance(value, list):
            value = tuple(value)
        coerced[f.name] = value
    try:
        return cls(**coerced)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad section {where!r}: {exc}") from exc


def config_from_dict(raw):
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a JSON object")
    unknown = set(raw) - {"sim", "encoder", "rl", "reward", "run"}
    if unknown:
        raise ConfigError(f"unknown top-level section(s): {sorted(unknown)}")
    sim_raw = dict(raw.get("sim", {}))
    idm = _build(IDMParams, sim_raw.pop("idm", {}), "sim.idm")
    control = _build(ControlConfig, sim_raw.pop("control", {}), "sim.control")
    sim = _build(SimConfig, sim_raw, "sim")
    sim.idm = idm
    sim.control = control
    try:
        return AppConfig(
            sim=sim,
            encoder=_build(EncoderConfig, raw.get("encoder", {}), "encoder"),
            rl=_build(SACConfig, raw.get("rl", {}), "rl"),
            reward=_build(RewardConfig, raw.get("reward", {}), "reward"),
            run=_build(RunSection, raw.get("run", {}), "run"),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path):
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"config file {path} not found")
    try:
        raw = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    return config_from_dict(raw)
