"""Construction helpers shared by the CLI commands."""

from __future__ import annotations

import numpy as np

from ..encoder import StateEncoder
from ..rl import SACAgent
from ..seeds import derive_rng
from ..sim import TrafficSim, load_scenario


def build_encoder(config, seed=None):
    seed = config.run.seed if seed is None else seed
    return StateEncoder(config.encoder, derive_rng(seed, "init", config.run.variant))


def build_agent(config, encoder=None, seed=None):
    seed = config.run.seed if seed is None else seed
    encoder = encoder or build_encoder(config, seed)
    return SACAgent(encoder, config.rl, seed=seed)


def build_sim(config, scenario=None):
    scenario = scenario or load_scenario(config.run.scenario)
    return TrafficSim(scenario, config.sim)


def random_raw_actions(rng, n):
    """Uniform raw actions strictly inside (-1,1)^2 (warmup / baseline policy)."""
    return np.clip(rng.uniform(-1.0, 1.0, size=(n, 2)), -1.0 + 1e-9, 1.0 - 1e-9)
