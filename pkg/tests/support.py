"""Shared fixtures-by-hand for tests: tiny encoder configs and random observations."""

import numpy as np

from dadrl.encoder import EncoderConfig
from dadrl.observation import ObservationBundle


def tiny_config(**kw):
    defaults = dict(d=6, d_a=6, d_z=8, d_c=6, n=3, map_size=9,
                    conv_channels=(2, 3), history_samples=5)
    defaults.update(kw)
    return EncoderConfig(**defaults)


def random_obs(rng, cfg, present=None):
    n, k = cfg.n, cfg.history_samples
    if present is None:
        present = rng.random(n) < 0.7
    mask = np.where(present, 0.0, -np.inf)
    return ObservationBundle(
        hist=rng.standard_normal((n, k, 5)),
        mask=mask,
        e1=rng.standard_normal((k, 5)),
        e2=rng.standard_normal((k, 5)),
        maps=(rng.random((2, cfg.map_size, cfg.map_size)) < 0.5).astype(np.float64),
    )
