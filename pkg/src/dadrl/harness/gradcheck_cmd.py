"""Gradient fidelity check over the full encoder + policy + critic composite.

Structure matches the training stack exactly (shared LSTM, attention,
norm/fusion, CNN context, squashed-Gaussian policy, twin critics); the
dimensions are reduced so central differences over every parameter finish in
seconds rather than hours.
"""

from __future__ import annotations

import numpy as np

from .. import numkit as nk
from ..encoder import EncoderConfig, StateEncoder
from ..observation import ObservationBundle, batch_observations
from ..rl import CriticPair, PolicyHead
from ..seeds import derive_rng

CHECK_ENCODER = dict(d=8, d_a=8, d_z=10, d_c=6, n=3, map_size=15,
                     conv_channels=(3, 4, 5))
CHECK_HIDDEN = (12,)
CHECK_BATCH = 2


def _random_obs(rng, cfg):
    # continuous stand-in maps keep conv pre-activations off ReLU kinks,
    # where central differences are undefined
    k = cfg.history_samples
    present = rng.random(cfg.n) < 0.7
    if not present.any():
        present[0] = True
    return ObservationBundle(
        hist=rng.standard_normal((cfg.n, k, 5)),
        mask=np.where(present, 0.0, -np.inf),
        e1=rng.standard_normal((k, 5)),
        e2=rng.standard_normal((k, 5)),
        maps=rng.random((2, cfg.map_size, cfg.map_size)),
    )


def build_composite(seed, variant="full"):
    """(named params, loss_fn) for one seeded composite instance.

    The loss sums critic values on a fresh policy action plus its log-prob,
    driving gradients through every module; the sampling noise is frozen so
    the loss is a deterministic smooth function of the parameters.
    """
    rng = derive_rng(seed, "gradcheck")
    cfg = EncoderConfig(variant=variant, **CHECK_ENCODER)
    encoder = StateEncoder(cfg, rng)
    policy = PolicyHead(encoder.out_dim, CHECK_HIDDEN, 2, rng)
    critics = CriticPair(encoder.out_dim, CHECK_HIDDEN, 2, rng)
    params = {**encoder.named_params(), **policy.named_params(),
              **critics.named_params()}
    # check at a generic point: zero-initialized biases would pin ReLU
    # pre-activations exactly on their kinks
    for t in params.values():
        t.data = t.data + rng.uniform(-0.05, 0.05, size=t.data.shape)
    batch = batch_observations([_random_obs(rng, cfg) for _ in range(CHECK_BATCH)])
    eps = rng.standard_normal((CHECK_BATCH, 2))

    def loss_fn():
        s = encoder.encode_batch(batch)
        action, logp = policy.sample(s, eps=eps)
        q1, q2 = critics.q_values(s, action)
        return nk.add(nk.add(nk.mean_(q1), nk.mean_(q2)), nk.mean_(logp))

    return params, loss_fn


def run_gradcheck(seeds=5, tolerance=1e-4, h=1e-6, base_seed=0, variant="full",
                  echo=print):
    """One grad_check per seed; returns (reports, all_passed)."""
    reports = []
    ok = True
    for i in range(seeds):
        params, loss_fn = build_composite(base_seed + i, variant=variant)
        report = nk.grad_check(params, loss_fn, tolerance=tolerance, h=h)
        reports.append(report)
        ok = ok and report.passed
        if echo:
            echo(f"seed {base_seed + i}: "
                 f"{'PASS' if report.passed else 'FAIL'} "
                 f"max_rel_err={report.max_rel_err:.3e}")
            if not report.passed:
                for line in report.lines():
                    echo("  " + line)
    return reports, ok
