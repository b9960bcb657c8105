"""Full observation -> state encoding, with the ablation variants."""

from __future__ import annotations

import numpy as np

from .. import numkit as nk
from ..observation import ObservationBatch, ObservationBundle, batch_observations
from .context import encode_context
from .params import EncoderConfig, EncoderParams
from .stae import attend_ego, encode_temporal, fuse_state


class StateEncoder:
    """Owns the encoder parameters and assembles the final state encoding.

    Variants:
      full          s_t = Z_t (+) c_t
      context_free  s_t = Z_t
      context_only  s_t = ego_now (+) c_t   (attention never invoked)

    ``attention_calls`` counts attend_ego invocations for the ablation
    mechanics check.
    """

    def __init__(self, config: EncoderConfig, rng=None, params=None):
        self.config = config
        self.params = params if params is not None else EncoderParams(
            config, rng if rng is not None else np.random.default_rng(0))
        self.attention_calls = 0

    @property
    def out_dim(self):
        return self.config.state_dim

    def named_params(self):
        return self.params.named()

    def encode_batch(self, batch: ObservationBatch) -> nk.Tensor:
        """(B, out_dim) state encodings; differentiable end to end."""
        cfg = self.config
        bsz = len(batch)
        ego_now = np.concatenate([batch.e1[:, 0, :], batch.e2[:, 0, :]], axis=1)

        if cfg.variant == "context_only":
            c_t = encode_context(self.params, batch.maps)
            return nk.concat([nk.constant(ego_now), c_t], axis=1)

        n = batch.hist.shape[1]
        stacked = np.concatenate([batch.e1[:, None, :, :], batch.hist], axis=1)
        flat_seq = stacked.reshape(bsz * (n + 1), cfg.history_samples, -1)
        p_all = nk.reshape(encode_temporal(self.params, flat_seq),
                           (bsz, n + 1, cfg.d))
        p_ego = nk.reshape(p_all[:, 0, :], (bsz, cfg.d))
        p_sv = p_all[:, 1:, :]
        self.attention_calls += 1
        alpha, _ = attend_ego(self.params, p_ego, p_sv, batch.mask)
        z_t = fuse_state(self.params, alpha, p_ego, ego_now)

        if cfg.variant == "context_free":
            return z_t
        c_t = encode_context(self.params, batch.maps)
        return nk.concat([z_t, c_t], axis=1)

    def encode(self, obs: ObservationBundle) -> nk.Tensor:
        """Single-observation encoding, shape (out_dim,)."""
        s = self.encode_batch(batch_observations([obs]))
        return nk.reshape(s, (self.out_dim,))
