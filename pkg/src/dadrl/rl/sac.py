"""Soft Actor-Critic learner: twin critics, squashed-Gaussian policy,
entropy temperature tuning, and gradients through the observation encoder.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .. import numkit as nk
from ..encoder import StateEncoder
from ..observation import batch_observations
from ..seeds import derive_rng
from .networks import ACTION_CLIP, CriticPair, PolicyHead


@dataclass
class SACConfig:
    gamma: float = 0.99
    tau: float = 0.005
    lr: float = 3e-4
    batch_size: int = 256
    buffer_capacity: int = 200_000
    warmup: int = 5_000
    update_every: int = 16
    updates_per_round: int = 1
    hidden: tuple = (256, 256)
    init_alpha: float = 0.2
    target_entropy: float = -2.0  # -dim(action)
    action_dim: int = 2


class SACAgent:
    def __init__(self, encoder: StateEncoder, cfg: SACConfig, seed=0):
        self.encoder = encoder
        self.cfg = cfg
        rng = derive_rng(seed, "nets")
        self.policy = PolicyHead(encoder.out_dim, cfg.hidden, cfg.action_dim, rng)
        self.critics = CriticPair(encoder.out_dim, cfg.hidden, cfg.action_dim, rng)
        self.log_alpha = nk.parameter(np.array(math.log(cfg.init_alpha)))
        self.update_rng = derive_rng(seed, "update")
        self.updates_done = 0

        self._enc_names = sorted(encoder.named_params())
        self._pi_names = sorted(self.policy.named_params())
        self._q_names = sorted(self.critics.named_params())
        enc = encoder.named_params()
        pi = self.policy.named_params()
        qs = self.critics.named_params()
        self.enc_opt = nk.Adam([enc[n] for n in self._enc_names], lr=cfg.lr)
        self.pi_opt = nk.Adam([pi[n] for n in self._pi_names], lr=cfg.lr)
        self.q_opt = nk.Adam([qs[n] for n in self._q_names], lr=cfg.lr)
        self.alpha_opt = nk.Adam([self.log_alpha], lr=cfg.lr)

    @property
    def alpha(self):
        return float(np.exp(self.log_alpha.data))

    # ------------------------------------------------------------------ acting

    def act(self, observations, rng=None, deterministic=False):
        """Raw (-1,1)^2 actions for a list of observations (no gradients)."""
        batch = batch_observations(observations)
        s = self.encoder.encode_batch(batch)
        return self.policy.act_np(s.data, rng=rng, deterministic=deterministic)

    # ---------------------------------------------------------------- updating

    def update(self, batch):
        """One SAC step on (obs, actions, next_obs, rewards, dones).

        The critic target bootstraps through the target critics and a fresh
        next action; both critic and policy losses backpropagate into the
        encoder; the policy loss sees the critics through frozen views so
        critic weights only follow the Bellman loss. The temperature follows
        the standard alpha loss, differentiated analytically.
        """
        obs, actions, next_obs, rewards, dones = batch
        if len(rewards) < 1:
            raise nk.ContractViolation("sac update needs a non-empty batch")
        cfg = self.cfg
        alpha = self.alpha

        # bootstrap target (no tape anywhere in this block)
        s_next = self.encoder.encode_batch(next_obs)
        eps_next = self.update_rng.standard_normal((len(rewards), cfg.action_dim))
        a_next, logp_next = self.policy.sample(s_next, eps=eps_next)
        q_next = self.critics.target_min_q(s_next.data, a_next.data)
        y = rewards + cfg.gamma * (1.0 - dones) * (q_next - alpha * logp_next.data)

        eps_new = self.update_rng.standard_normal((len(rewards), cfg.action_dim))
        with nk.Tape() as tape:
            s = self.encoder.encode_batch(obs)
            q1, q2 = self.critics.q_values(s, nk.constant(actions))
            y_c = nk.constant(y)
            critic_loss = nk.add(nk.mean_(nk.square(nk.sub(q1, y_c))),
                                 nk.mean_(nk.square(nk.sub(q2, y_c))))
            a_new, logp = self.policy.sample(s, eps=eps_new)
            q1f, q2f = self.critics.q_values(s, a_new, frozen=True)
            q_min = nk.minimum(q1f, q2f)
            policy_loss = nk.mean_(nk.sub(nk.mul(nk.constant(alpha), logp), q_min))
            total = nk.add(critic_loss, policy_loss)
        nk.backward(tape, total)

        self.q_opt.step()
        self.pi_opt.step()
        self.enc_opt.step()

        # d/d(log_alpha) of  -log_alpha * mean(logp + target_entropy)
        alpha_grad = -float(np.mean(logp.data + cfg.target_entropy))
        self.alpha_opt.step([np.array(alpha_grad)])

        self.critics.soft_update(cfg.tau)
        self.updates_done += 1
        return {
            "critic_loss": critic_loss.item(),
            "policy_loss": policy_loss.item(),
            "alpha": self.alpha,
            "entropy": -float(np.mean(logp.data)),
            "q_mean": float(np.mean(np.minimum(q1.data, q2.data))),
            "target_mean": float(np.mean(y)),
        }

    # ------------------------------------------------------------- persistence

    def named_tensors(self):
        out = {}
        out.update({n: self.encoder.named_params()[n].data for n in self._enc_names})
        out.update({n: self.policy.named_params()[n].data for n in self._pi_names})
        out.update({n: self.critics.named_params()[n].data for n in self._q_names})
        out.update(self.critics.named_target())
        out["alpha/log"] = self.log_alpha.data
        out.update(self.enc_opt.named_state("adam/enc", self._enc_names))
        out.update(self.pi_opt.named_state("adam/pi", self._pi_names))
        out.update(self.q_opt.named_state("adam/q", self._q_names))
        out.update(self.alpha_opt.named_state("adam/alpha", ["log_alpha"]))
        return out

    def save(self, path, sidecar_path=None, extra=None):
        nk.save_checkpoint(path, self.named_tensors())
        if sidecar_path is not None:
            sidecar = {
                "optimizer_step": self.updates_done,
                "adam_steps": {
                    "enc": self.enc_opt.step_count, "pi": self.pi_opt.step_count,
                    "q": self.q_opt.step_count, "alpha": self.alpha_opt.step_count,
                },
                "temperature": self.alpha,
                "rng": {"update": self.update_rng.bit_generator.state},
            }
            if extra:
                sidecar.update(extra)
            with open(sidecar_path, "w") as fh:
                json.dump(sidecar, fh, indent=1, default=str)

    def load(self, path, sidecar_path=None):
        arrays = nk.load_checkpoint(path)
        self.encoder.params.load_arrays(arrays)
        for name in self._pi_names:
            self._load_into(self.policy.named_params()[name], arrays, name)
        for name in self._q_names:
            self._load_into(self.critics.named_params()[name], arrays, name)
        for name in self._q_names:
            self.critics.target[name] = arrays["target/" + name].copy()
        self.log_alpha.data = arrays["alpha/log"].copy()
        if "adam/enc/m/" + self._enc_names[0] in arrays:
            self.enc_opt.load_named_state("adam/enc", self._enc_names, arrays)
            self.pi_opt.load_named_state("adam/pi", self._pi_names, arrays)
            self.q_opt.load_named_state("adam/q", self._q_names, arrays)
            self.alpha_opt.load_named_state("adam/alpha", ["log_alpha"], arrays)
        if sidecar_path is not None:
            with open(sidecar_path) as fh:
                sidecar = json.load(fh)
            self.updates_done = sidecar["optimizer_step"]
            steps = sidecar.get("adam_steps", {})
            self.enc_opt.state.step_count = steps.get("enc", self.updates_done)
            self.pi_opt.state.step_count = steps.get("pi", self.updates_done)
            self.q_opt.state.step_count = steps.get("q", self.updates_done)
            self.alpha_opt.state.step_count = steps.get("alpha", self.updates_done)
            state = sidecar["rng"]["update"]
            if isinstance(state, dict):
                self.update_rng.bit_generator.state = state

    @staticmethod
    def _load_into(tensor, arrays, name):
        src = arrays[name]
        if src.shape != tensor.data.shape:
            raise nk.ShapeError(
                f"checkpoint tensor {name} has shape {src.shape}, expected "
                f"{tensor.data.shape}")
        tensor.data = src.copy()
