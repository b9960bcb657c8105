"""Policy and critic networks over the state encoding."""

from __future__ import annotations

import math

import numpy as np

from .. import numkit as nk

LOG_STD_MIN = -20.0
LOG_STD_MAX = 2.0
# tanh rounds to exactly +/-1 in float64 for |u| > ~19; keep stored raw
# actions strictly inside the open interval
ACTION_CLIP = 1.0 - 1e-9


class MLP:
    """Fully connected ReLU stack with named parameters."""

    def __init__(self, name, sizes, rng, final_activation=None):
        self.name = name
        self.final_activation = final_activation
        self.layers = []
        self.tensors = {}
        for i, (d_in, d_out) in enumerate(zip(sizes, sizes[1:])):
            w = nk.parameter((d_in, d_out), rng=rng)
            b = nk.parameter(np.zeros(d_out))
            self.tensors[f"{name}/l{i}/w"] = w
            self.tensors[f"{name}/l{i}/b"] = b
            self.layers.append((w, b))

    def forward(self, x, frozen=False):
        """``frozen`` evaluates through constant views of the weights so the
        backward pass stops at the inputs (critics inside the policy loss).
        """
        h = x
        last = len(self.layers) - 1
        for i, (w, b) in enumerate(self.layers):
            if frozen:
                w, b = nk.constant(w.data), nk.constant(b.data)
            h = nk.add(nk.matmul(h, w), b)
            if i < last:
                h = nk.relu(h)
            elif self.final_activation is not None:
                h = self.final_activation(h)
        return h

    def forward_np(self, x, arrays=None):
        """Plain numpy forward, optionally through an external weight dict
        (used for target networks)."""
        h = np.asarray(x)
        last = len(self.layers) - 1
        for i in range(len(self.layers)):
            if arrays is None:
                w = self.tensors[f"{self.name}/l{i}/w"].data
                b = self.tensors[f"{self.name}/l{i}/b"].data
            else:
                w = arrays[f"{self.name}/l{i}/w"]
                b = arrays[f"{self.name}/l{i}/b"]
            h = h @ w + b
            if i < last:
                h = np.maximum(h, 0.0)
        return h

    def named_params(self):
        return dict(self.tensors)


class PolicyHead:
    """MLP to (mean, log-std) of a 2-d Gaussian, tanh-squashed on sampling."""

    def __init__(self, state_dim, hidden, action_dim, rng, name="pi"):
        self.name = name
        self.action_dim = action_dim
        sizes = [state_dim] + list(hidden)
        self.trunk = MLP(f"{name}/trunk", sizes, rng)
        h_dim = sizes[-1]
        self.mean_w = nk.parameter((h_dim, action_dim), rng=rng, scale=1e-2)
        self.mean_b = nk.parameter(np.zeros(action_dim))
        self.std_w = nk.parameter((h_dim, action_dim), rng=rng, scale=1e-2)
        self.std_b = nk.parameter(np.zeros(action_dim))
        self.tensors = {**self.trunk.named_params(),
                        f"{name}/mean/w": self.mean_w,
                        f"{name}/mean/b": self.mean_b,
                        f"{name}/log_std/w": self.std_w,
                        f"{name}/log_std/b": self.std_b}

    def forward(self, s):
        h = nk.relu(self.trunk.forward(s))
        mean = nk.add(nk.matmul(h, self.mean_w), self.mean_b)
        log_std = nk.clamp(nk.add(nk.matmul(h, self.std_w), self.std_b),
                           LOG_STD_MIN, LOG_STD_MAX)
        return mean, log_std

    def sample(self, s, eps=None, deterministic=False):
        """Tanh-squashed action and its log-prob (reparameterized).

        ``eps`` is the frozen standard-normal draw (B, action_dim); it must
        be supplied in stochastic mode so gradient checks can hold it fixed.
        Deterministic mode returns tanh(mean) and no log-prob.
        """
        mean, log_std = self.forward(s)
        if deterministic:
            return nk.tanh(mean), None
        eps_c = nk.constant(eps)
        u = nk.add(mean, nk.mul(nk.exp(log_std), eps_c))
        action = nk.tanh(u)
        # log N(u | mean, std) with (u - mean)/std == eps held constant
        gauss = nk.add(nk.neg(log_std),
                       nk.constant(-0.5 * eps * eps - 0.5 * math.log(2 * math.pi)))
        # log(1 - tanh(u)^2) = 2 (log 2 - u - softplus(-2u)), overflow-free
        corr = nk.mul(nk.constant(2.0),
                      nk.sub(nk.constant(math.log(2.0)),
                             nk.add(u, nk.softplus(nk.mul(nk.constant(-2.0), u)))))
        logp = nk.sub(nk.sum_(gauss, axis=1), nk.sum_(corr, axis=1))
        return action, logp

    def act_np(self, s_np, rng=None, deterministic=False):
        """Numpy-only sampling for rollouts; raw output clipped strictly
        inside (-1,1)."""
        s = nk.constant(np.atleast_2d(s_np))
        if deterministic:
            a, _ = self.sample(s, deterministic=True)
        else:
            eps = rng.standard_normal((s.shape[0], self.action_dim))
            a, _ = self.sample(s, eps=eps)
        return np.clip(a.data, -ACTION_CLIP, ACTION_CLIP)

    def named_params(self):
        return dict(self.tensors)


class CriticPair:
    """Two independent Q MLPs plus matching soft-updated target copies."""

    def __init__(self, state_dim, hidden, action_dim, rng, name="q"):
        sizes = [state_dim + action_dim] + list(hidden) + [1]
        self.q1 = MLP(f"{name}1", sizes, rng)
        self.q2 = MLP(f"{name}2", sizes, rng)
        self.tensors = {**self.q1.named_params(), **self.q2.named_params()}
        self.target = {k: v.data.copy() for k, v in self.tensors.items()}

    def q_values(self, s, a, frozen=False):
        x = nk.concat([s, a], axis=1)
        bsz = x.shape[0]
        v1 = nk.reshape(self.q1.forward(x, frozen=frozen), (bsz,))
        v2 = nk.reshape(self.q2.forward(x, frozen=frozen), (bsz,))
        return v1, v2

    def target_min_q(self, s_np, a_np):
        x = np.concatenate([s_np, a_np], axis=1)
        v1 = self.q1.forward_np(x, arrays=self.target).reshape(-1)
        v2 = self.q2.forward_np(x, arrays=self.target).reshape(-1)
        return np.minimum(v1, v2)

    def soft_update(self, tau):
        """target <- tau * online + (1 - tau) * target, the literal form."""
        for name, online in self.tensors.items():
            self.target[name] = tau * online.data + (1.0 - tau) * self.target[name]

    def named_params(self):
        return dict(self.tensors)

    def named_target(self, prefix="target/"):
        return {prefix + k: v for k, v in self.target.items()}
