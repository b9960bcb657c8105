"""Adam optimizer over named parameter tensors."""

from __future__ import annotations

import numpy as np

from .tensor import ShapeError, Tensor


class AdamState:
    """First/second-moment accumulators plus the shared step counter."""

    def __init__(self, params, lr=3e-4, beta1=0.9, beta2=0.999, epsilon=1e-8):
        self.params = list(params)
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.epsilon = epsilon
        self.step_count = 0
        self.m = [np.zeros_like(p.data) for p in self.params]
        self.v = [np.zeros_like(p.data) for p in self.params]


def adam_step(state, grads=None):
    """One bias-corrected Adam update, in place.

    ``grads`` defaults to each parameter's accumulated ``.grad`` (zeros when
    absent). Gradients are consumed: ``.grad`` is reset afterwards so the
    next step never sees stale accumulations.
    """
    if grads is None:
        grads = [p.grad if p.grad is not None else np.zeros_like(p.data)
                 for p in state.params]
    if len(grads) != len(state.params):
        raise ShapeError(
            f"adam_step got {len(grads)} grads for {len(state.params)} params")
    state.step_count += 1
    t = state.step_count
    b1, b2 = state.beta1, state.beta2
    c1 = 1.0 - b1 ** t
    c2 = 1.0 - b2 ** t
    for p, g, m, v in zip(state.params, grads, state.m, state.v):
        g = np.asarray(g, dtype=np.float64)
        if g.shape != p.data.shape:
            raise ShapeError(
                f"adam_step grad shape {g.shape} != param shape {p.data.shape}")
        m *= b1
        m += (1.0 - b1) * g
        v *= b2
        v += (1.0 - b2) * (g * g)
        p.data -= state.lr * (m / c1) / (np.sqrt(v / c2) + state.epsilon)
        p.grad = None


class Adam:
    """Thin object wrapper; keeps call sites close to the usual optimizer idiom."""

    def __init__(self, params, lr=3e-4, beta1=0.9, beta2=0.999, epsilon=1e-8):
        self.state = AdamState(params, lr=lr, beta1=beta1, beta2=beta2,
                               epsilon=epsilon)

    def step(self, grads=None):
        adam_step(self.state, grads)

    def zero_grad(self):
        for p in self.state.params:
            p.grad = None

    @property
    def step_count(self):
        return self.state.step_count

    def named_state(self, prefix, names):
        """Moment arrays as named tensors for checkpointing."""
        out = {}
        for name, m, v in zip(names, self.state.m, self.state.v):
            out[f"{prefix}/m/{name}"] = m
            out[f"{prefix}/v/{name}"] = v
        return out

    def load_named_state(self, prefix, names, tensors):
        for i, name in enumerate(names):
            self.state.m[i] = tensors[f"{prefix}/m/{name}"].copy()
            self.state.v[i] = tensors[f"{prefix}/v/{name}"].copy()
