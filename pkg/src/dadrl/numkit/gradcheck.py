"""Autodiff-vs-central-differences validation harness."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .tensor import Tape, backward


@dataclass
class GradCheckEntry:
    name: str
    max_rel_err: float
    checked: int


@dataclass
class GradCheckReport:
    tolerance: float
    entries: list[GradCheckEntry] = field(default_factory=list)

    @property
    def max_rel_err(self):
        return max((e.max_rel_err for e in self.entries), default=0.0)

    @property
    def passed(self):
        return self.max_rel_err < self.tolerance

    def lines(self):
        out = [f"{'PASS' if self.passed else 'FAIL'} "
               f"max_rel_err={self.max_rel_err:.3e} tol={self.tolerance:.1e}"]
        for e in self.entries:
            out.append(f"  {e.name:40s} {e.max_rel_err:.3e} ({e.checked} elems)")
        return out


def grad_check(params, loss_fn, tolerance=1e-4, h=1e-6, magnitude_floor=1e-4,
               max_elements_per_param=None, rng=None):
    """Compare tape gradients with central differences for every parameter.

    ``params`` maps names to requires_grad tensors that ``loss_fn`` closes
    over; ``loss_fn()`` must rebuild the scalar loss from current parameter
    values (any sampling noise inside must be frozen by the caller).

    The per-element error is |ad - fd| / max(|ad|, |fd|, magnitude_floor).
    The floor keeps float64 rounding of the loss (absolute noise around
    eps * |loss| / 2h, about 1e-10 for O(1) losses at h=1e-6) from
    registering as relative error on near-zero gradients; it assumes O(1)
    loss magnitudes.
    """
    for p in params.values():
        p.grad = None
    with Tape() as tape:
        loss = loss_fn()
    backward(tape, loss)
    analytic = {name: (p.grad if p.grad is not None else np.zeros_like(p.data))
                for name, p in params.items()}

    report = GradCheckReport(tolerance=tolerance)
    for name, p in params.items():
        flat = p.data.reshape(-1)
        aflat = analytic[name].reshape(-1)
        idx = np.arange(flat.size)
        if max_elements_per_param is not None and flat.size > max_elements_per_param:
            gen = rng if rng is not None else np.random.default_rng(0)
            idx = gen.choice(flat.size, size=max_elements_per_param, replace=False)
            idx.sort()
        worst = 0.0
        for i in idx:
            orig = flat[i]
            flat[i] = orig + h
            fp = loss_fn().item()
            flat[i] = orig - h
            fm = loss_fn().item()
            flat[i] = orig
            fd = (fp - fm) / (2.0 * h)
            ad = aflat[i]
            denom = max(abs(ad), abs(fd), magnitude_floor)
            worst = max(worst, abs(ad - fd) / denom)
        report.entries.append(GradCheckEntry(name=name, max_rel_err=worst,
                                             checked=len(idx)))
    return report
