"""Dense float64 tensors with tape-based reverse-mode automatic differentiation.

Ops compute eagerly with numpy. While a Tape is active (used as a context
manager) every op whose inputs require gradients records a backward rule;
``backward(tape, loss)`` then sweeps the tape once in reverse, accumulating
gradients into ``Tensor.grad``. Without an active tape the same ops run as
plain forward numerics, which is how no-gradient evaluation (e.g. target
networks) is done.
"""

from __future__ import annotations

import os

import numpy as np


class ShapeError(ValueError):
    """Operand shapes violate an op's contract."""


class AllMaskedError(ValueError):
    """masked_softmax received a row with no present entry."""


class ContractViolation(RuntimeError):
    """A documented precondition was broken by the caller."""


_CHECK_FINITE = bool(int(os.environ.get("DADRL_CHECK_FINITE", "0")))


def set_finite_checks(enabled):
    """Toggle per-op finiteness assertions (debug aid, off by default)."""
    global _CHECK_FINITE
    _CHECK_FINITE = bool(enabled)


class Tensor:
    """A dense float64 array plus gradient bookkeeping."""

    __slots__ = ("data", "requires_grad", "grad")

    def __init__(self, data, requires_grad=False):
        self.data = np.asarray(data, dtype=np.float64)
        self.requires_grad = bool(requires_grad)
        self.grad = None

    @property
    def shape(self):
        return self.data.shape

    @property
    def size(self):
        return self.data.size

    def item(self):
        return float(self.data.reshape(()))

    def zero_grad(self):
        self.grad = None

    def __repr__(self):
        return f"Tensor(shape={self.data.shape}, requires_grad={self.requires_grad})"

    # operator sugar; all arithmetic goes through the recorded ops below
    def __add__(self, other):
        return add(self, _as_tensor(other))

    def __radd__(self, other):
        return add(_as_tensor(other), self)

    def __sub__(self, other):
        return sub(self, _as_tensor(other))

    def __rsub__(self, other):
        return sub(_as_tensor(other), self)

    def __mul__(self, other):
        return mul(self, _as_tensor(other))

    def __rmul__(self, other):
        return mul(_as_tensor(other), self)

    def __truediv__(self, other):
        return div(self, _as_tensor(other))

    def __neg__(self):
        return neg(self)

    def __matmul__(self, other):
        return matmul(self, other)

    def __getitem__(self, idx):
        return getitem(self, idx)

    def sum(self, axis=None, keepdims=False):
        return sum_(self, axis=axis, keepdims=keepdims)

    def mean(self, axis=None, keepdims=False):
        return mean_(self, axis=axis, keepdims=keepdims)

    def reshape(self, *shape):
        return reshape(self, shape)


def parameter(data, rng=None, scale=None):
    """Trainable tensor; with ``rng`` draws uniform(-scale, scale) of shape ``data``."""
    if rng is not None:
        shape = tuple(data)
        if scale is None:
            fan_in = shape[0] if len(shape) > 1 else max(shape[0], 1)
            scale = 1.0 / np.sqrt(fan_in)
        return Tensor(rng.uniform(-scale, scale, size=shape), requires_grad=True)
    return Tensor(data, requires_grad=True)


def constant(data):
    return Tensor(data, requires_grad=False)


def _as_tensor(x):
    return x if isinstance(x, Tensor) else Tensor(x)


class Tape:
    """Ordered record of ops in execution order (hence topologically sorted)."""

    def __init__(self):
        self.entries = []  # (out Tensor, inputs tuple, backward fn)
        self._produced = set()

    def __enter__(self):
        _tape_stack.append(self)
        return self

    def __exit__(self, exc_type, exc, tb):
        popped = _tape_stack.pop()
        assert popped is self
        return False

    def record(self, out, inputs, backward_fn):
        self.entries.append((out, inputs, backward_fn))
        self._produced.add(id(out))

    def is_leaf(self, t):
        return id(t) not in self._produced


_tape_stack: list[Tape] = []


def active_tape():
    return _tape_stack[-1] if _tape_stack else None


def _emit(out_data, inputs, backward_fn):
    """Create the output tensor and record it on the active tape if needed."""
    if _CHECK_FINITE and not np.all(np.isfinite(out_data)):
        raise FloatingPointError("non-finite value produced in forward pass")
    requires = any(t.requires_grad for t in inputs)
    out = Tensor(out_data, requires_grad=requires)
    tape = active_tape()
    if tape is not None and requires:
        tape.record(out, tuple(inputs), backward_fn)
    return out


def _unbroadcast(grad, shape):
    """Sum grad down to ``shape`` after numpy broadcasting."""
    if grad.shape == shape:
        return grad
    extra = grad.ndim - len(shape)
    if extra:
        grad = grad.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, d in enumerate(shape) if d == 1 and grad.shape[i] != 1)
    if axes:
        grad = grad.sum(axis=axes, keepdims=True)
    return grad


def backward(tape, loss):
    """Reverse sweep over ``tape`` seeding d(loss)/d(loss) = 1.

    Gradients accumulate (sum) across fan-out. Returns a dict mapping every
    requires_grad leaf tensor seen on the tape to its gradient (zeros when
    the leaf is not on a path to the loss); the same arrays are also added
    into each leaf's ``.grad``.
    """
    if loss.data.size != 1:
        raise ContractViolation(
            f"backward needs a scalar loss, got shape {loss.data.shape}")
    grad_map = {id(loss): np.ones_like(loss.data)}
    leaves = {}
    if loss.requires_grad and tape.is_leaf(loss):
        leaves[id(loss)] = loss
    for out, inputs, backward_fn in reversed(tape.entries):
        g = grad_map.pop(id(out), None)
        for t in inputs:
            if t.requires_grad and tape.is_leaf(t) and id(t) not in leaves:
                leaves[id(t)] = t
        if g is None:
            continue
        for t, gi in zip(inputs, backward_fn(g)):
            if gi is None or not t.requires_grad:
                continue
            acc = grad_map.get(id(t))
            grad_map[id(t)] = gi if acc is None else acc + gi
    result = {}
    for tid, t in leaves.items():
        g = grad_map.get(tid)
        if g is None:
            g = np.zeros_like(t.data)
        else:
            g = np.broadcast_to(g, t.data.shape).astype(np.float64, copy=True) \
                if g.shape != t.data.shape else g
        t.grad = g if t.grad is None else t.grad + g
        result[t] = g
    return result


# ---------------------------------------------------------------------------
# primitive ops


def add(a, b):
    a, b = _as_tensor(a), _as_tensor(b)
    sa, sb = a.data.shape, b.data.shape
    return _emit(a.data + b.data, (a, b),
                 lambda g: (_unbroadcast(g, sa), _unbroadcast(g, sb)))


def sub(a, b):
    a, b = _as_tensor(a), _as_tensor(b)
    sa, sb = a.data.shape, b.data.shape
    return _emit(a.data - b.data, (a, b),
                 lambda g: (_unbroadcast(g, sa), _unbroadcast(-g, sb)))


def neg(a):
    return _emit(-a.data, (a,), lambda g: (-g,))


def mul(a, b):
    a, b = _as_tensor(a), _as_tensor(b)
    da, db = a.data, b.data
    return _emit(da * db, (a, b),
                 lambda g: (_unbroadcast(g * db, da.shape),
                            _unbroadcast(g * da, db.shape)))


def div(a, b):
    a, b = _as_tensor(a), _as_tensor(b)
    da, db = a.data, b.data
    return _emit(da / db, (a, b),
                 lambda g: (_unbroadcast(g / db, da.shape),
                            _unbroadcast(-g * da / (db * db), db.shape)))


def matmul(a, b):
    """Strict 2-D matrix product."""
    if a.data.ndim != 2 or b.data.ndim != 2 or a.data.shape[1] != b.data.shape[0]:
        raise ShapeError(
            f"matmul expects (m,k)@(k,n), got {a.data.shape} @ {b.data.shape}")
    da, db = a.data, b.data
    return _emit(da @ db, (a, b),
                 lambda g: (g @ db.T, da.T @ g))


def bmm(a, b):
    """Batched matrix product over a leading batch axis: (B,m,k)@(B,k,n)."""
    if a.data.ndim != 3 or b.data.ndim != 3 or a.data.shape[2] != b.data.shape[1] \
            or a.data.shape[0] != b.data.shape[0]:
        raise ShapeError(
            f"bmm expects (B,m,k)@(B,k,n), got {a.data.shape} @ {b.data.shape}")
    da, db = a.data, b.data
    return _emit(da @ db, (a, b),
                 lambda g: (g @ db.swapaxes(1, 2), da.swapaxes(1, 2) @ g))


def sum_(a, axis=None, keepdims=False):
    shape = a.data.shape

    def back(g):
        if axis is not None and not keepdims:
            g = np.expand_dims(g, axis)
        return (np.broadcast_to(g, shape).copy(),)

    return _emit(a.data.sum(axis=axis, keepdims=keepdims), (a,), back)


def mean_(a, axis=None, keepdims=False):
    shape = a.data.shape
    if axis is None:
        n = a.data.size
    else:
        n = shape[axis]

    def back(g):
        if axis is not None and not keepdims:
            g = np.expand_dims(g, axis)
        return (np.broadcast_to(g, shape).copy() / n,)

    return _emit(a.data.mean(axis=axis, keepdims=keepdims), (a,), back)


def tanh(a):
    out = np.tanh(a.data)
    return _emit(out, (a,), lambda g: (g * (1.0 - out * out),))


def sigmoid(a):
    da = a.data
    e = np.exp(-np.abs(da))
    denom = 1.0 + e
    out = np.where(da >= 0, 1.0 / denom, e / denom)
    return _emit(out, (a,), lambda g: (g * out * (1.0 - out),))


def relu(a):
    mask = a.data > 0
    return _emit(np.where(mask, a.data, 0.0), (a,), lambda g: (g * mask,))


def exp(a):
    out = np.exp(a.data)
    return _emit(out, (a,), lambda g: (g * out,))


def log(a):
    da = a.data
    return _emit(np.log(da), (a,), lambda g: (g / da,))


def sqrt(a):
    out = np.sqrt(a.data)
    return _emit(out, (a,), lambda g: (g * 0.5 / out,))


def square(a):
    da = a.data
    return _emit(da * da, (a,), lambda g: (g * 2.0 * da,))


def softplus(a):
    """log(1 + exp(x)) computed overflow-free; gradient is sigmoid(x)."""
    da = a.data
    out = np.maximum(da, 0.0) + np.log1p(np.exp(-np.abs(da)))
    return _emit(out, (a,), lambda g: (g / (1.0 + np.exp(-da)),))


def clamp(a, lo, hi):
    """Elementwise clip; gradient passes only where lo < x < hi."""
    da = a.data
    inside = (da > lo) & (da < hi)
    return _emit(np.clip(da, lo, hi), (a,), lambda g: (g * inside,))


def minimum(a, b):
    """Elementwise min; on ties the gradient routes to the first argument."""
    da, db = a.data, b.data
    take_a = da <= db
    return _emit(np.where(take_a, da, db), (a, b),
                 lambda g: (g * take_a, g * ~take_a))


def concat(tensors, axis=0):
    datas = [t.data for t in tensors]
    sizes = [d.shape[axis] for d in datas]
    offsets = np.cumsum([0] + sizes)

    def back(g):
        return tuple(
            np.take(g, np.arange(offsets[i], offsets[i + 1]), axis=axis)
            for i in range(len(datas)))

    return _emit(np.concatenate(datas, axis=axis), tuple(tensors), back)


def reshape(a, shape):
    old = a.data.shape
    return _emit(a.data.reshape(shape), (a,), lambda g: (g.reshape(old),))


def transpose(a, axes=None):
    order = axes if axes is not None else tuple(reversed(range(a.data.ndim)))
    inverse = np.argsort(order)
    return _emit(np.transpose(a.data, order), (a,),
                 lambda g: (np.transpose(g, inverse),))


def getitem(a, idx):
    shape = a.data.shape

    def back(g):
        grad = np.zeros(shape, dtype=np.float64)
        np.add.at(grad, idx, g)
        return (grad,)

    return _emit(a.data[idx], (a,), back)


def masked_softmax(logits, mask):
    """Softmax over the last axis restricted to present entries.

    ``mask`` is additive: 0.0 marks a present entry, -inf an absent one.
    Output is exactly 0 at absent entries and sums to 1 over present ones;
    stabilization subtracts the per-row max over present entries. Rows with
    no present entry raise AllMaskedError.
    """
    mdata = mask.data if isinstance(mask, Tensor) else np.asarray(mask, dtype=np.float64)
    present = mdata == 0.0
    if not present.any(axis=-1).all():
        raise AllMaskedError("masked_softmax: a row has no present entry")
    da = logits.data
    shifted = np.where(present, da, -np.inf)
    m = shifted.max(axis=-1, keepdims=True)
    e = np.where(present, np.exp(np.where(present, da, 0.0) - m), 0.0)
    s = e.sum(axis=-1, keepdims=True)
    w = e / s

    def back(g):
        inner = (g * w).sum(axis=-1, keepdims=True)
        return (w * (g - inner), None)

    inputs = (logits, mask) if isinstance(mask, Tensor) else (logits,)
    if isinstance(mask, Tensor):
        return _emit(w, inputs, back)
    return _emit(w, inputs, lambda g: (w * (g - (g * w).sum(axis=-1, keepdims=True)),))


def layer_norm(x, gain, bias, epsilon=1e-5):
    """gain * (x - mean) / sqrt(var + epsilon) + bias over the last axis.

    Variance uses 1/d normalization. Composed from primitives, so the
    gradient falls out of the tape. Requires the last axis be >= 2 wide.
    """
    d = x.data.shape[-1]
    if d < 2:
        raise ShapeError(f"layer_norm needs >= 2 features, got {d}")
    mu = mean_(x, axis=-1, keepdims=True)
    xc = sub(x, mu)
    var = mean_(square(xc), axis=-1, keepdims=True)
    inv = div(constant(np.ones(())), sqrt(add(var, constant(epsilon))))
    return add(mul(gain, mul(xc, inv)), bias)


def conv2d(x, kernels, stride=1):
    """Batched 2-D cross-correlation, no padding.

    x: (B, C_in, H, W); kernels: (C_out, C_in, k, k); output
    (B, C_out, H', W') with H' = (H - k) // stride + 1.
    """
    if x.data.ndim != 4 or kernels.data.ndim != 4:
        raise ShapeError(
            f"conv2d expects x (B,C,H,W) and kernels (O,C,k,k), got "
            f"{x.data.shape} and {kernels.data.shape}")
    bsz, c_in, h, w = x.data.shape
    c_out, c_k, k, k2 = kernels.data.shape
    if c_k != c_in or k != k2:
        raise ShapeError(
            f"conv2d channel/kernel mismatch: x {x.data.shape} vs kernels "
            f"{kernels.data.shape}")
    if h < k or w < k:
        raise ShapeError(
            f"conv2d kernel {k}x{k} larger than input {h}x{w}")
    if stride < 1:
        raise ShapeError(f"conv2d stride must be >= 1, got {stride}")
    h_out = (h - k) // stride + 1
    w_out = (w - k) // stride + 1

    windows = np.lib.stride_tricks.sliding_window_view(x.data, (k, k), axis=(2, 3))
    windows = windows[:, :, ::stride, ::stride]            # (B,C,H',W',k,k)
    cols = windows.transpose(0, 2, 3, 1, 4, 5).reshape(bsz, h_out * w_out, c_in * k * k)
    kmat = kernels.data.reshape(c_out, c_in * k * k).T     # (C*k*k, C_out)
    out = (cols @ kmat).transpose(0, 2, 1).reshape(bsz, c_out, h_out, w_out)

    def back(g):
        gcols = g.reshape(bsz, c_out, h_out * w_out).transpose(0, 2, 1)
        dk = np.einsum("bpc,bpo->co", cols, gcols, optimize=True)
        dkernels = dk.T.reshape(c_out, c_in, k, k)
        dcols = gcols @ kmat.T
        dpat = dcols.reshape(bsz, h_out, w_out, c_in, k, k).transpose(0, 3, 1, 2, 4, 5)
        dx = np.zeros((bsz, c_in, h, w), dtype=np.float64)
        for i in range(k):
            for j in range(k):
                dx[:, :, i:i + h_out * stride:stride,
                   j:j + w_out * stride:stride] += dpat[..., i, j]
        return (dx, dkernels)

    return _emit(out, (x, kernels), back)
