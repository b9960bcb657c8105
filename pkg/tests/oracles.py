"""Independent reference implementations used to freeze expected test values.

Everything here is deliberately written with plain numpy / stdlib math and no
imports from the package under test, so a bug in the package cannot hide
behind a shared code path.
"""

import math

import numpy as np


def central_difference(f, x, h=1e-6):
    """Central-difference gradient of scalar f with respect to ndarray x.

    f must accept an ndarray shaped like x and return a python float.
    """
    x = np.asarray(x, dtype=np.float64)
    grad = np.zeros_like(x)
    flat = x.reshape(-1)
    gflat = grad.reshape(-1)
    for i in range(flat.size):
        orig = flat[i]
        flat[i] = orig + h
        fp = f(x)
        flat[i] = orig - h
        fm = f(x)
        flat[i] = orig
        gflat[i] = (fp - fm) / (2.0 * h)
    return grad


def direct_softmax(logits):
    """Unstabilized exp/sum softmax over a 1-D array."""
    e = np.exp(np.asarray(logits, dtype=np.float64))
    return e / e.sum()


def direct_masked_attention(p_ego, p_sv, mask, w_q, w_k, w_v):
    """Ego-query attention evaluated straight from its defining formula.

    p_ego: (d,), p_sv: (n, d), mask: (n,) additive 0/-inf,
    projections (d, d_a).  Returns (alpha (d_a,), weights (n,)).
    """
    q = p_ego @ w_q
    k = p_sv @ w_k
    v = p_sv @ w_v
    d_k = w_q.shape[1]
    scores = (q @ k.T + mask) / math.sqrt(d_k)
    present = np.isfinite(scores)
    if not present.any():
        return np.zeros(d_k), np.zeros(mask.shape[0])
    m = scores[present].max()
    e = np.where(present, np.exp(np.where(present, scores, 0.0) - m), 0.0)
    w = e / e.sum()
    return w @ v, w


def direct_layer_norm(x, gain, bias, eps):
    x = np.asarray(x, dtype=np.float64)
    mu = x.mean()
    var = ((x - mu) ** 2).mean()
    return gain * (x - mu) / np.sqrt(var + eps) + bias


def direct_conv2d(image, kernels, stride):
    """Naive quadruple-loop cross correlation, no padding.

    image: (C_in, H, W), kernels: (C_out, C_in, k, k).
    """
    c_in, h, w = image.shape
    c_out, _, k, _ = kernels.shape
    h_out = (h - k) // stride + 1
    w_out = (w - k) // stride + 1
    out = np.zeros((c_out, h_out, w_out))
    for o in range(c_out):
        for i in range(h_out):
            for j in range(w_out):
                patch = image[:, i * stride:i * stride + k, j * stride:j * stride + k]
                out[o, i, j] = (patch * kernels[o]).sum()
    return out


def lstm_cell_step(x, h, c, w_x, w_h, b):
    """One LSTM cell step with gate order (input, forget, cell, output).

    x: (n_in,), h/c: (n_hidden,), w_x: (n_in, 4*n_hidden),
    w_h: (n_hidden, 4*n_hidden), b: (4*n_hidden,).
    """
    d = h.shape[0]
    z = x @ w_x + h @ w_h + b
    sig = lambda v: 1.0 / (1.0 + np.exp(-v))
    i = sig(z[:d])
    f = sig(z[d:2 * d])
    g = np.tanh(z[2 * d:3 * d])
    o = sig(z[3 * d:])
    c_new = f * c + i * g
    h_new = o * np.tanh(c_new)
    return h_new, c_new


def lstm_run(seq, w_x, w_h, b):
    """Run lstm_cell_step over seq (T, n_in), oldest first; return final h."""
    d = w_h.shape[0]
    h = np.zeros(d)
    c = np.zeros(d)
    for x in seq:
        h, c = lstm_cell_step(np.asarray(x, dtype=np.float64), h, c, w_x, w_h, b)
    return h


def adam_reference(param, grads, lr=0.1, beta1=0.9, beta2=0.999, eps=1e-8):
    """Scripted Adam trajectory: returns param values after each step."""
    p = float(param)
    m = 0.0
    v = 0.0
    out = []
    for t, g in enumerate(grads, start=1):
        m = beta1 * m + (1 - beta1) * g
        v = beta2 * v + (1 - beta2) * g * g
        mh = m / (1 - beta1 ** t)
        vh = v / (1 - beta2 ** t)
        p = p - lr * mh / (math.sqrt(vh) + eps)
        out.append(p)
    return out


def tanh_gaussian_logprob(mean, log_std, raw_action):
    """Log density of a tanh-squashed diagonal Gaussian at raw_action.

    Evaluated via the inverse transform: u = atanh(a), then the Gaussian
    density plus the |d tanh/du| change-of-variables term.
    """
    mean = np.asarray(mean, dtype=np.float64)
    log_std = np.asarray(log_std, dtype=np.float64)
    a = np.asarray(raw_action, dtype=np.float64)
    u = np.arctanh(a)
    std = np.exp(log_std)
    log_gauss = -0.5 * (((u - mean) / std) ** 2 + np.log(2 * math.pi)) - log_std
    log_det = np.log1p(-(np.tanh(u) ** 2))
    return float((log_gauss - log_det).sum())


def keep_lane_probability(bound=1.0 / 3.0):
    """P(tanh(u) in [-bound, bound]) for u ~ N(0, 1), via the error function."""
    z = math.atanh(bound)
    return math.erf(z / math.sqrt(2.0))


def moving_average(values, window):
    """Trailing moving average with a warm-up ramp (window grows from 1)."""
    out = []
    for i in range(len(values)):
        lo = max(0, i - window + 1)
        out.append(sum(values[lo:i + 1]) / (i + 1 - lo))
    return out
