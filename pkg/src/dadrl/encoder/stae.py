"""Temporal encoding, ego-query attention, and norm/residual fusion."""

from __future__ import annotations

import numpy as np

from .. import numkit as nk


def encode_temporal(params, sequences):
    """Final hidden state of the shared LSTM over newest-first histories.

    ``sequences`` is a Tensor or ndarray shaped (M, K, F): M independent
    histories, K samples each stored newest-first. Samples are consumed
    oldest-first. Gate order along the packed weight is (input, forget,
    cell, output).
    """
    if not isinstance(sequences, nk.Tensor):
        sequences = nk.constant(sequences)
    m, k_len, feats = sequences.shape
    expected = params.lstm_wx.shape[0]
    if feats != expected:
        raise nk.ContractViolation(
            f"history feature width {feats} != LSTM input dim {expected}")
    if k_len != params.config.history_samples:
        raise nk.ContractViolation(
            f"history has {k_len} samples, expected "
            f"{params.config.history_samples}")
    d = params.config.d
    h = nk.constant(np.zeros((m, d)))
    c = nk.constant(np.zeros((m, d)))
    for step in range(k_len - 1, -1, -1):  # oldest first
        x = sequences[:, step, :]
        z = nk.add(nk.add(nk.matmul(x, params.lstm_wx),
                          nk.matmul(h, params.lstm_wh)), params.lstm_b)
        gate_i = nk.sigmoid(z[:, 0 * d:1 * d])
        gate_f = nk.sigmoid(z[:, 1 * d:2 * d])
        gate_g = nk.tanh(z[:, 2 * d:3 * d])
        gate_o = nk.sigmoid(z[:, 3 * d:4 * d])
        c = nk.add(nk.mul(gate_f, c), nk.mul(gate_i, gate_g))
        h = nk.mul(gate_o, nk.tanh(c))
    return h


def attend_ego(params, p_ego, p_sv, mask):
    """Single-layer ego-query attention over surrounding-vehicle encodings.

    p_ego: (B, d); p_sv: (B, n, d); mask: (B, n) additive 0/-inf ndarray.
    Returns (alpha (B, d_a), weights (B, n)). Rows whose slots are all
    absent take the degenerate path: zero weights and zero alpha, so empty
    roads stay legal states.
    """
    bsz, n, d = p_sv.shape
    d_a = params.config.d_a
    q = nk.matmul(p_ego, params.attn_wq)                        # (B, d_a)
    k = nk.reshape(nk.matmul(nk.reshape(p_sv, (bsz * n, d)), params.attn_wk),
                   (bsz, n, d_a))
    v = nk.reshape(nk.matmul(nk.reshape(p_sv, (bsz * n, d)), params.attn_wv),
                   (bsz, n, d_a))
    # elementwise-and-reduce contractions: unlike a BLAS matmul, the result
    # for one slot does not depend on how many other slots exist, which is
    # what makes padded absent slots bitwise-equal to omitted ones
    scores = nk.sum_(nk.mul(nk.reshape(q, (bsz, 1, d_a)), k), axis=2)
    scaled = nk.mul(scores, nk.constant(1.0 / np.sqrt(d_a)))

    present_any = (mask == 0.0).any(axis=1)
    if present_any.all():
        weights = nk.masked_softmax(scaled, mask)
    else:
        # pretend slot 0 is present for degenerate rows, then zero them out
        safe = mask.copy()
        safe[~present_any, 0] = 0.0
        indicator = nk.constant(present_any.astype(np.float64)[:, None])
        weights = nk.mul(nk.masked_softmax(scaled, safe), indicator)
    alpha = nk.sum_(nk.mul(nk.reshape(weights, (bsz, n, 1)), v), axis=1)
    return alpha, weights


def fuse_state(params, alpha, p_ego, ego_now):
    """Norm/residual fusion and linear projection to the interaction encoding.

    ego_now: (B, 10) current-time ego features (constant input). No
    activation follows the linear layer.
    """
    if not isinstance(ego_now, nk.Tensor):
        ego_now = nk.constant(ego_now)
    m_t = nk.layer_norm(nk.add(alpha, p_ego), params.norm_gain,
                        params.norm_bias)
    fused = nk.concat([ego_now, m_t], axis=1)
    return nk.add(nk.matmul(fused, params.fuse_w), params.fuse_b)
