"""Encoder configuration and parameter containers."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .. import numkit as nk
from ..observation import EGO_ODO_FEATURES, VEHICLE_FEATURES

EGO_NOW_DIM = VEHICLE_FEATURES + EGO_ODO_FEATURES

VARIANTS = ("full", "context_free", "context_only")


@dataclass
class EncoderConfig:
    d: int = 64            # shared-LSTM hidden size
    d_a: int = 64          # attention dim; must equal d for the residual add
    d_z: int = 128         # fused interaction encoding size
    d_c: int = 64          # context encoding size
    n: int = 8             # surrounding-vehicle slots
    map_size: int = 64     # H = W of the context maps
    resolution: float = 0.5      # m / pixel
    sensor_range: float = 50.0   # m, circular
    conv_channels: tuple = (16, 32, 64)
    history_samples: int = 5     # K, newest first
    history_stride: int = 5      # raw sim steps between samples
    variant: str = "full"

    def __post_init__(self):
        if self.d_a != self.d:
            raise ValueError(
                f"attention dim d_a={self.d_a} must equal d={self.d} for the "
                "residual add into the norm")
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown encoder variant {self.variant!r}")

    def conv_output_hw(self):
        hw = self.map_size
        for _ in self.conv_channels:
            hw = (hw - 3) // 2 + 1
            if hw < 1:
                raise ValueError(
                    f"map_size {self.map_size} too small for "
                    f"{len(self.conv_channels)} stride-2 conv layers")
        return hw

    @property
    def state_dim(self):
        if self.variant == "full":
            return self.d_z + self.d_c
        if self.variant == "context_free":
            return self.d_z
        return EGO_NOW_DIM + self.d_c  # context_only


class EncoderParams:
    """Named weight tensors for one encoder variant.

    The LSTM weights are a single shared set applied to the ego history and
    every surrounding-vehicle history alike.
    """

    def __init__(self, config: EncoderConfig, rng):
        self.config = config
        d, d_a = config.d, config.d_a
        self.tensors: dict[str, nk.Tensor] = {}

        def par(name, shape, scale=None):
            t = nk.parameter(shape, rng=rng, scale=scale)
            self.tensors[name] = t
            return t

        def par_value(name, value):
            t = nk.parameter(value)
            self.tensors[name] = t
            return t

        uses_stae = config.variant in ("full", "context_free")
        uses_context = config.variant in ("full", "context_only")

        if uses_stae:
            self.lstm_wx = par("stae/lstm/w_x", (VEHICLE_FEATURES, 4 * d))
            self.lstm_wh = par("stae/lstm/w_h", (d, 4 * d))
            self.lstm_b = par_value("stae/lstm/b", np.zeros(4 * d))
            self.attn_wq = par("stae/attn/w_q", (d, d_a))
            self.attn_wk = par("stae/attn/w_k", (d, d_a))
            self.attn_wv = par("stae/attn/w_v", (d, d_a))
            self.norm_gain = par_value("stae/norm/gain", np.ones(d))
            self.norm_bias = par_value("stae/norm/bias", np.zeros(d))
            self.fuse_w = par("stae/fuse/w", (EGO_NOW_DIM + d, config.d_z))
            self.fuse_b = par_value("stae/fuse/b", np.zeros(config.d_z))

        if uses_context:
            in_ch = 2
            for i, out_ch in enumerate(config.conv_channels, start=1):
                scale = 1.0 / np.sqrt(in_ch * 9)
                par(f"ce/conv{i}/k", (out_ch, in_ch, 3, 3), scale=scale)
                par_value(f"ce/conv{i}/b", np.zeros((out_ch, 1, 1)))
                in_ch = out_ch
            hw = config.conv_output_hw()
            flat = config.conv_channels[-1] * hw * hw
            self.ctx_w = par("ce/linear/w", (flat, config.d_c))
            self.ctx_b = par_value("ce/linear/b", np.zeros(config.d_c))

    def conv_layer(self, i):
        return self.tensors[f"ce/conv{i}/k"], self.tensors[f"ce/conv{i}/b"]

    def named(self):
        return dict(self.tensors)

    def load_arrays(self, arrays, prefix=""):
        for name, t in self.tensors.items():
            src = arrays[prefix + name]
            if src.shape != t.data.shape:
                raise nk.ShapeError(
                    f"checkpoint tensor {prefix + name} has shape {src.shape}, "
                    f"expected {t.data.shape}")
            t.data = src.copy()
