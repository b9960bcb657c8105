"""CNN context encoder over stacked drivable-area and waypoint maps."""

from __future__ import annotations

from .. import numkit as nk


def encode_context(params, maps):
    """maps: Tensor or ndarray (B, 2, H, W) -> context encoding (B, d_c).

    Three stride-2 3x3 conv layers with ReLU shrink the image, then a
    flatten and a ReLU linear layer produce the context vector.
    """
    x = maps if isinstance(maps, nk.Tensor) else nk.constant(maps)
    cfg = params.config
    if x.shape[2] != cfg.map_size or x.shape[3] != cfg.map_size:
        raise nk.ShapeError(
            f"context maps are {x.shape[2]}x{x.shape[3]}, expected "
            f"{cfg.map_size}x{cfg.map_size}")
    for i in range(1, len(cfg.conv_channels) + 1):
        kern, bias = params.conv_layer(i)
        x = nk.relu(nk.add(nk.conv2d(x, kern, stride=2), bias))
    bsz = x.shape[0]
    flat = nk.reshape(x, (bsz, x.shape[1] * x.shape[2] * x.shape[3]))
    return nk.relu(nk.add(nk.matmul(flat, params.ctx_w), params.ctx_b))
