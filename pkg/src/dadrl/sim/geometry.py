"""Polyline primitives: arc length, interpolation, projection, frames."""

from __future__ import annotations

import math

import numpy as np


def wrap_angle(a):
    """Wrap to (-pi, pi]."""
    return math.pi - (math.pi - a) % (2.0 * math.pi)


def cumulative_arclength(points):
    seg = np.linalg.norm(np.diff(points, axis=0), axis=1)
    return np.concatenate([[0.0], np.cumsum(seg)])


def point_at(points, cum, s):
    """Point and tangent heading at arc position ``s`` (clamped to ends)."""
    s = min(max(s, 0.0), cum[-1])
    idx = int(np.searchsorted(cum, s, side="right")) - 1
    idx = min(max(idx, 0), len(points) - 2)
    seg = points[idx + 1] - points[idx]
    seg_len = cum[idx + 1] - cum[idx]
    t = (s - cum[idx]) / seg_len if seg_len > 0 else 0.0
    p = points[idx] + t * seg
    return p, math.atan2(seg[1], seg[0])


def project_point(points, cum, p):
    """Project ``p`` onto the polyline.

    Returns (s, lateral, dist): arc position of the closest point, signed
    lateral offset (positive left of travel direction), and distance.
    """
    s_arr, lat_arr, d_arr = project_points(points, cum, np.asarray(p)[None, :])
    return float(s_arr[0]), float(lat_arr[0]), float(d_arr[0])


def project_points(points, cum, ps):
    """Vectorized projection of (M, 2) points onto the polyline."""
    a = points[:-1]                        # (S, 2)
    b = points[1:]
    ab = b - a
    seg_len2 = (ab * ab).sum(axis=1)
    seg_len2 = np.where(seg_len2 > 0, seg_len2, 1.0)
    diff = ps[:, None, :] - a[None, :, :]  # (M, S, 2)
    t = np.clip((diff * ab[None, :, :]).sum(axis=2) / seg_len2[None, :], 0.0, 1.0)
    closest = a[None, :, :] + t[:, :, None] * ab[None, :, :]
    delta = ps[:, None, :] - closest
    d2 = (delta * delta).sum(axis=2)
    best = np.argmin(d2, axis=1)           # (M,)
    rows = np.arange(ps.shape[0])
    tb = t[rows, best]
    seg = ab[best]
    seg_norm = np.sqrt(seg_len2[best])
    s = cum[best] + tb * seg_norm
    db = delta[rows, best]
    # positive lateral = left of travel direction (z of dir x offset)
    lateral = (seg[:, 0] * db[:, 1] - seg[:, 1] * db[:, 0]) / seg_norm
    return s, lateral, np.sqrt(d2[rows, best])


def to_ego_frame(points, ego_xy, ego_heading):
    """World points -> ego frame with y forward and x pointing right."""
    d = np.asarray(points, dtype=np.float64) - np.asarray(ego_xy)
    c, s = math.cos(ego_heading), math.sin(ego_heading)
    x_right = d[..., 0] * s - d[..., 1] * c
    y_fwd = d[..., 0] * c + d[..., 1] * s
    return np.stack([x_right, y_fwd], axis=-1)


def strip_polygon(points, width):
    """Constant-width strip around a polyline, as a closed polygon.

    Offsets each vertex along the averaged normal of its adjacent segments;
    good enough for lane-scale widths against lane-scale curvature.
    """
    pts = np.asarray(points, dtype=np.float64)
    seg = np.diff(pts, axis=0)
    seg = seg / np.linalg.norm(seg, axis=1, keepdims=True)
    normals = np.stack([-seg[:, 1], seg[:, 0]], axis=1)  # left normals
    vert_n = np.empty_like(pts)
    vert_n[0] = normals[0]
    vert_n[-1] = normals[-1]
    if len(pts) > 2:
        avg = normals[:-1] + normals[1:]
        norm = np.linalg.norm(avg, axis=1, keepdims=True)
        norm = np.where(norm > 1e-12, norm, 1.0)
        vert_n[1:-1] = avg / norm
    half = width / 2.0
    left = pts + half * vert_n
    right = pts - half * vert_n
    return np.concatenate([left, right[::-1]], axis=0)
