"""Ego-centered bird's-eye-view rasterization of drivable area and route.

Maps are binary uint-style float arrays drawn with subpixel (fixed point)
coordinates so that equal geometry rasterizes identically regardless of the
world frame the scenario happens to sit in.
"""

from __future__ import annotations

import math

import cv2
import numpy as np

from .geometry import to_ego_frame

_SHIFT = 4          # cv2 fixed-point bits: 1/16 px quantization
_SCALE = 1 << _SHIFT


def _to_pixels(points_ego, size, resolution):
    """Ego-frame metric points -> fixed-point pixel coords (x=col, y=row).

    Ego sits at the image center; forward (ego +y) is up (decreasing row),
    ego's right (+x) is increasing column.
    """
    half = size / 2.0
    cols = half + points_ego[:, 0] / resolution
    rows = half - points_ego[:, 1] / resolution
    px = np.stack([cols, rows], axis=1) * _SCALE
    return np.round(px).astype(np.int32)


def rasterize_bev(lane_polygons, route_points, ego_xy, ego_heading,
                  size, resolution, route_done_s=None, route_cum=None):
    """(2, size, size) binary maps: drivable area and remaining route.

    lane_polygons: iterable of world-frame (P, 2) polygons.
    route_points/route_cum: the ego route polyline; when ``route_done_s``
    is given only the part ahead of it is drawn.
    """
    if size % 2 != 0:
        raise ValueError(f"BEV size must be even, got {size}")
    if resolution <= 0:
        raise ValueError(f"BEV resolution must be positive, got {resolution}")
    drivable = np.zeros((size, size), dtype=np.uint8)
    for poly in lane_polygons:
        ego_poly = to_ego_frame(poly, ego_xy, ego_heading)
        # cheap reject: polygon fully outside the map window
        extent = size * resolution
        if (np.abs(ego_poly) > extent).all(axis=1).all():
            continue
        cv2.fillPoly(drivable, [_to_pixels(ego_poly, size, resolution)], 1,
                     lineType=cv2.LINE_8, shift=_SHIFT)

    waypoint = np.zeros((size, size), dtype=np.uint8)
    pts = np.asarray(route_points, dtype=np.float64)
    if route_done_s is not None and route_cum is not None:
        ahead = route_cum >= route_done_s
        if ahead.any():
            first = max(int(np.argmax(ahead)) - 1, 0)
            pts = pts[first:]
    if len(pts) >= 2:
        ego_pts = to_ego_frame(pts, ego_xy, ego_heading)
        cv2.polylines(waypoint, [_to_pixels(ego_pts, size, resolution)],
                      isClosed=False, color=1, thickness=1,
                      lineType=cv2.LINE_8, shift=_SHIFT)
    return np.stack([drivable, waypoint]).astype(np.float64)
