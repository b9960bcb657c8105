"""Oriented-bounding-box overlap via the separating axis theorem."""

from __future__ import annotations

import math


def obb_corners(x, y, heading, length, width):
    hl, hw = length / 2.0, width / 2.0
    c, s = math.cos(heading), math.sin(heading)
    local = ((hl, hw), (hl, -hw), (-hl, -hw), (-hl, hw))
    return [(x + dx * c - dy * s, y + dx * s + dy * c) for dx, dy in local]


def _interval(corners, ax, ay):
    dots = [cx * ax + cy * ay for cx, cy in corners]
    return min(dots), max(dots)


def obb_overlap(c1, c2):
    """True when no edge normal of either box separates the corner sets."""
    for corners in (c1, c2):
        for i in range(2):  # rectangles: two unique edge normals each
            x1, y1 = corners[i]
            x2, y2 = corners[i + 1]
            ax, ay = -(y2 - y1), x2 - x1
            lo1, hi1 = _interval(c1, ax, ay)
            lo2, hi2 = _interval(c2, ax, ay)
            if hi1 < lo2 or hi2 < lo1:
                return False
    return True


def vehicles_collide(a, b):
    """OBB test with a cheap bounding-circle rejection first."""
    r = 0.5 * (math.hypot(a.length, a.width) + math.hypot(b.length, b.width))
    if math.hypot(b.x - a.x, b.y - a.y) > r:
        return False
    return obb_overlap(
        obb_corners(a.x, a.y, a.heading, a.length, a.width),
        obb_corners(b.x, b.y, b.heading, b.length, b.width))
