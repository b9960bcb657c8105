"""Lane-graph substrate: polyline lanes with connectivity and adjacency."""

from __future__ import annotations

import numpy as np

from .geometry import (
    cumulative_arclength,
    point_at,
    project_point,
    strip_polygon,
)


class LaneGraphError(ValueError):
    pass


class Lane:
    def __init__(self, lane_id, centerline, width, speed_limit, index=0):
        pts = np.asarray(centerline, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[0] < 2 or pts.shape[1] != 2:
            raise LaneGraphError(f"lane {lane_id}: centerline needs >= 2 points")
        if (np.linalg.norm(np.diff(pts, axis=0), axis=1) < 1e-9).any():
            raise LaneGraphError(f"lane {lane_id}: successive points coincide")
        self.id = lane_id
        self.centerline = pts
        self.width = float(width)
        self.speed_limit = float(speed_limit)
        self.index = int(index)
        self.cum = cumulative_arclength(pts)
        self.length = float(self.cum[-1])
        self.polygon = strip_polygon(pts, self.width)

    def point_at(self, s):
        return point_at(self.centerline, self.cum, s)

    def project(self, p):
        return project_point(self.centerline, self.cum, p)

    def contains(self, p, slack=0.0):
        s, lateral, _ = self.project(p)
        return abs(lateral) <= self.width / 2.0 + slack and 0.0 <= s <= self.length


class LaneGraph:
    """Lanes plus successor links and symmetric left/right adjacency."""

    def __init__(self, lanes, successors=None, left=None, right=None):
        self.lanes = {lane.id: lane for lane in lanes}
        self.successors = {k: list(v) for k, v in (successors or {}).items()}
        left = dict(left or {})
        right = dict(right or {})
        # fill the mirror side, then verify symmetry
        for a, b in list(left.items()):
            right.setdefault(b, a)
        for a, b in list(right.items()):
            left.setdefault(b, a)
        for a, b in left.items():
            if right.get(b) != a:
                raise LaneGraphError(
                    f"adjacency asymmetric: left[{a}]={b} but right[{b}]="
                    f"{right.get(b)}")
        for mapping, side in ((left, "left"), (right, "right")):
            for a, b in mapping.items():
                if a not in self.lanes or b not in self.lanes:
                    raise LaneGraphError(f"{side} adjacency names unknown lane "
                                         f"{a!r} or {b!r}")
        for src, dsts in self.successors.items():
            if src not in self.lanes:
                raise LaneGraphError(f"successor source {src!r} unknown")
            for d in dsts:
                if d not in self.lanes:
                    raise LaneGraphError(f"successor {d!r} of {src!r} unknown")
        self.left = left
        self.right = right
        self.predecessors = {}
        for src, dsts in self.successors.items():
            for d in dsts:
                self.predecessors.setdefault(d, []).append(src)

    def lane(self, lane_id):
        return self.lanes[lane_id]

    def adjacent(self, lane_id, side):
        return (self.left if side == "left" else self.right).get(lane_id)

    def connected(self, a, b):
        """b follows a via a successor link or lateral adjacency."""
        return (b in self.successors.get(a, ())
                or self.left.get(a) == b or self.right.get(a) == b)

    def route_polyline(self, route):
        """Concatenated centerline of a lane sequence (duplicate joints dropped)."""
        pts = []
        for lane_id in route:
            line = self.lane(lane_id).centerline
            if pts and np.linalg.norm(pts[-1] - line[0]) < 1e-9:
                line = line[1:]
            pts.extend(line)
        pts = np.asarray(pts)
        return pts, cumulative_arclength(pts)

    def find_lane(self, p, prefer=None, slack=0.0):
        """Best lane containing ``p``: smallest |lateral|, preferred set wins ties.

        Returns (lane_id, s, lateral) or (None, None, None).
        """
        prefer = prefer or ()
        best = None
        for lane_id in self.lanes:  # dict order is deterministic
            lane = self.lanes[lane_id]
            s, lateral, _ = lane.project(p)
            if abs(lateral) <= lane.width / 2.0 + slack and 0.0 <= s <= lane.length:
                key = (lane_id not in prefer, abs(lateral))
                if best is None or key < best[0]:
                    best = (key, lane_id, s, lateral)
        if best is None:
            return None, None, None
        return best[1], best[2], best[3]

    def drivable_contains(self, p):
        return any(lane.contains(p) for lane in self.lanes.values())
