"""Hybrid action mapping: raw (-1,1)^2 to target speed + lane command."""

from __future__ import annotations

from ..sim.vehicle import EgoCommand, LaneCommand

LANE_BOUNDARY = 1.0 / 3.0
MIN_TARGET_SPEED = 0.1  # m/s, keeps the target strictly positive


def map_action(raw, v_max):
    """Total on (-1,1)^2; the closed middle third maps to keep-lane.

    u_lane < -1/3 switches left, u_lane > 1/3 switches right, the boundary
    points belong to keep (documented tie-break, measure zero).
    """
    u_speed, u_lane = float(raw[0]), float(raw[1])
    target = (u_speed + 1.0) / 2.0 * v_max
    target = min(max(target, MIN_TARGET_SPEED), v_max)
    if u_lane < -LANE_BOUNDARY:
        lane = LaneCommand.LEFT
    elif u_lane > LANE_BOUNDARY:
        lane = LaneCommand.RIGHT
    else:
        lane = LaneCommand.KEEP
    return EgoCommand(target_speed=target, lane=lane)
