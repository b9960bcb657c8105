"""Per-step event detection: collision, road/route compliance, goal, stagnation."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .collision import vehicles_collide
from .geometry import wrap_angle


@dataclass
class StepEvents:
    crash: bool = False
    offroad: bool = False
    offroute: bool = False
    wrong_way: bool = False
    reached_goal: bool = False
    stagnant: bool = False
    progress_delta: float = 0.0


def detect_events(world):
    """Evaluate all event predicates against the world's current state.

    crash and reached_goal are mutually exclusive; crash wins the tie.
    """
    ego = world.ego
    pos = np.array([ego.x, ego.y])
    graph = world.scenario.graph

    crash = any(vehicles_collide(ego, v.state) for v in world.vehicles)
    offroad = not graph.drivable_contains(pos)

    lane_id, s, _ = graph.find_lane(pos, prefer=world.route_prefer)
    if lane_id is None:
        offroute = True
        wrong_way = False
    else:
        route_set = world.route_set
        near_route = (lane_id in route_set
                      or graph.left.get(lane_id) in route_set
                      or graph.right.get(lane_id) in route_set)
        offroute = not near_route
        _, lane_heading = graph.lane(lane_id).point_at(s)
        wrong_way = abs(wrap_angle(ego.heading - lane_heading)) > math.pi / 2.0

    goal_dist = math.hypot(pos[0] - world.scenario.goal_center[0],
                           pos[1] - world.scenario.goal_center[1])
    reached_goal = (not crash) and goal_dist <= world.scenario.goal_radius

    return StepEvents(
        crash=crash,
        offroad=offroad,
        offroute=offroute,
        wrong_way=wrong_way,
        reached_goal=reached_goal,
        stagnant=world.consume_stagnation_event(),
        progress_delta=world.progress_delta,
    )
