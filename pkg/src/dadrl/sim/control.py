"""Mid-level controller: speed tracking plus pure-pursuit lane following.

Executes the hybrid action space: a continuous target speed and a discrete
lane command. A lane switch retargets the adjacent centerline and completes
once the lateral error drops under the tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import cumulative_arclength, point_at, project_point
from .vehicle import EgoCommand, LaneCommand


@dataclass
class ControlConfig:
    k_speed: float = 1.5         # 1/s, proportional speed-tracking gain
    a_max: float = 3.0           # m/s^2, longitudinal clamp
    wheelbase: float = 2.8       # m
    steer_limit: float = 0.6     # rad
    lookahead_base: float = 2.5  # m
    lookahead_gain: float = 0.45 # s (converts speed to distance)
    lookahead_max: float = 12.0  # m
    switch_tolerance: float = 0.2  # m lateral error that completes a switch
    path_horizon: int = 6        # lanes assembled ahead of the active lane


def speed_tracking_accel(speed, target_speed, cfg: ControlConfig):
    return min(max(cfg.k_speed * (target_speed - speed), -cfg.a_max), cfg.a_max)


def pure_pursuit_steer(x, y, heading, speed, path_points, path_cum, cfg):
    """Steering toward a lookahead point on the target path."""
    s_now, _, _ = project_point(path_points, path_cum, np.array([x, y]))
    lookahead = min(cfg.lookahead_base + cfg.lookahead_gain * speed,
                    cfg.lookahead_max)
    target, _ = point_at(path_points, path_cum, s_now + lookahead)
    dx = target[0] - x
    dy = target[1] - y
    dist = math.hypot(dx, dy)
    if dist < 1e-6:
        return 0.0
    eta = math.atan2(dy, dx) - heading
    steer = math.atan2(2.0 * cfg.wheelbase * math.sin(eta), dist)
    return min(max(steer, -cfg.steer_limit), cfg.steer_limit)


class MidLevelController:
    """Tracks the active lane chain; owns lane-switch progress state."""

    def __init__(self, graph, route, cfg: ControlConfig):
        self.graph = graph
        self.route = list(route)
        self.cfg = cfg
        self.active_lane = route[0]
        self.switch_target = None
        self._rebuild_path()

    def _chain_from(self, lane_id):
        """Lane chain ahead: follow successors, preferring route lanes."""
        chain = [lane_id]
        current = lane_id
        for _ in range(self.cfg.path_horizon):
            nexts = self.graph.successors.get(current, [])
            if not nexts:
                break
            on_route = [n for n in nexts if n in self.route]
            current = on_route[0] if on_route else nexts[0]
            chain.append(current)
        return chain

    def _rebuild_path(self):
        target = self.switch_target or self.active_lane
        pts, _ = self.graph.route_polyline(self._chain_from(target))
        self.path_points = pts
        self.path_cum = cumulative_arclength(pts)

    def coerce(self, command: EgoCommand):
        """Infeasible lane switches become keep-lane (always-valid actions)."""
        if command.lane is LaneCommand.KEEP:
            return command
        side = "left" if command.lane is LaneCommand.LEFT else "right"
        base = self.switch_target or self.active_lane
        if self.graph.adjacent(base, side) is None:
            return EgoCommand(command.target_speed, LaneCommand.KEEP)
        return command

    def control(self, state, command: EgoCommand):
        """(acceleration, steering) executing the mid-level command."""
        command = self.coerce(command)
        if command.lane is not LaneCommand.KEEP and self.switch_target is None:
            side = "left" if command.lane is LaneCommand.LEFT else "right"
            self.switch_target = self.graph.adjacent(self.active_lane, side)
            self._rebuild_path()

        accel = speed_tracking_accel(state.speed, command.target_speed, self.cfg)
        steer = pure_pursuit_steer(state.x, state.y, state.heading, state.speed,
                                   self.path_points, self.path_cum, self.cfg)
        return accel, steer

    def advance(self, state):
        """Post-integration bookkeeping: switch completion, lane handoff."""
        if self.switch_target is not None:
            lane = self.graph.lane(self.switch_target)
            _, lateral, _ = lane.project(np.array([state.x, state.y]))
            if abs(lateral) < self.cfg.switch_tolerance:
                self.active_lane = self.switch_target
                self.switch_target = None
                self._rebuild_path()
        else:
            lane = self.graph.lane(self.active_lane)
            s, _, _ = lane.project(np.array([state.x, state.y]))
            if s >= lane.length - 1e-6:
                nexts = self.graph.successors.get(self.active_lane, [])
                if nexts:
                    on_route = [n for n in nexts if n in self.route]
                    self.active_lane = on_route[0] if on_route else nexts[0]
                    self._rebuild_path()
