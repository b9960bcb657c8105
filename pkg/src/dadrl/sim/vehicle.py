"""Vehicle state containers and the ego's kinematic bicycle step."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum


class LaneCommand(Enum):
    KEEP = "keep"
    LEFT = "switch_left"
    RIGHT = "switch_right"


@dataclass
class EgoCommand:
    target_speed: float          # m/s, clamped into (0, V_max]
    lane: LaneCommand = LaneCommand.KEEP


@dataclass
class VehicleState:
    x: float
    y: float
    heading: float
    speed: float
    accel: float = 0.0
    steering: float = 0.0
    yaw_rate: float = 0.0
    length: float = 4.4
    width: float = 1.8
    lane_id: str = None
    lane_s: float = 0.0

    @property
    def position(self):
        return (self.x, self.y)


@dataclass
class BackgroundVehicle:
    vid: int
    state: VehicleState
    flow_index: int
    route_s: float
    desired_speed: float
    history: list = field(default_factory=list)


def bicycle_step(state: VehicleState, accel, steering, dt, wheelbase):
    """Explicit-Euler kinematic bicycle update, in place.

    Derivatives are evaluated at the pre-step state; speed never goes
    negative (no reverse gear in this action space).
    """
    yaw_rate = state.speed / wheelbase * math.tan(steering)
    state.x += state.speed * math.cos(state.heading) * dt
    state.y += state.speed * math.sin(state.heading) * dt
    state.heading += yaw_rate * dt
    state.speed = max(0.0, state.speed + accel * dt)
    state.accel = accel
    state.steering = steering
    state.yaw_rate = yaw_rate
