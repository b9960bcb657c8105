"""Intelligent Driver Model car following for background traffic."""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass
class IDMParams:
    a_max: float = 2.0       # m/s^2, comfortable acceleration bound
    b_comf: float = 2.5      # m/s^2, comfortable braking in the s* term
    b_max: float = 6.0       # m/s^2, hard braking floor
    s0: float = 2.5          # m, standstill gap
    t_headway: float = 1.5   # s, desired time headway
    delta: float = 4.0       # free-road exponent


def idm_acceleration(v, v_desired, gap, closing_speed, params: IDMParams):
    """IDM acceleration given the net gap to the leader, clipped to
    [-b_max, a_max]. ``gap`` is None for a free road; non-positive gaps
    return the hard-braking floor.
    """
    v_desired = max(v_desired, 0.1)
    free = 1.0 - (v / v_desired) ** params.delta
    if gap is None:
        interaction = 0.0
    else:
        if gap <= 0.0:
            return -params.b_max
        s_star = params.s0 + v * params.t_headway + \
            v * closing_speed / (2.0 * math.sqrt(params.a_max * params.b_comf))
        s_star = max(s_star, params.s0)
        interaction = (s_star / gap) ** 2
    accel = params.a_max * (free - interaction)
    return min(max(accel, -params.b_max), params.a_max)
