"""Dense reward: weighted sum of safety penalties, speed, goal and progress."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass
class RewardConfig:
    lam_crash: float = 10.0
    lam_road: float = 5.0
    lam_speed: float = 0.5
    lam_goal: float = 10.0
    lam_prog: float = 1.0
    lam_oroute: float = 2.0
    lam_ww: float = 2.0
    lam_slow: float = 2.0
    v_max: float = 13.9          # m/s
    progress_scale: float = 1.0  # 1/m

    def __post_init__(self):
        for name in ("lam_crash", "lam_road", "lam_speed", "lam_goal",
                     "lam_prog", "lam_oroute", "lam_ww", "lam_slow"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")


def compute_reward(events, ego, cfg: RewardConfig):
    """Pure function of (events, ego state, config).

    Event terms are -1 when their event fires, the goal term is +1 on goal,
    progress is metric distance advanced toward the goal, and the speed term
    rewards v/V_max below the limit and penalizes the normalized excess
    above it.
    """
    v = ego.speed
    if v < cfg.v_max:
        r_speed = v / cfg.v_max
    else:
        r_speed = -abs(v - cfg.v_max) / cfg.v_max
    r_crash = -1.0 if events.crash else 0.0
    r_road = -1.0 if events.offroad else 0.0
    r_goal = 1.0 if events.reached_goal else 0.0
    r_prog = events.progress_delta * cfg.progress_scale
    r_oroute = -1.0 if events.offroute else 0.0
    r_ww = -1.0 if events.wrong_way else 0.0
    r_slow = -1.0 if events.stagnant else 0.0
    return (cfg.lam_crash * r_crash + cfg.lam_road * r_road
            + cfg.lam_speed * r_speed + cfg.lam_goal * r_goal
            + cfg.lam_prog * r_prog + cfg.lam_oroute * r_oroute
            + cfg.lam_ww * r_ww + cfg.lam_slow * r_slow)
