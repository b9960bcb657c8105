#!/usr/bin/env python3
"""Regenerate the bundled scenario JSON files from parametric geometry.

Run from the repo root:  python3 tools/gen_scenarios.py
"""

import json
import math
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "src" / "dadrl" / "scenarios"

LANE_W = 3.5
HALF = LANE_W / 2.0


def arc(center, radius, a0, a1, n=13):
    return [[center[0] + radius * math.cos(t), center[1] + radius * math.sin(t)]
            for t in [a0 + (a1 - a0) * i / (n - 1) for i in range(n)]]


def rot(points, quarter_turns):
    c = math.cos(quarter_turns * math.pi / 2.0)
    s = math.sin(quarter_turns * math.pi / 2.0)
    return [[round(x * c - y * s, 6), round(x * s + y * c, 6)] for x, y in points]


def lane(lane_id, pts, speed=10.0, index=0, width=LANE_W):
    return {"id": lane_id, "centerline": [[round(x, 6), round(y, 6)] for x, y in pts],
            "width": width, "speed_limit": speed, "index": index}


def write(name, data):
    OUT.mkdir(parents=True, exist_ok=True)
    path = OUT / f"{name}.json"
    path.write_text(json.dumps(data, indent=1) + "\n")
    print("wrote", path)


def straight():
    return {
        "name": "straight",
        "lanes": [lane("main", [[0.0, 0.0], [160.0, 0.0]], speed=13.9)],
        "adjacency": {"successors": {}},
        "ego": {
            "spawn": {"lane": "main", "offset": 4.0, "speed": 0.0},
            "route": ["main"],
            "goal": {"lane": "main", "offset": 150.0, "radius": 5.0},
        },
        "traffic": [],
        "max_steps": 600,
    }


def left_turn_t():
    turn = arc((-6.0, -6.0), 7.75, 0.0, math.pi / 2.0)
    lanes = [
        lane("south_in", [[1.75, -45.0], [1.75, -6.0]]),
        lane("south_out", [[-1.75, -6.0], [-1.75, -45.0]]),
        lane("turn_left", turn),
        lane("east_in", [[-80.0, -1.75], [-6.0, -1.75]]),
        lane("east_mid", [[-6.0, -1.75], [6.0, -1.75]]),
        lane("east_out", [[6.0, -1.75], [80.0, -1.75]]),
        lane("west_in", [[80.0, 1.75], [6.0, 1.75]]),
        lane("west_mid", [[6.0, 1.75], [-6.0, 1.75]]),
        lane("west_out", [[-6.0, 1.75], [-80.0, 1.75]]),
    ]
    return {
        "name": "left_turn_t",
        "lanes": lanes,
        "adjacency": {"successors": {
            "south_in": ["turn_left"],
            "turn_left": ["west_out"],
            "east_in": ["east_mid"], "east_mid": ["east_out"],
            "west_in": ["west_mid"], "west_mid": ["west_out"],
        }},
        "ego": {
            "spawn": {"lane": "south_in", "offset": 4.0, "speed": 0.0},
            "route": ["south_in", "turn_left", "west_out"],
            "goal": {"lane": "west_out", "offset": 50.0, "radius": 4.0},
        },
        "traffic": [
            {"route": ["east_in", "east_mid", "east_out"],
             "headway_mean_s": 7.0, "headway_jitter_s": 2.5,
             "speed_range": [7.0, 10.0]},
            {"route": ["west_in", "west_mid", "west_out"],
             "headway_mean_s": 8.0, "headway_jitter_s": 3.0,
             "speed_range": [7.0, 10.0]},
        ],
        "max_steps": 800,
    }


def roundabout(kind):
    ring_r = 12.0
    ring = {
        "ring_se": arc((0, 0), ring_r, 1.5 * math.pi, 2.0 * math.pi),
        "ring_en": arc((0, 0), ring_r, 0.0, 0.5 * math.pi),
        "ring_nw": arc((0, 0), ring_r, 0.5 * math.pi, math.pi),
        "ring_ws": arc((0, 0), ring_r, math.pi, 1.5 * math.pi),
    }
    entry_s = [[-6.0, -30.0], [-6.0, -18.0]] + arc((0.0, -18.0), 6.0,
                                                   math.pi, 0.5 * math.pi, n=8)[1:]
    exit_e = arc((18.0, 0.0), 6.0, math.pi, 0.5 * math.pi, n=8) + [[30.0, 6.0]]
    entries = {"entry_s": entry_s, "entry_e": rot(entry_s, 1),
               "entry_n": rot(entry_s, 2), "entry_w": rot(entry_s, 3)}
    exits = {"exit_e": exit_e, "exit_n": rot(exit_e, 1),
             "exit_w": rot(exit_e, 2), "exit_s": rot(exit_e, 3)}
    lanes = [lane(k, v) for k, v in {**ring, **entries, **exits}.items()]
    successors = {
        "entry_s": ["ring_se"], "entry_e": ["ring_en"],
        "entry_n": ["ring_nw"], "entry_w": ["ring_ws"],
        "ring_se": ["ring_en", "exit_e"], "ring_en": ["ring_nw", "exit_n"],
        "ring_nw": ["ring_ws", "exit_w"], "ring_ws": ["ring_se", "exit_s"],
    }
    routes = {
        "a": ["entry_s", "ring_se", "exit_e"],
        "b": ["entry_s", "ring_se", "ring_en", "exit_n"],
        "c": ["entry_s", "ring_se", "ring_en", "ring_nw", "exit_w"],
    }
    goal_lane = routes[kind][-1]
    return {
        "name": f"roundabout_{kind}",
        "lanes": lanes,
        "adjacency": {"successors": successors},
        "ego": {
            "spawn": {"lane": "entry_s", "offset": 3.0, "speed": 0.0},
            "route": routes[kind],
            "goal": {"lane": goal_lane, "offset": 16.0, "radius": 4.0},
        },
        "traffic": [
            {"route": ["entry_w", "ring_ws", "ring_se", "ring_en", "exit_n"],
             "headway_mean_s": 8.0, "headway_jitter_s": 3.0,
             "speed_range": [6.0, 9.0]},
            {"route": ["entry_n", "ring_nw", "ring_ws", "exit_s"],
             "headway_mean_s": 9.0, "headway_jitter_s": 3.0,
             "speed_range": [6.0, 9.0]},
        ],
        "max_steps": 1000,
    }


def double_merge():
    lanes = [
        lane("in_ego", [[-70.0, -6.0], [-48.0, -6.0], [-40.0, -1.75]]),
        lane("in_merge", [[-70.0, 7.75], [-48.0, 7.75], [-40.0, 1.75]], index=1),
        lane("lane_bot", [[-40.0, -1.75], [40.0, -1.75]], index=0),
        lane("lane_top", [[-40.0, 1.75], [40.0, 1.75]], index=1),
        lane("exit_bot", [[40.0, -1.75], [48.0, -6.0], [70.0, -6.0]], index=0),
        lane("exit_top", [[40.0, 1.75], [48.0, 7.75], [70.0, 7.75]], index=1),
    ]
    return {
        "name": "double_merge",
        "lanes": lanes,
        "adjacency": {
            "successors": {
                "in_ego": ["lane_bot"], "in_merge": ["lane_top"],
                "lane_bot": ["exit_bot"], "lane_top": ["exit_top"],
            },
            "left": {"lane_bot": "lane_top"},
        },
        "ego": {
            "spawn": {"lane": "in_ego", "offset": 3.0, "speed": 0.0},
            "route": ["in_ego", "lane_bot", "lane_top", "exit_top"],
            "goal": {"lane": "exit_top", "offset": 28.0, "radius": 4.0},
        },
        "progress_lanes": ["in_ego", "lane_top", "exit_top"],
        "traffic": [
            {"route": ["in_merge", "lane_top", "exit_top"],
             "headway_mean_s": 6.0, "headway_jitter_s": 2.0,
             "speed_range": [7.0, 10.0]},
            {"route": ["in_ego", "lane_bot", "exit_bot"],
             "headway_mean_s": 10.0, "headway_jitter_s": 3.0,
             "speed_range": [7.0, 9.0]},
        ],
        "max_steps": 800,
    }


def main():
    write("straight", straight())
    write("left_turn_t", left_turn_t())
    for kind in "abc":
        write(f"roundabout_{kind}", roundabout(kind))
    write("double_merge", double_merge())


if __name__ == "__main__":
    main()
