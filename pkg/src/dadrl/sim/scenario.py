"""Scenario files: lane graph, ego mission, traffic flows, episode budget."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .lane_graph import Lane, LaneGraph, LaneGraphError


class ScenarioError(ValueError):
    pass


@dataclass
class TrafficFlow:
    route: list
    headway_mean_s: float
    headway_jitter_s: float
    speed_range: tuple
    initial_speed_factor: float = 0.8


@dataclass
class Scenario:
    name: str
    graph: LaneGraph
    ego_spawn_lane: str
    ego_spawn_offset: float
    ego_spawn_speed: float
    ego_route: list
    goal_lane: str
    goal_offset: float
    goal_radius: float
    flows: list = field(default_factory=list)
    max_steps: int = 600
    progress_lanes: list = None  # route used for arc-length progress; defaults to ego_route

    def __post_init__(self):
        if self.progress_lanes is None:
            self.progress_lanes = list(self.ego_route)
        self._validate()
        self.goal_center, _ = self.graph.lane(self.goal_lane).point_at(self.goal_offset)
        self.progress_points, self.progress_cum = self.graph.route_polyline(
            self.progress_lanes)

    def _validate(self):
        for lane_id in self.ego_route:
            if lane_id not in self.graph.lanes:
                raise ScenarioError(f"route lane {lane_id!r} not in lane graph")
        for a, b in zip(self.ego_route, self.ego_route[1:]):
            if not self.graph.connected(a, b):
                raise ScenarioError(
                    f"ego route not connected: {a!r} -> {b!r} is neither a "
                    "successor link nor a lane adjacency")
        if self.goal_lane != self.ego_route[-1]:
            raise ScenarioError("goal lane must be the final route lane")
        lane = self.graph.lane(self.goal_lane)
        center, _ = lane.point_at(self.goal_offset)
        _, lateral, _ = lane.project(center)
        if abs(lateral) > lane.width / 2.0 + self.goal_radius:
            raise ScenarioError("goal region does not intersect the final route lane")
        if self.ego_spawn_lane not in self.graph.lanes:
            raise ScenarioError(f"spawn lane {self.ego_spawn_lane!r} unknown")
        if self.max_steps < 1:
            raise ScenarioError("max_steps must be >= 1")
        for flow in self.flows:
            for a, b in zip(flow.route, flow.route[1:]):
                if b not in self.graph.successors.get(a, ()):
                    raise ScenarioError(
                        f"traffic flow route not successor-connected: {a!r} -> {b!r}")


def scenario_from_dict(raw, name="scenario"):
    try:
        lanes = [Lane(entry["id"], entry["centerline"], entry["width"],
                      entry["speed_limit"], entry.get("index", 0))
                 for entry in raw["lanes"]]
        adjacency = raw.get("adjacency", {})
        graph = LaneGraph(lanes,
                          successors=adjacency.get("successors", {}),
                          left=adjacency.get("left", {}),
                          right=adjacency.get("right", {}))
        ego = raw["ego"]
        flows = [TrafficFlow(route=list(f["route"]),
                             headway_mean_s=float(f["headway_mean_s"]),
                             headway_jitter_s=float(f.get("headway_jitter_s", 0.0)),
                             speed_range=tuple(f["speed_range"]))
                 for f in raw.get("traffic", [])]
        return Scenario(
            name=raw.get("name", name),
            graph=graph,
            ego_spawn_lane=ego["spawn"]["lane"],
            ego_spawn_offset=float(ego["spawn"].get("offset", 0.0)),
            ego_spawn_speed=float(ego["spawn"].get("speed", 0.0)),
            ego_route=list(ego["route"]),
            goal_lane=ego["goal"]["lane"],
            goal_offset=float(ego["goal"]["offset"]),
            goal_radius=float(ego["goal"].get("radius", 4.0)),
            flows=flows,
            max_steps=int(raw.get("max_steps", 600)),
            progress_lanes=raw.get("progress_lanes"),
        )
    except (KeyError, TypeError, LaneGraphError) as exc:
        raise ScenarioError(f"invalid scenario {name!r}: {exc}") from exc


def load_scenario(spec):
    """Load a scenario from a file path or a bundled scenario name."""
    path = Path(spec)
    if path.suffix == ".json" and path.exists():
        raw = json.loads(path.read_text())
        return scenario_from_dict(raw, name=path.stem)
    pkg_files = resources.files("dadrl.scenarios")
    candidate = pkg_files / f"{spec}.json"
    if candidate.is_file():
        raw = json.loads(candidate.read_text())
        return scenario_from_dict(raw, name=str(spec))
    raise ScenarioError(f"scenario {spec!r} not found (no such file or bundled name)")


def bundled_scenarios():
    pkg_files = resources.files("dadrl.scenarios")
    return sorted(p.name[:-5] for p in pkg_files.iterdir()
                  if p.name.endswith(".json"))
