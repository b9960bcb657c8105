"""The deterministic traffic simulator: ego, rule-based flows, observations.

One instance is single-threaded and owned by one rollout worker; instances
share nothing mutable. All randomness flows from the reset seed through
per-flow numpy generators, so (scenario, seed, command sequence) fully
determines every trajectory, observation, and event.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .. import numkit as nk
from ..observation import ObservationBundle
from .bev import rasterize_bev
from .control import ControlConfig, MidLevelController
from .events import StepEvents, detect_events
from .geometry import point_at, project_point, project_points, to_ego_frame, wrap_angle
from .idm import IDMParams, idm_acceleration
from .vehicle import BackgroundVehicle, EgoCommand, VehicleState, bicycle_step


@dataclass
class SimConfig:
    dt: float = 0.1
    n_slots: int = 8
    sensor_range: float = 50.0
    map_size: int = 64
    resolution: float = 0.5
    history_samples: int = 5
    history_stride: int = 5
    stagnation_window_s: float = 10.0
    stagnation_distance: float = 0.5
    spawn_clearance: float = 10.0
    leader_lookahead: float = 60.0
    lateral_conflict: float = 0.7    # fraction of lane width counted as blocking
    idm: IDMParams = field(default_factory=IDMParams)
    control: ControlConfig = field(default_factory=ControlConfig)

    @property
    def stagnation_steps(self):
        return int(round(self.stagnation_window_s / self.dt))

    @property
    def history_span(self):
        return (self.history_samples - 1) * self.history_stride + 1


class _FlowState:
    def __init__(self, flow, graph, seed, flow_index):
        self.flow = flow
        self.points, self.cum = graph.route_polyline(flow.route)
        self.length = float(self.cum[-1])
        starts = []
        s = 0.0
        for lane_id in flow.route:
            starts.append((lane_id, s))
            s += graph.lane(lane_id).length
        self.lane_starts = starts
        self.headway_rng = np.random.default_rng(
            np.random.SeedSequence((seed, flow_index, 0)))
        self.speed_rng = np.random.default_rng(
            np.random.SeedSequence((seed, flow_index, 1)))
        self.next_spawn_time = 0.0
        self.spawn_count = 0
        self.lane_width = graph.lane(flow.route[0]).width

    def draw_headway(self):
        jitter = self.flow.headway_jitter_s
        draw = self.flow.headway_mean_s + jitter * self.headway_rng.uniform(-1.0, 1.0)
        return max(draw, 1.0)

    def draw_speed(self):
        lo, hi = self.flow.speed_range
        return self.speed_rng.uniform(lo, hi)

    def lane_at(self, route_s, graph):
        lane_id, start = self.lane_starts[0]
        for cand, s0 in self.lane_starts:
            if route_s >= s0:
                lane_id, start = cand, s0
        return lane_id, route_s - start


class TrafficSim:
    def __init__(self, scenario, config: SimConfig = None):
        self.scenario = scenario
        self.config = config or SimConfig()
        self.route_set = frozenset(scenario.ego_route)
        graph = scenario.graph
        adj = set()
        for lane_id in scenario.ego_route:
            for side in (graph.left.get(lane_id), graph.right.get(lane_id)):
                if side:
                    adj.add(side)
        self.route_prefer = frozenset(self.route_set | adj)
        self.lane_polygons = [lane.polygon for lane in graph.lanes.values()]
        self.done = False
        self.outcome = None
        self._was_reset = False

    # ------------------------------------------------------------------ reset

    def reset(self, seed):
        scen = self.scenario
        cfg = self.config
        self.seed = int(seed)
        self.time = 0.0
        self.step_count = 0
        self.done = False
        self.outcome = None
        self._was_reset = True
        self._next_vid = 1
        self._stagnation_last_fire = -cfg.stagnation_steps

        lane = scen.graph.lane(scen.ego_spawn_lane)
        (x, y), heading = lane.point_at(scen.ego_spawn_offset)
        self.ego = VehicleState(x=x, y=y, heading=heading,
                                speed=scen.ego_spawn_speed,
                                lane_id=scen.ego_spawn_lane,
                                lane_s=scen.ego_spawn_offset)
        self.controller = MidLevelController(scen.graph, scen.ego_route,
                                             cfg.control)
        self.vehicles: list[BackgroundVehicle] = []
        self.flows = [_FlowState(f, scen.graph, self.seed, i)
                      for i, f in enumerate(scen.flows)]
        for fs in self.flows:
            self._prefill_flow(fs)
            fs.next_spawn_time = self.time + fs.draw_headway()

        self.progress_s, _, _ = project_point(
            scen.progress_points, scen.progress_cum, np.array([x, y]))
        self.progress_delta = 0.0
        self.positions = [(x, y)]
        self.last_jerk = 0.0
        self.last_yaw_acc = 0.0
        self.ego_history = [self._ego_sample(jerk=0.0)]
        return self.observe()

    def _ego_sample(self, jerk):
        ego = self.ego
        lane_id, _, _ = self.scenario.graph.find_lane(
            np.array([ego.x, ego.y]), prefer=self.route_prefer)
        lane_index = self.scenario.graph.lane(lane_id).index if lane_id else -1
        return (ego.x, ego.y, ego.heading, ego.speed, float(lane_index),
                ego.steering, ego.yaw_rate, ego.accel, jerk)

    def _prefill_flow(self, fs):
        """Populate the route at reset so traffic exists from step one.

        Placement walks back from the route end using the same seeded headway
        and speed streams as mid-episode spawning; draws near the ego spawn
        are consumed but not placed.
        """
        cfg = self.config
        s = fs.length - cfg.spawn_clearance
        ego_pos = np.array([self.ego.x, self.ego.y])
        while s > cfg.spawn_clearance:
            desired = fs.draw_speed()
            gap = max(desired * fs.draw_headway(), cfg.idm.s0 + 6.0)
            pos, _ = point_at(fs.points, fs.cum, s)
            if np.linalg.norm(pos - ego_pos) > cfg.spawn_clearance:
                self._spawn_vehicle(fs, s, desired)
            s -= gap

    def _spawn_vehicle(self, fs, route_s, desired_speed):
        (x, y), heading = point_at(fs.points, fs.cum, route_s)
        lane_id, lane_s = fs.lane_at(route_s, self.scenario.graph)
        state = VehicleState(
            x=x, y=y, heading=heading,
            speed=desired_speed * fs.flow.initial_speed_factor,
            lane_id=lane_id, lane_s=lane_s)
        veh = BackgroundVehicle(
            vid=self._next_vid, state=state,
            flow_index=self.flows.index(fs),
            route_s=route_s, desired_speed=desired_speed)
        lane_index = self.scenario.graph.lane(lane_id).index
        veh.history.append((x, y, heading, desired_speed *
                            fs.flow.initial_speed_factor, float(lane_index)))
        self._next_vid += 1
        fs.spawn_count += 1
        self.vehicles.append(veh)

    # ------------------------------------------------------------------- step

    def step(self, command: EgoCommand):
        if not self._was_reset:
            raise nk.ContractViolation("step before reset")
        if self.done:
            raise nk.ContractViolation("step after terminal state")
        cfg = self.config

        # phase 1: all control decisions read the same pre-step snapshot
        prev_accel = self.ego.accel
        prev_yaw_rate = self.ego.yaw_rate
        accel, steer = self.controller.control(self.ego, command)
        flow_proj = self._flow_projections()
        # flow_index None marks scripted/parked vehicles (test fixtures)
        bg_accels = [self._idm_accel(v, flow_proj) if v.flow_index is not None
                     else 0.0 for v in self.vehicles]

        # phase 2: integrate everyone
        bicycle_step(self.ego, accel, steer, cfg.dt, cfg.control.wheelbase)
        self.controller.advance(self.ego)
        self.ego.lane_id = self.controller.active_lane
        survivors = []
        for veh, a in zip(self.vehicles, bg_accels):
            if veh.flow_index is None:
                survivors.append(veh)
                continue
            st = veh.state
            st.accel = a
            st.speed = min(max(st.speed + a * cfg.dt, 0.0), veh.desired_speed)
            veh.route_s += st.speed * cfg.dt
            fs = self.flows[veh.flow_index]
            if veh.route_s >= fs.length:
                continue
            (st.x, st.y), st.heading = point_at(fs.points, fs.cum, veh.route_s)
            st.lane_id, st.lane_s = fs.lane_at(veh.route_s, self.scenario.graph)
            survivors.append(veh)
        self.vehicles = survivors

        # phase 3: clock and seeded spawning
        self.time += cfg.dt
        self.step_count += 1
        for fs in self.flows:
            if self.time >= fs.next_spawn_time and self._spawn_clear(fs):
                desired = fs.draw_speed()
                self._spawn_vehicle(fs, 0.0, desired)
                fs.next_spawn_time = self.time + fs.draw_headway()

        # phase 4: ego bookkeeping, histories, comfort signals
        scen = self.scenario
        s_now, _, _ = project_point(scen.progress_points, scen.progress_cum,
                                    np.array([self.ego.x, self.ego.y]))
        self.progress_delta = s_now - self.progress_s
        self.progress_s = s_now
        self.positions.append((self.ego.x, self.ego.y))
        window = cfg.stagnation_steps
        if len(self.positions) > window + 1:
            del self.positions[:len(self.positions) - (window + 1)]
        self.last_jerk = (self.ego.accel - prev_accel) / cfg.dt
        self.last_yaw_acc = (self.ego.yaw_rate - prev_yaw_rate) / cfg.dt
        self.ego_history.append(self._ego_sample(jerk=self.last_jerk))
        span = cfg.history_span
        if len(self.ego_history) > span:
            del self.ego_history[:len(self.ego_history) - span]
        for veh in self.vehicles:
            st = veh.state
            lane_index = (self.scenario.graph.lane(st.lane_id).index
                          if st.lane_id else -1)
            veh.history.append((st.x, st.y, st.heading, st.speed,
                                float(lane_index)))
            if len(veh.history) > span:
                del veh.history[:len(veh.history) - span]

        # phase 5: events and termination
        events = detect_events(self)
        if events.crash:
            self.done, self.outcome = True, "collision"
        elif events.offroad:
            self.done, self.outcome = True, "offroad"
        elif events.reached_goal:
            self.done, self.outcome = True, "success"
        elif self.step_count >= scen.max_steps:
            self.done = True
            self.outcome = "stagnation" if self._trailing_stagnant() else "timeout"
        return self.observe(), events

    def _spawn_clear(self, fs):
        clearance = self.config.spawn_clearance
        for veh in self.vehicles:
            if veh.flow_index == self.flows.index(fs) and veh.route_s < clearance:
                return False
        start, _ = point_at(fs.points, fs.cum, 0.0)
        if math.hypot(self.ego.x - start[0], self.ego.y - start[1]) < clearance:
            return False
        return True

    def _flow_projections(self):
        """Per flow: projection of every vehicle (ego first) onto its route."""
        positions = [np.array([self.ego.x, self.ego.y])]
        speeds = [self.ego.speed]
        headings = [self.ego.heading]
        lengths = [self.ego.length]
        for veh in self.vehicles:
            positions.append(np.array([veh.state.x, veh.state.y]))
            speeds.append(veh.state.speed)
            headings.append(veh.state.heading)
            lengths.append(veh.state.length)
        pts = np.asarray(positions)
        out = []
        for fs in self.flows:
            s, lat, _ = project_points(fs.points, fs.cum, pts)
            out.append((s, lat, np.asarray(speeds), np.asarray(headings),
                        np.asarray(lengths)))
        return out

    def _idm_accel(self, veh, flow_proj):
        cfg = self.config
        fs = self.flows[veh.flow_index]
        s_arr, lat_arr, speeds, headings, lengths = flow_proj[veh.flow_index]
        limit = fs.lane_width * cfg.lateral_conflict
        best_gap = None
        best_closing = 0.0
        my_s = veh.route_s
        my_half = veh.state.length / 2.0
        # index 0 is the ego; background vehicles follow it when it blocks
        for i in range(len(s_arr)):
            if i != 0 and self.vehicles[i - 1] is veh:
                continue
            if i != 0 and self.vehicles[i - 1].flow_index == veh.flow_index:
                s_other = self.vehicles[i - 1].route_s
            else:
                if abs(lat_arr[i]) > limit:
                    continue
                s_other = s_arr[i]
            if s_other <= my_s:
                continue
            gap = s_other - my_s - lengths[i] / 2.0 - my_half
            if gap > cfg.leader_lookahead:
                continue
            if best_gap is None or gap < best_gap:
                _, tangent = point_at(fs.points, fs.cum, s_other)
                along = speeds[i] * math.cos(headings[i] - tangent)
                best_gap = gap
                best_closing = veh.state.speed - along
        return idm_acceleration(veh.state.speed, veh.desired_speed,
                                best_gap, best_closing, cfg.idm)

    # ----------------------------------------------------------- observations

    def _trailing_stagnant(self):
        window = self.config.stagnation_steps
        if len(self.positions) <= window:
            return False
        x0, y0 = self.positions[0]
        x1, y1 = self.positions[-1]
        return math.hypot(x1 - x0, y1 - y0) < self.config.stagnation_distance

    def consume_stagnation_event(self):
        """True once per full stagnant window, then re-arms."""
        if not self._trailing_stagnant():
            return False
        if self.step_count - self._stagnation_last_fire < self.config.stagnation_steps:
            return False
        self._stagnation_last_fire = self.step_count
        return True

    def _sample_history(self, entries, width):
        """Newest-first samples at the configured stride, oldest repeated."""
        cfg = self.config
        out = np.empty((cfg.history_samples, width))
        last = len(entries) - 1
        for k in range(cfg.history_samples):
            idx = max(last - k * cfg.history_stride, 0)
            out[k] = entries[idx][:width]
        return out

    def observe(self):
        cfg = self.config
        ego = self.ego
        in_range = []
        for veh in self.vehicles:
            d = math.hypot(veh.state.x - ego.x, veh.state.y - ego.y)
            if d <= cfg.sensor_range:
                in_range.append((d, veh.vid, veh))
        in_range.sort(key=lambda t: (t[0], t[1]))
        selected = [t[2] for t in in_range[:cfg.n_slots]]

        k = cfg.history_samples
        hist = np.zeros((cfg.n_slots, k, 5))
        mask = np.full(cfg.n_slots, -np.inf)
        for slot, veh in enumerate(selected):
            raw = self._sample_history(veh.history, 5)
            rel = to_ego_frame(raw[:, :2], (ego.x, ego.y), ego.heading)
            hist[slot, :, 0] = rel[:, 0]
            hist[slot, :, 1] = rel[:, 1]
            hist[slot, :, 2] = [wrap_angle(h - ego.heading) for h in raw[:, 2]]
            hist[slot, :, 3] = raw[:, 3]
            hist[slot, :, 4] = raw[:, 4]
            mask[slot] = 0.0

        raw_ego = self._sample_history(self.ego_history, 9)
        e1 = np.zeros((k, 5))
        rel = to_ego_frame(raw_ego[:, :2], (ego.x, ego.y), ego.heading)
        e1[:, 0] = rel[:, 0]
        e1[:, 1] = rel[:, 1]
        e1[:, 2] = [wrap_angle(h - ego.heading) for h in raw_ego[:, 2]]
        e1[:, 3] = raw_ego[:, 3]
        e1[:, 4] = raw_ego[:, 4]
        # steering, yaw_rate, speed, accel, jerk
        e2 = np.column_stack([raw_ego[:, 5], raw_ego[:, 6], raw_ego[:, 3],
                              raw_ego[:, 7], raw_ego[:, 8]])

        maps = rasterize_bev(self.lane_polygons, self.scenario.progress_points,
                             (ego.x, ego.y), ego.heading, cfg.map_size,
                             cfg.resolution, route_done_s=self.progress_s,
                             route_cum=self.scenario.progress_cum)
        return ObservationBundle(hist=hist, mask=mask, e1=e1, e2=e2, maps=maps)

    def state_records(self):
        """(vehicle id, x, y, heading, speed) rows, ego first."""
        rows = [(0, self.ego.x, self.ego.y, self.ego.heading, self.ego.speed)]
        for veh in self.vehicles:
            st = veh.state
            rows.append((veh.vid, st.x, st.y, st.heading, st.speed))
        return rows
