"""Cross-module contract checks that did not fit a single module's suite."""

import json

import numpy as np
import pytest

from dadrl import numkit as nk
from dadrl.encoder import EncoderConfig, EncoderParams, StateEncoder, attend_ego, encode_temporal
from dadrl.harness import (
    EpisodeRecord,
    build_composite,
    record_rollout,
    replay_log,
    run_ablation,
    summarize,
)
from dadrl.harness.config import config_from_dict
from dadrl.sim import EgoCommand, LaneCommand, SimConfig, TrafficSim, load_scenario
from dadrl.sim.vehicle import BackgroundVehicle, VehicleState

from support import random_obs, tiny_config


class TestGradCheckCoverage:
    def test_lstm_cell_passes_gradcheck(self):
        cfg = EncoderConfig(d=5, d_a=5, d_z=6, d_c=4, n=2, map_size=15,
                            conv_channels=(2, 2, 2))
        params = EncoderParams(cfg, np.random.default_rng(3))
        rng = np.random.default_rng(4)
        seq = rng.standard_normal((3, cfg.history_samples, 5))
        coef = rng.standard_normal((3, 5))
        lstm_params = {name: params.tensors[name] for name in
                       ("stae/lstm/w_x", "stae/lstm/w_h", "stae/lstm/b")}

        def loss_fn():
            return nk.sum_(nk.mul(encode_temporal(params, seq), nk.Tensor(coef)))

        report = nk.grad_check(lstm_params, loss_fn, tolerance=1e-4)
        assert report.passed, "\n".join(report.lines())

    def test_composite_report_lists_every_parameter(self):
        params, loss_fn = build_composite(0)
        report = nk.grad_check(params, loss_fn, tolerance=1e-4,
                               max_elements_per_param=2)
        assert [e.name for e in report.entries] == list(params)


class TestFiniteChecks:
    def test_debug_mode_catches_nonfinite_forward(self):
        nk.set_finite_checks(True)
        try:
            with np.errstate(invalid="ignore"):
                with pytest.raises(FloatingPointError):
                    nk.log(nk.Tensor([-1.0]))
        finally:
            nk.set_finite_checks(False)

    def test_encoder_forward_finite_on_finite_inputs(self):
        nk.set_finite_checks(True)
        try:
            cfg = tiny_config()
            enc = StateEncoder(cfg, np.random.default_rng(0))
            obs = random_obs(np.random.default_rng(1), cfg)
            s = enc.encode(obs)
            assert np.all(np.isfinite(s.data))
        finally:
            nk.set_finite_checks(False)


class TestAttentionWeightBounds:
    def test_weights_in_unit_interval_and_sum_one(self):
        rng = np.random.default_rng(5)
        cfg = tiny_config(n=5)
        params = EncoderParams(cfg, rng)
        for _ in range(100):
            p_ego = rng.standard_normal((1, cfg.d))
            p_sv = rng.standard_normal((1, 5, cfg.d)) * 3
            present = rng.random(5) < 0.6
            mask = np.where(present, 0.0, -np.inf)[None, :]
            _, w = attend_ego(params, nk.Tensor(p_ego), nk.Tensor(p_sv), mask)
            data = w.data[0]
            assert np.all(data >= 0.0) and np.all(data <= 1.0)
            if present.any():
                assert abs(data.sum() - 1.0) <= 1e-12
            else:
                assert np.all(data == 0.0)


class TestEventContracts:
    def test_crash_and_goal_mutually_exclusive(self):
        sim = TrafficSim(load_scenario("straight"), SimConfig())
        sim.reset(0)
        goal = sim.scenario.goal_center
        sim.ego.x, sim.ego.y = goal[0], goal[1]
        state = VehicleState(x=goal[0], y=goal[1], heading=0.0, speed=0.0)
        veh = BackgroundVehicle(vid=700, state=state, flow_index=None,
                                route_s=0.0, desired_speed=1.0)
        veh.history.append((state.x, state.y, 0.0, 0.0, 0.0))
        sim.vehicles.append(veh)
        _, events = sim.step(EgoCommand(0.5, LaneCommand.KEEP))
        assert events.crash and not events.reached_goal
        assert sim.outcome == "collision"

    def test_replay_detects_corrupted_event_record(self, tmp_path):
        cmds = [EgoCommand(9.0, LaneCommand.KEEP)] * 60
        path = tmp_path / "log.jsonl"
        record_rollout("straight", 2, cmds, path)
        lines = path.read_text().splitlines()
        for i, line in enumerate(lines):
            rec = json.loads(line)
            if rec.get("type") == "events" and rec["step"] == 30:
                rec["wrong_way"] = True
                lines[i] = json.dumps(rec)
        path.write_text("\n".join(lines) + "\n")
        report = replay_log(path)
        assert not report.clean
        assert report.first_divergence == 30
        assert "wrong_way" in report.detail


class TestAggregation:
    def test_order_independent(self):
        rng = np.random.default_rng(9)
        outcomes = ["success", "collision", "stagnation", "timeout", "offroad"]
        records = [EpisodeRecord(episode=i, seed=i, outcome=outcomes[i % 5],
                                 steps=100 + i, progress_frac=rng.random(),
                                 mean_abs_jerk=rng.random(),
                                 mean_abs_angacc=rng.random(),
                                 violated=bool(i % 2)) for i in range(25)]
        shuffled = list(records)
        rng.shuffle(shuffled)
        assert summarize(records) == summarize(shuffled)

    def test_outcome_rates_partition_to_100(self):
        rng = np.random.default_rng(10)
        outcomes = ["success", "collision", "stagnation", "timeout", "offroad"]
        records = [EpisodeRecord(episode=i, seed=i,
                                 outcome=outcomes[rng.integers(5)],
                                 steps=10, progress_frac=0.5,
                                 mean_abs_jerk=0, mean_abs_angacc=0)
                   for i in range(40)]
        s = summarize(records)
        other = (sum(1 for r in records if r.outcome in ("timeout", "offroad"))
                 / len(records) * 100.0)
        assert s["succ_pct"] + s["coll_pct"] + s["stag_pct"] + other == \
            pytest.approx(100.0, abs=1e-12)


class TestAblationDeterminism:
    def test_two_runs_identical_combined_csv(self, tmp_path):
        def run(sub):
            cfg = config_from_dict({
                "encoder": {"d": 8, "d_a": 8, "d_z": 10, "d_c": 6, "n": 3,
                            "map_size": 16, "conv_channels": [2, 3]},
                "rl": {"batch_size": 8, "buffer_capacity": 1000, "warmup": 30,
                       "update_every": 16, "hidden": [16]},
                "run": {"scenario": "straight", "seed": 5, "workers": 1,
                        "total_steps": 100, "eval_episodes": 2,
                        "out_dir": str(tmp_path / sub),
                        "early_stop_success": 0.0},
            })
            run_ablation(cfg, tmp_path / sub)
            return (tmp_path / sub / "ablation.csv").read_bytes()

        assert run("a") == run("b")
