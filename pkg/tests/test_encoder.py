import types

import numpy as np
import pytest

from dadrl import numkit as nk
from dadrl.encoder import (
    EncoderConfig,
    EncoderParams,
    StateEncoder,
    attend_ego,
    encode_context,
    encode_temporal,
    fuse_state,
)
from dadrl.observation import ObservationBundle, batch_observations

from oracles import direct_conv2d, direct_layer_norm, direct_masked_attention, lstm_run


def small_config(**kw):
    defaults = dict(d=8, d_a=8, d_z=12, d_c=6, n=3, map_size=15,
                    conv_channels=(3, 4, 5))
    defaults.update(kw)
    return EncoderConfig(**defaults)


def make_params(seed=0, **kw):
    return EncoderParams(small_config(**kw), np.random.default_rng(seed))


def random_obs(rng, cfg, present=None):
    n, k = cfg.n, cfg.history_samples
    if present is None:
        present = rng.random(n) < 0.7
    mask = np.where(present, 0.0, -np.inf)
    return ObservationBundle(
        hist=rng.standard_normal((n, k, 5)),
        mask=mask,
        e1=rng.standard_normal((k, 5)),
        e2=rng.standard_normal((k, 5)),
        maps=(rng.random((2, cfg.map_size, cfg.map_size)) < 0.5).astype(np.float64),
    )


class TestEncodeTemporal:
    def test_zero_history_zero_weights_gives_zero(self):
        params = make_params()
        for name in ("stae/lstm/w_x", "stae/lstm/w_h", "stae/lstm/b"):
            params.tensors[name].data[...] = 0.0
        out = encode_temporal(params, np.zeros((3, 5, 5)))
        assert np.array_equal(out.data, np.zeros((3, 8)))

    def test_weight_sharing_equal_histories_equal_encodings(self):
        params = make_params(seed=4)
        rng = np.random.default_rng(8)
        hist = rng.standard_normal((1, 5, 5))
        two = np.concatenate([hist, hist], axis=0)
        out = encode_temporal(params, two).data
        assert np.array_equal(out[0], out[1])

    def test_wrong_sample_count_rejected(self):
        params = make_params()
        with pytest.raises(nk.ContractViolation):
            encode_temporal(params, np.zeros((1, 4, 5)))

    def test_hand_stepped_single_cell(self):
        # single-feature, hidden-size-1 cell with hand-set gate weights
        w_x = np.array([[0.7, -0.3, 1.1, 0.5]])
        w_h = np.array([[0.2, 0.4, -0.6, 0.9]])
        b = np.array([0.1, -0.2, 0.3, 0.0])
        params = types.SimpleNamespace(
            lstm_wx=nk.Tensor(w_x), lstm_wh=nk.Tensor(w_h), lstm_b=nk.Tensor(b),
            config=types.SimpleNamespace(d=1, history_samples=5))
        newest_first = np.array([1.0, 0.0, 0.0, 0.0, 0.0]).reshape(1, 5, 1)
        out = encode_temporal(params, newest_first).data[0, 0]
        expected = lstm_run(newest_first[0, ::-1], w_x, w_h, b)[0]
        assert out == pytest.approx(expected, abs=1e-14)


class TestAttendEgo:
    def test_single_present_vehicle_takes_its_value_row(self):
        params = make_params(seed=1)
        rng = np.random.default_rng(2)
        p_ego = rng.standard_normal((1, 8))
        p_sv = rng.standard_normal((1, 3, 8))
        mask = np.array([[-np.inf, 0.0, -np.inf]])
        alpha, w = attend_ego(params, nk.Tensor(p_ego), nk.Tensor(p_sv), mask)
        assert np.array_equal(w.data, [[0.0, 1.0, 0.0]])
        value_row = p_sv[0, 1] @ params.attn_wv.data
        assert np.allclose(alpha.data[0], value_row, atol=1e-14)

    def test_identical_encodings_split_evenly(self):
        params = make_params(seed=3)
        rng = np.random.default_rng(5)
        p_ego = rng.standard_normal((1, 8))
        row = rng.standard_normal(8)
        p_sv = np.stack([np.stack([row, row, row])])
        mask = np.array([[0.0, 0.0, -np.inf]])
        _, w = attend_ego(params, nk.Tensor(p_ego), nk.Tensor(p_sv), mask)
        assert np.allclose(w.data, [[0.5, 0.5, 0.0]], atol=1e-15)

    def test_matches_direct_formula_oracle(self):
        params = make_params(seed=7)
        rng = np.random.default_rng(7)
        p_ego = rng.standard_normal(8)
        p_sv = rng.standard_normal((3, 8))
        mask = np.array([0.0, 0.0, -np.inf])
        alpha, w = attend_ego(params, nk.Tensor(p_ego[None]),
                              nk.Tensor(p_sv[None]), mask[None])
        ref_alpha, ref_w = direct_masked_attention(
            p_ego, p_sv, mask, params.attn_wq.data, params.attn_wk.data,
            params.attn_wv.data)
        assert np.max(np.abs(alpha.data[0] - ref_alpha)) < 1e-12
        assert np.max(np.abs(w.data[0] - ref_w)) < 1e-12

    def test_all_masked_degenerate_path(self):
        params = make_params(seed=9)
        rng = np.random.default_rng(9)
        p_ego = rng.standard_normal((1, 8))
        p_sv = rng.standard_normal((1, 3, 8))
        mask = np.full((1, 3), -np.inf)
        alpha, w = attend_ego(params, nk.Tensor(p_ego), nk.Tensor(p_sv), mask)
        assert np.array_equal(w.data, np.zeros((1, 3)))
        assert np.array_equal(alpha.data, np.zeros((1, 8)))


class TestFuseState:
    def test_alpha_cancels_ego_gives_linear_of_ego_now(self):
        params = make_params(seed=11)
        rng = np.random.default_rng(11)
        p_ego = rng.standard_normal((1, 8))
        ego_now = rng.standard_normal((1, 10))
        z = fuse_state(params, nk.Tensor(-p_ego), nk.Tensor(p_ego), ego_now)
        fused = np.concatenate([ego_now, np.zeros((1, 8))], axis=1)
        expected = fused @ params.fuse_w.data + params.fuse_b.data
        assert np.allclose(z.data, expected, atol=1e-12)

    def test_output_length_is_d_z(self):
        params = make_params(seed=13)
        rng = np.random.default_rng(13)
        z = fuse_state(params, nk.Tensor(rng.standard_normal((4, 8))),
                       nk.Tensor(rng.standard_normal((4, 8))),
                       rng.standard_normal((4, 10)))
        assert z.shape == (4, 12)

    def test_matches_independent_composition(self):
        params = make_params(seed=17)
        rng = np.random.default_rng(17)
        alpha = rng.standard_normal(8)
        p_ego = rng.standard_normal(8)
        ego_now = rng.standard_normal(10)
        z = fuse_state(params, nk.Tensor(alpha[None]), nk.Tensor(p_ego[None]),
                       ego_now[None]).data[0]
        m = direct_layer_norm(alpha + p_ego, params.norm_gain.data,
                              params.norm_bias.data, 1e-5)
        expected = np.concatenate([ego_now, m]) @ params.fuse_w.data + params.fuse_b.data
        assert np.max(np.abs(z - expected)) < 1e-12


class TestEncodeContext:
    def test_zero_maps_zero_bias_gives_zero(self):
        params = make_params(seed=19)
        out = encode_context(params, np.zeros((2, 2, 15, 15)))
        assert np.array_equal(out.data, np.zeros((2, 6)))

    def test_output_length_independent_of_content(self):
        params = make_params(seed=23)
        rng = np.random.default_rng(23)
        for _ in range(3):
            maps = (rng.random((1, 2, 15, 15)) < 0.5).astype(np.float64)
            assert encode_context(params, maps).shape == (1, 6)

    def test_wrong_map_size_names_expected(self):
        params = make_params(seed=29)
        with pytest.raises(nk.ShapeError, match="15x15"):
            encode_context(params, np.zeros((1, 2, 16, 16)))

    def test_matches_direct_convolution_oracle(self):
        params = make_params(seed=31)
        rng = np.random.default_rng(31)
        maps = (rng.random((2, 15, 15)) < 0.5).astype(np.float64)
        out = encode_context(params, maps[None]).data[0]

        x = maps
        for i in range(1, 4):
            kern, bias = params.conv_layer(i)
            x = direct_conv2d(x, kern.data, 2) + bias.data
            x = np.maximum(x, 0.0)
        flat = x.reshape(-1)
        expected = np.maximum(flat @ params.ctx_w.data + params.ctx_b.data, 0.0)
        assert np.max(np.abs(out - expected)) < 1e-10


class TestEncode:
    def test_state_length_is_dz_plus_dc(self):
        cfg = small_config()
        enc = StateEncoder(cfg, np.random.default_rng(0))
        obs = random_obs(np.random.default_rng(1), cfg)
        assert enc.encode(obs).shape == (cfg.d_z + cfg.d_c,)

    def test_variant_dims(self):
        rng = np.random.default_rng(2)
        assert StateEncoder(small_config(variant="full"), rng).out_dim == 18
        assert StateEncoder(small_config(variant="context_free"), rng).out_dim == 12
        assert StateEncoder(small_config(variant="context_only"), rng).out_dim == 16

    def test_context_only_never_invokes_attention(self):
        cfg = small_config(variant="context_only")
        enc = StateEncoder(cfg, np.random.default_rng(3))
        enc.encode(random_obs(np.random.default_rng(4), cfg))
        assert enc.attention_calls == 0

    def test_masked_slot_equals_omitted_slot(self):
        cfg = small_config()
        enc = StateEncoder(cfg, np.random.default_rng(5))
        rng = np.random.default_rng(6)
        obs = random_obs(rng, cfg, present=np.array([True, True, False]))
        obs.hist[2] = 1e6  # absurd filler in the absent slot must not matter
        s_padded = enc.encode(obs).data

        trimmed = ObservationBundle(hist=obs.hist[:2], mask=obs.mask[:2],
                                    e1=obs.e1, e2=obs.e2, maps=obs.maps)
        s_trimmed = enc.encode(trimmed).data
        assert np.max(np.abs(s_padded - s_trimmed)) < 1e-12

    def test_permutation_invariance(self):
        cfg = small_config(n=5)
        enc = StateEncoder(cfg, np.random.default_rng(7))
        rng = np.random.default_rng(8)
        for _ in range(25):
            obs = random_obs(rng, cfg)
            perm = rng.permutation(cfg.n)
            permuted = ObservationBundle(hist=obs.hist[perm], mask=obs.mask[perm],
                                         e1=obs.e1, e2=obs.e2, maps=obs.maps)
            s0 = enc.encode(obs).data
            s1 = enc.encode(permuted).data
            assert np.max(np.abs(s0 - s1)) < 1e-12

    def test_deterministic_bitwise(self):
        cfg = small_config()
        enc = StateEncoder(cfg, np.random.default_rng(9))
        obs = random_obs(np.random.default_rng(10), cfg)
        assert np.array_equal(enc.encode(obs).data, enc.encode(obs).data)

    def test_end_to_end_gradients_match_fd(self):
        cfg = EncoderConfig(d=4, d_a=4, d_z=6, d_c=4, n=2, map_size=9,
                            conv_channels=(2, 3), history_samples=5)
        enc = StateEncoder(cfg, np.random.default_rng(11))
        obs = random_obs(np.random.default_rng(12),
                         types.SimpleNamespace(n=2, history_samples=5, map_size=9))
        batch = batch_observations([obs])
        coef = np.random.default_rng(13).standard_normal((1, enc.out_dim))

        def loss_fn():
            return nk.sum_(nk.mul(enc.encode_batch(batch), nk.Tensor(coef)))

        report = nk.grad_check(enc.named_params(), loss_fn, tolerance=1e-4)
        assert report.passed, "\n".join(report.lines())
