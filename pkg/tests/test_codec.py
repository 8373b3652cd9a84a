"""Action codec tests: encode/decode, normalization, quantization."""

import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from camact import codec, se3

from conftest import random_rigid


def sorted_quantile(values: np.ndarray, q: float) -> float:
    """Independent quantile oracle: sort + linear interpolation."""
    data = np.sort(values)
    pos = q * (len(data) - 1)
    lo = int(math.floor(pos))
    hi = min(lo + 1, len(data) - 1)
    frac = pos - lo
    return float(data[lo] * (1.0 - frac) + data[hi] * frac)


class TestEncodeDecode:
    def test_identity_action(self):
        out = codec.encode_action(se3.RigidTransform.identity(), 0.0)
        np.testing.assert_allclose(out, np.zeros(7), atol=0.0)

    def test_pure_translation(self):
        a = se3.RigidTransform(np.eye(3), [0.01, -0.02, 0.03])
        out = codec.encode_action(a, 1.0)
        np.testing.assert_allclose(out, [0.01, -0.02, 0.03, 0.0, 0.0, 0.0, 1.0], atol=0.0)

    def test_yaw_rotation_with_lift(self):
        a = se3.RigidTransform(se3.rot_z(0.1), [0.0, 0.0, 0.05])
        out = codec.encode_action(a, 0.5)
        np.testing.assert_allclose(out, [0.0, 0.0, 0.05, 0.0, 0.0, 0.1, 0.5], atol=1e-15)

    def test_decode_inverts_encode(self, rng):
        for _ in range(200):
            a = random_rigid(rng, trans_scale=0.3)
            gripper = float(rng.uniform())
            motion, g = codec.decode_action(codec.encode_action(a, gripper))
            assert np.max(np.abs(motion.rotation - a.rotation)) < 1e-9
            np.testing.assert_allclose(motion.translation, a.translation, atol=0.0)
            assert g == gripper

    def test_gripper_bit_exact_through_conjugation_chain(self, rng):
        for _ in range(50):
            a, t = random_rigid(rng), random_rigid(rng)
            gripper = float(rng.uniform())
            v = codec.encode_action(a, gripper)
            motion, g1 = codec.decode_action(v)
            cam = se3.conjugate_action(t, motion)
            v_cam = codec.encode_action(cam, g1)
            back, g2 = codec.decode_action(v_cam)
            recovered = codec.encode_action(se3.inverse_conjugate_action(t, back), g2)
            assert recovered[6] == gripper

    def test_gripper_out_of_range_rejected(self):
        with pytest.raises(ValueError):
            codec.encode_action(se3.RigidTransform.identity(), 1.5)

    def test_decode_rejects_non_finite(self):
        with pytest.raises(ValueError):
            codec.decode_action([0.0, 0.0, np.inf, 0.0, 0.0, 0.0, 0.0])


class TestFitNormalization:
    def test_constant_samples_widened(self):
        samples = np.tile([0.5, 0.0, -0.3, 0.1, 0.0, 0.2, 1.0], (10, 1))
        stats = codec.fit_normalization(samples)
        np.testing.assert_allclose(stats.lower[:6], samples[0, :6] - 1e-6, atol=0.0)
        np.testing.assert_allclose(stats.upper[:6], samples[0, :6] + 1e-6, atol=0.0)

    def test_full_range_quantiles(self):
        samples = np.stack([-np.ones(7), np.zeros(7), np.ones(7)])
        stats = codec.fit_normalization(samples, q_low=0.0, q_high=1.0)
        np.testing.assert_allclose(stats.lower[:6], -1.0, atol=0.0)
        np.testing.assert_allclose(stats.upper[:6], 1.0, atol=0.0)

    def test_uniform_quantiles_match_sorting_oracle(self, rng):
        samples = rng.uniform(-2.0, 2.0, size=(1000, 7))
        stats = codec.fit_normalization(samples, q_low=0.01, q_high=0.99)
        for dim in range(6):
            assert abs(stats.lower[dim] - sorted_quantile(samples[:, dim], 0.01)) < 1e-12
            assert abs(stats.upper[dim] - sorted_quantile(samples[:, dim], 0.99)) < 1e-12
            assert abs(stats.lower[dim] - (-1.96)) < 0.1
            assert abs(stats.upper[dim] - 1.96) < 0.1

    def test_gripper_bounds_pinned(self, rng):
        samples = rng.uniform(0.4, 0.6, size=(100, 7))
        stats = codec.fit_normalization(samples)
        assert stats.lower[6] == 0.0
        assert stats.upper[6] == 1.0

    def test_too_few_samples(self):
        with pytest.raises(ValueError):
            codec.fit_normalization(np.zeros((1, 7)))

    def test_bad_quantile_order(self, rng):
        samples = rng.uniform(size=(10, 7))
        with pytest.raises(ValueError):
            codec.fit_normalization(samples, q_low=0.9, q_high=0.1)

    def test_json_roundtrip(self, rng, tmp_path):
        stats = codec.fit_normalization(rng.uniform(-1, 1, size=(50, 7)), frame="camera")
        path = tmp_path / "stats.json"
        stats.save(path)
        loaded = codec.NormalizationStats.load(path)
        np.testing.assert_array_equal(loaded.lower, stats.lower)
        np.testing.assert_array_equal(loaded.upper, stats.upper)
        assert loaded.frame == "camera"
        assert loaded.sample_count == 50
        doc = json.loads(path.read_text())
        assert set(doc) == {"lower", "upper", "q_low", "q_high", "sample_count", "frame", "created"}


class TestNormalize:
    @pytest.fixture
    def stats(self):
        return codec.NormalizationStats(
            lower=np.array([-1.0, -2.0, -0.5, -3.0, -1.5, -2.5, 0.0]),
            upper=np.array([1.0, 0.0, 0.5, 1.0, 0.5, 1.5, 1.0]),
            q_low=0.01,
            q_high=0.99,
            sample_count=100,
        )

    def test_lower_maps_to_minus_one(self, stats):
        np.testing.assert_allclose(codec.normalize(stats.lower, stats), -np.ones(7), atol=0.0)

    def test_midpoint_maps_to_zero(self, stats):
        mid = (stats.lower + stats.upper) / 2.0
        np.testing.assert_allclose(codec.normalize(mid, stats), np.zeros(7), atol=1e-15)

    def test_beyond_upper_clips_and_denormalizes_to_upper(self, stats):
        v = stats.upper + 1.0
        n = codec.normalize(v, stats)
        np.testing.assert_allclose(n, np.ones(7), atol=0.0)
        np.testing.assert_allclose(codec.denormalize(n, stats), stats.upper, atol=0.0)

    def test_mutually_inverse_on_interior(self, stats, rng):
        for _ in range(100):
            v = rng.uniform(stats.lower, stats.upper)
            back = codec.denormalize(codec.normalize(v, stats), stats)
            assert np.max(np.abs(back - v)) < 1e-12

    def test_batch_shape_passthrough(self, stats, rng):
        v = rng.uniform(stats.lower, stats.upper, size=(20, 7))
        n = codec.normalize(v, stats)
        assert n.shape == (20, 7)
        row = codec.normalize(v[3], stats)
        np.testing.assert_array_equal(n[3], row)


class TestQuantize:
    def test_lower_boundary(self):
        tokens = codec.quantize(np.full(7, -1.0))
        assert np.all(tokens == 0)

    def test_upper_boundary_clamped(self):
        tokens = codec.quantize(np.full(7, 1.0))
        assert np.all(tokens == 255)

    def test_center_token_and_dequantized_value(self):
        # floor((0 + 1)/2 * 256) = 128; center of bin 128 is -1 + 257/256.
        tokens = codec.quantize(np.zeros(7))
        assert np.all(tokens == 128)
        np.testing.assert_allclose(codec.dequantize(tokens), np.full(7, 1.0 / 256.0), atol=0.0)

    def test_rejects_unnormalized(self):
        with pytest.raises(ValueError):
            codec.quantize(np.full(7, 1.5))

    def test_tolerates_rounding_slack(self):
        tokens = codec.quantize(np.full(7, 1.0 + 5e-10))
        assert np.all(tokens == 255)

    @given(
        value=st.floats(-1.0, 1.0, allow_nan=False),
        bins=st.integers(2, 4096),
    )
    @settings(max_examples=300)
    def test_quantization_error_bound(self, value, bins):
        # Exactly at a bin edge the error equals the half-width; for
        # non-dyadic bin counts rounding can tip that by an ulp.
        config = codec.BinConfig(bins)
        n = np.full(7, value)
        back = codec.dequantize(codec.quantize(n, config), config)
        assert np.max(np.abs(back - n)) <= 1.0 / bins + 1e-15

    def test_dense_sweep_error_bound(self):
        config = codec.BinConfig(256)
        grid = np.linspace(-1.0, 1.0, 10000)
        n = np.stack([grid] * 7, axis=1)
        back = codec.dequantize(codec.quantize(n, config), config)
        assert np.max(np.abs(back - n)) <= 1.0 / 256.0

    def test_token_monotonicity(self):
        grid = np.linspace(-1.0, 1.0, 5001)
        tokens = codec.quantize(np.stack([grid] * 7, axis=1))[:, 0]
        assert np.all(np.diff(tokens) >= 0)

    def test_bins_lower_bound(self):
        with pytest.raises(ValueError):
            codec.BinConfig(1)

    def test_dequantize_rejects_out_of_range_tokens(self):
        with pytest.raises(ValueError):
            codec.dequantize(np.full(7, 256))


class TestEndToEnd:
    def test_tokenize_detokenize_error_bounded(self, rng):
        samples = rng.uniform(-0.2, 0.2, size=(500, 7))
        samples[:, 6] = rng.uniform(0.0, 1.0, size=500)
        stats = codec.fit_normalization(samples, q_low=0.0, q_high=1.0)
        config = codec.BinConfig(256)
        tokens = codec.tokenize_action(samples, stats, config)
        back = codec.detokenize_action(tokens, stats, config)
        half_bin = (stats.upper - stats.lower) / 256.0
        assert np.all(np.abs(back - samples) <= half_bin + 1e-12)
