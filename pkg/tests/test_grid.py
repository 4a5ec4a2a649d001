"""Numerology, targets, frames, vectorization, and transform oracles."""
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from otfs_sensing.errors import ConfigError, DomainError, ShapeError
from otfs_sensing.grid import (QAM16, SPEED_OF_LIGHT, SensingTarget,
                               devectorize, isfft, make_config,
                               random_dd_frame, sfft, target_params, vectorize)


def sfft_double_sum(frame):
    """Literal double-sum transform, the oracle for the fast path."""
    m, n = frame.shape
    out = np.zeros((n, m), dtype=complex)
    for nn in range(n):
        for mm in range(m):
            for k in range(m):
                for l in range(n):
                    out[nn, mm] += frame[k, l] * np.exp(
                        -2j * np.pi * (mm * k / m - nn * l / n))
    return out


def isfft_double_sum(tf):
    m = tf.shape[1]
    n = tf.shape[0]
    out = np.zeros((m, n), dtype=complex)
    for k in range(m):
        for l in range(n):
            for nn in range(n):
                for mm in range(m):
                    out[k, l] += tf[nn, mm] * np.exp(
                        2j * np.pi * (mm * k / m - nn * l / n))
    return out / (n * m)


class TestConfig:
    def test_80211p_numerology(self):
        cfg = make_config(5.89e9, 156.25e3, 64, 50)
        assert cfg.symbol_time == pytest.approx(6.4e-6, rel=1e-12)
        assert cfg.symbol_time == 1.0 / cfg.subcarrier_spacing
        assert cfg.bandwidth == 10e6
        assert cfg.grid_size == 3200

    def test_alternate_numerology(self):
        cfg = make_config(28e9, 120e3, 16, 8)
        assert cfg.symbol_time == 1.0 / 120e3
        assert cfg.bandwidth == pytest.approx(1.92e6, rel=1e-12)

    @pytest.mark.parametrize("kwargs, field", [
        (dict(carrier_freq=0.0), "carrier_freq"),
        (dict(subcarrier_spacing=-1.0), "subcarrier_spacing"),
        (dict(num_subcarriers=1), "num_subcarriers"),
        (dict(num_slots=1), "num_slots"),
        (dict(modulation="qpsk"), "modulation"),
    ])
    def test_rejects_bad_field_by_name(self, kwargs, field):
        args = dict(carrier_freq=5.89e9, subcarrier_spacing=156.25e3,
                    num_subcarriers=64, num_slots=50)
        args.update(kwargs)
        with pytest.raises(ConfigError, match=field):
            make_config(**args)


class TestTargetParams:
    def test_vehicular_target(self):
        cfg = make_config(5.89e9, 156.25e3, 64, 50)
        tau, doppler, h_prime = target_params(SensingTarget(20.0, 80 / 3.6), cfg)
        assert tau == 2 * 20.0 / SPEED_OF_LIGHT
        assert tau == pytest.approx(1.3343e-7, rel=1e-4)
        assert doppler == 2 * (80 / 3.6) * 5.89e9 / SPEED_OF_LIGHT
        assert doppler == pytest.approx(872.9, rel=5e-4)
        assert abs(abs(h_prime) - 1.0) < 1e-15

    def test_zero_target(self):
        cfg = make_config(5.89e9, 156.25e3, 64, 50)
        tau, doppler, h_prime = target_params(SensingTarget(0.0, 0.0), cfg)
        assert tau == 0.0 and doppler == 0.0 and h_prime == 1.0

    def test_receding_target_has_negative_doppler(self):
        cfg = make_config(5.89e9, 156.25e3, 64, 50)
        tau, doppler, _ = target_params(SensingTarget(150.0, -30.0), cfg)
        assert tau == pytest.approx(1.0007e-6, rel=1e-4)
        assert doppler == pytest.approx(-1178.6, rel=5e-4)

    def test_negative_range_rejected(self):
        cfg = make_config(5.89e9, 156.25e3, 64, 50)
        with pytest.raises(DomainError):
            target_params(SensingTarget(-1.0, 0.0), cfg)


class TestFrames:
    def test_constellation_geometry(self):
        mags = np.unique(np.round(np.abs(QAM16), 12))
        expected = np.sqrt(np.array([2.0, 10.0, 18.0]) / 10.0)
        assert np.allclose(mags, expected)
        assert abs(np.mean(np.abs(QAM16) ** 2) - 1.0) < 1e-15

    def test_frame_symbols_and_reproducibility(self):
        cfg = make_config(5.89e9, 156.25e3, 16, 8)
        frame = random_dd_frame(cfg, 7)
        assert frame.shape == (16, 8)
        dists = np.abs(frame.reshape(-1, 1) - QAM16[None, :]).min(axis=1)
        assert dists.max() < 1e-15
        assert np.array_equal(frame, random_dd_frame(cfg, 7))
        assert not np.array_equal(frame, random_dd_frame(cfg, 8))

    def test_mean_power_near_unity(self):
        cfg = make_config(5.89e9, 156.25e3, 64, 50)
        frame = random_dd_frame(cfg, 123)
        assert np.mean(np.abs(frame) ** 2) == pytest.approx(1.0, abs=0.05)


class TestVectorization:
    def test_index_map(self):
        cfg = make_config(5.89e9, 156.25e3, 5, 3)
        frame = random_dd_frame(cfg, 0)
        vec = vectorize(frame)
        for k in range(5):
            for l in range(3):
                assert vec[l * 5 + k] == frame[k, l]

    @settings(deadline=None, max_examples=50)
    @given(m=st.integers(2, 12), n=st.integers(2, 12), seed=st.integers(0, 2**32 - 1))
    def test_roundtrip(self, m, n, seed):
        rng = np.random.default_rng(seed)
        frame = rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n))
        assert np.array_equal(devectorize(vectorize(frame), m, n), frame)

    def test_shape_errors(self):
        with pytest.raises(ShapeError):
            vectorize(np.zeros(6))
        with pytest.raises(ShapeError):
            devectorize(np.zeros(7), 2, 3)


class TestTransforms:
    def test_zeros_map_to_zeros(self):
        assert np.all(sfft(np.zeros((4, 3))) == 0)

    def test_unit_impulse_maps_to_all_ones(self):
        frame = np.zeros((8, 4), dtype=complex)
        frame[0, 0] = 1.0
        assert np.abs(sfft(frame) - 1.0).max() < 1e-12

    @pytest.mark.parametrize("m, n", [(2, 2), (4, 3), (8, 4), (8, 8), (5, 7)])
    def test_fast_path_matches_double_sum(self, m, n):
        cfg = make_config(5.89e9, 156.25e3, m, n)
        frame = random_dd_frame(cfg, 42)
        assert np.abs(sfft(frame) - sfft_double_sum(frame)).max() < 1e-10
        tf = sfft(frame)
        assert np.abs(isfft(tf) - isfft_double_sum(tf)).max() < 1e-10

    def test_roundtrip(self):
        cfg = make_config(5.89e9, 156.25e3, 8, 4)
        frame = random_dd_frame(cfg, 5)
        assert np.abs(isfft(sfft(frame)) - frame).max() < 1e-10

    def test_rejects_non_2d(self):
        with pytest.raises(ShapeError):
            sfft(np.zeros(8))
        with pytest.raises(ShapeError):
            isfft(np.zeros(8))
