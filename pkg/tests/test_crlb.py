"""Fisher information against finite-difference oracles, and bound behavior."""
import numpy as np
import pytest

from otfs_sensing.crlb import FisherMatrix, bounds, fisher, mean_vector
from otfs_sensing.crosstalk import compose, direct_crosstalk, factored_crosstalk
from otfs_sensing.errors import DomainError, GuardError, ShapeError
from otfs_sensing.grid import make_config, random_dd_frame, vectorize


@pytest.fixture(scope="module")
def cfg():
    return make_config(5.89e9, 156.25e3, 8, 4)


def mean_double_sum(frame, dense, h_prime):
    """Literal double-sum of the mean observation, the oracle for mean_vector."""
    m, n = frame.shape
    out = np.zeros(n * m, dtype=complex)
    for l in range(n):
        for k in range(m):
            acc = 0.0j
            for lp in range(n):
                for kp in range(m):
                    acc += dense[l * m + k, lp * m + kp] * frame[kp, lp]
            out[l * m + k] = h_prime * acc
    return out


def fisher_fd_oracle(frame, cfg, theta, sigma_w2):
    """Fisher matrix built from central differences of the mean vector."""
    def mean_of(th):
        gain, phase, tau, doppler = th
        dense = direct_crosstalk(cfg, tau, doppler).entries
        return gain * np.exp(1j * phase) * (dense @ vectorize(frame))

    steps = (1e-6, 1e-6,
             1e-6 / (cfg.num_subcarriers * cfg.subcarrier_spacing),
             1e-4 / (cfg.num_slots * cfg.symbol_time))
    ds = []
    for i in range(4):
        up = list(theta); up[i] += steps[i]
        dn = list(theta); dn[i] -= steps[i]
        ds.append((mean_of(up) - mean_of(dn)) / (2 * steps[i]))
    j = np.empty((4, 4))
    for i in range(4):
        for k in range(4):
            j[i, k] = (2.0 / sigma_w2) * np.real(np.vdot(ds[i], ds[k]))
    return j


class TestMeanVector:
    def test_zero_gain(self, cfg):
        f = factored_crosstalk(cfg, 1.2 / cfg.bandwidth, 0.0)
        frame = random_dd_frame(cfg, 0)
        assert np.all(mean_vector(frame, f, 0.0) == 0)

    def test_identity_channel(self, cfg):
        f = factored_crosstalk(cfg, 0.0, 0.0)
        frame = random_dd_frame(cfg, 1)
        assert np.abs(mean_vector(frame, f, 1.0) - vectorize(frame)).max() < 1e-12

    def test_matches_double_sum_oracle(self, cfg):
        tau = 2.4 / cfg.bandwidth
        doppler = 0.31 * cfg.subcarrier_spacing
        f = factored_crosstalk(cfg, tau, doppler)
        frame = random_dd_frame(cfg, 2)
        h_prime = np.exp(1.1j)
        dense = compose(f).entries
        assert np.abs(mean_vector(frame, f, h_prime)
                      - mean_double_sum(frame, dense, h_prime)).max() < 1e-10

    def test_shape_error(self, cfg):
        f = factored_crosstalk(cfg, 0.0, 0.0)
        with pytest.raises(ShapeError):
            mean_vector(np.zeros((2, 2)), f, 1.0)


class TestFisher:
    def test_matches_finite_difference_oracle(self, cfg):
        frame = random_dd_frame(cfg, 3)
        tau = 0.337 * 7 / cfg.bandwidth
        doppler = 0.21 * cfg.subcarrier_spacing
        theta = (1.0, 2 * np.pi * doppler * tau, tau, doppler)
        j = fisher(frame, cfg, theta, sigma_w2=1.0)
        ref = fisher_fd_oracle(frame, cfg, theta, 1.0)
        assert np.abs(j.entries - ref).max() / np.abs(ref).max() < 1e-4

    def test_symmetric_and_psd_at_random_points(self, cfg):
        rng = np.random.default_rng(4)
        frame = random_dd_frame(cfg, 5)
        span = 7 / cfg.bandwidth
        for _ in range(20):
            tau = rng.uniform(0.05, 0.95) * span
            doppler = rng.uniform(-0.9, 0.9) * cfg.subcarrier_spacing
            j = fisher(frame, cfg, (1.0, 0.3, tau, doppler), sigma_w2=0.5)
            assert np.abs(j.entries - j.entries.T).max() < 1e-12
            eigs = np.linalg.eigvalsh(j.entries)
            assert eigs.min() >= -1e-9 * np.trace(j.entries)

    def test_diagonal_nonnegative(self, cfg):
        frame = random_dd_frame(cfg, 6)
        j = fisher(frame, cfg, (1.0, 0.0, 1.3 / cfg.bandwidth, 0.0), 1.0)
        assert np.all(np.diag(j.entries) >= 0)

    def test_noise_scaling_is_exact(self, cfg):
        frame = random_dd_frame(cfg, 7)
        theta = (1.0, 0.0, 1.3 / cfg.bandwidth, 0.1 * cfg.subcarrier_spacing)
        j1 = fisher(frame, cfg, theta, sigma_w2=1.0)
        j2 = fisher(frame, cfg, theta, sigma_w2=2.0)
        assert np.array_equal(j1.entries, 2.0 * j2.entries)

    def test_refuses_tap_boundary(self, cfg):
        frame = random_dd_frame(cfg, 8)
        with pytest.raises(DomainError, match="boundary"):
            fisher(frame, cfg, (1.0, 0.0, 2.0 / cfg.bandwidth, 0.0), 1.0)

    def test_rejects_bad_noise_and_gain(self, cfg):
        frame = random_dd_frame(cfg, 9)
        theta = (1.0, 0.0, 1.3 / cfg.bandwidth, 0.0)
        with pytest.raises(DomainError):
            fisher(frame, cfg, theta, sigma_w2=0.0)
        with pytest.raises(DomainError):
            fisher(frame, cfg, (0.0, 0.0, theta[2], 0.0), 1.0)


class TestBounds:
    def theta_at(self, cfg):
        return (1.0, 0.2, 1.3 / cfg.bandwidth, 0.15 * cfg.subcarrier_spacing)

    def test_noise_scaling_of_bounds(self, cfg):
        frame = random_dd_frame(cfg, 10)
        theta = self.theta_at(cfg)
        r1, v1 = bounds(fisher(frame, cfg, theta, 1.0), cfg)
        r2, v2 = bounds(fisher(frame, cfg, theta, 10.0), cfg)
        assert r2 == pytest.approx(np.sqrt(10) * r1, rel=1e-9)
        assert v2 == pytest.approx(np.sqrt(10) * v1, rel=1e-9)

    def test_longer_observation_tightens_bounds(self):
        short = make_config(5.89e9, 156.25e3, 8, 4)
        long = make_config(5.89e9, 156.25e3, 8, 8)
        theta = self.theta_at(short)
        frame_short = random_dd_frame(short, 11)
        frame_long = random_dd_frame(long, 11)
        r_s, v_s = bounds(fisher(frame_short, short, theta, 1.0), short)
        r_l, v_l = bounds(fisher(frame_long, long, theta, 1.0), long)
        assert r_l < r_s and v_l < v_s

    def test_guard_on_singular_matrix(self, cfg):
        j = FisherMatrix(np.zeros((4, 4)), 1.0, (1.0, 0.0, 0.0, 0.0))
        with pytest.raises(GuardError):
            bounds(j, cfg)
        nearly = np.eye(4)
        nearly[2, 2] = 1e-30
        rank_def = FisherMatrix(np.outer(np.ones(4), np.ones(4)), 1.0,
                                (1.0, 0.0, 0.0, 0.0))
        with pytest.raises(GuardError):
            bounds(rank_def, cfg)

    def test_bounds_positive_and_finite(self, cfg):
        frame = random_dd_frame(cfg, 12)
        for snr_db in (-25.0, -10.0, 0.0):
            sigma_w2 = 10 ** (-snr_db / 10)
            r, v = bounds(fisher(frame, cfg, self.theta_at(cfg), sigma_w2), cfg)
            assert np.isfinite(r) and r > 0
            assert np.isfinite(v) and v > 0
