"""Delay-Doppler grid primitives: numerology, targets, symbol frames, transforms.

Array conventions used throughout the package:

- a delay-Doppler frame is an (M, N) complex array ``x[k, l]`` with ``k`` the
  delay index and ``l`` the Doppler index;
- a time-frequency frame is an (N, M) complex array ``X[n, m]`` with ``n`` the
  time-slot index and ``m`` the subcarrier index;
- vectorization stacks the delay axis fastest: element ``(k, l)`` lands at
  position ``l*M + k``, i.e. column-major raveling of the (M, N) frame.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DomainError, ShapeError

SPEED_OF_LIGHT = 299_792_458.0

# 16-QAM constellation {a + jb : a, b in (-3, -1, 1, 3)} / sqrt(10),
# unit average power.
QAM16 = np.array(
    [a + 1j * b for a in (-3, -1, 1, 3) for b in (-3, -1, 1, 3)],
    dtype=complex,
) / np.sqrt(10.0)


@dataclass(frozen=True)
class SystemConfig:
    """OTFS numerology: carrier, subcarrier spacing, and grid dimensions."""

    carrier_freq: float
    subcarrier_spacing: float
    num_subcarriers: int
    num_slots: int
    modulation: str = "16qam"

    @property
    def symbol_time(self) -> float:
        """Slot duration, the reciprocal of the subcarrier spacing."""
        return 1.0 / self.subcarrier_spacing

    @property
    def bandwidth(self) -> float:
        return self.num_subcarriers * self.subcarrier_spacing

    @property
    def grid_size(self) -> int:
        """Number of symbols per frame, M*N."""
        return self.num_subcarriers * self.num_slots


@dataclass(frozen=True)
class SensingTarget:
    """Point target at radial distance ``range_m`` moving at ``speed_mps``.

    The sign of ``speed_mps`` carries through to the Doppler shift,
    ``doppler = 2 * speed * carrier / c``.
    """

    range_m: float
    speed_mps: float


def make_config(carrier_freq: float, subcarrier_spacing: float,
                num_subcarriers: int, num_slots: int,
                modulation: str = "16qam") -> SystemConfig:
    """Validate and build a :class:`SystemConfig`.

    Raises :class:`ConfigError` naming the offending field when an input is
    non-positive or a grid dimension is below 2.
    """
    if not carrier_freq > 0:
        raise ConfigError(f"carrier_freq must be positive, got {carrier_freq}")
    if not subcarrier_spacing > 0:
        raise ConfigError(
            f"subcarrier_spacing must be positive, got {subcarrier_spacing}")
    if int(num_subcarriers) != num_subcarriers or num_subcarriers < 2:
        raise ConfigError(
            f"num_subcarriers must be an integer >= 2, got {num_subcarriers}")
    if int(num_slots) != num_slots or num_slots < 2:
        raise ConfigError(f"num_slots must be an integer >= 2, got {num_slots}")
    if modulation.lower() != "16qam":
        raise ConfigError(f"modulation must be '16qam', got {modulation!r}")
    return SystemConfig(float(carrier_freq), float(subcarrier_spacing),
                        int(num_subcarriers), int(num_slots), "16qam")


def target_params(target: SensingTarget,
                  cfg: SystemConfig) -> tuple[float, float, complex]:
    """Round-trip channel parameters (delay, Doppler shift, unit-gain phase).

    ``tau = 2r/c``, ``doppler = 2 v f_c / c`` and the residual carrier phase
    ``h' = exp(j 2 pi doppler tau)`` of a unit-gain reflection.
    """
    if target.range_m < 0:
        raise DomainError(f"target range must be >= 0, got {target.range_m}")
    tau = 2.0 * target.range_m / SPEED_OF_LIGHT
    doppler = 2.0 * target.speed_mps * cfg.carrier_freq / SPEED_OF_LIGHT
    h_prime = np.exp(2j * np.pi * doppler * tau)
    return tau, doppler, complex(h_prime)


def delay_tap_count(cfg: SystemConfig, tau: float) -> int:
    """Integer delay-tap count ``ceil(tau * M * subcarrier_spacing)``.

    A delay exactly on a tap boundary resolves to the lower count.
    """
    return int(math.ceil(tau * cfg.num_subcarriers * cfg.subcarrier_spacing))


def validate_channel_params(cfg: SystemConfig, tau: float, doppler: float) -> None:
    """Reject (tau, doppler) outside the unambiguous single-tap-split range.

    Delays must lie in ``[0, (M-1)/(M*df))`` and Doppler in ``(-df, df)``;
    wider values are rejected rather than wrapped.
    """
    m = cfg.num_subcarriers
    df = cfg.subcarrier_spacing
    tau_max = (m - 1) / (m * df)
    if not 0.0 <= tau < tau_max:
        raise DomainError(
            f"tau={tau} outside [0, {tau_max}) = [0, (M-1)/(M*subcarrier_spacing))")
    if not abs(doppler) < df:
        raise DomainError(
            f"doppler={doppler} outside (-{df}, {df}) = (-subcarrier_spacing, subcarrier_spacing)")


def random_dd_frame(cfg: SystemConfig, seed: int) -> np.ndarray:
    """Draw an (M, N) frame of independent uniform 16-QAM symbols.

    Deterministic for a fixed seed (PCG64); parallel callers should pass
    disjoint seeds.
    """
    if cfg.modulation != "16qam":
        raise DomainError(f"frame generation requires 16qam, got {cfg.modulation!r}")
    rng = np.random.default_rng(seed)
    idx = rng.integers(0, 16, size=(cfg.num_subcarriers, cfg.num_slots))
    return QAM16[idx]


def vectorize(frame: np.ndarray) -> np.ndarray:
    """Ravel an (M, N) frame to length M*N with the delay index fastest."""
    if frame.ndim != 2:
        raise ShapeError(f"expected a 2-D frame, got shape {frame.shape}")
    return frame.ravel(order="F")


def devectorize(vec: np.ndarray, num_subcarriers: int, num_slots: int) -> np.ndarray:
    """Inverse of :func:`vectorize`: reshape a length-M*N vector to (M, N)."""
    vec = np.asarray(vec)
    if vec.ndim != 1 or vec.size != num_subcarriers * num_slots:
        raise ShapeError(
            f"expected a vector of length {num_subcarriers * num_slots}, "
            f"got shape {vec.shape}")
    return vec.reshape((num_subcarriers, num_slots), order="F")


def sfft(dd_frame: np.ndarray) -> np.ndarray:
    """Map an (M, N) delay-Doppler frame to the (N, M) time-frequency grid.

    ``X[n, m] = sum_k sum_l x[k, l] exp(-j2pi(mk/M - nl/N))``, computed with
    fast transforms.
    """
    if dd_frame.ndim != 2:
        raise ShapeError(f"expected a 2-D frame, got shape {dd_frame.shape}")
    m, n = dd_frame.shape
    t = np.fft.fft(dd_frame, axis=0)           # t[m, l]
    return (n * np.fft.ifft(t, axis=1)).T      # X[n, m]


def isfft(tf_frame: np.ndarray) -> np.ndarray:
    """Inverse of :func:`sfft`: (N, M) time-frequency grid back to (M, N).

    ``y[k, l] = (1/(NM)) sum_n sum_m Y[n, m] exp(+j2pi(mk/M - nl/N))``.
    """
    if tf_frame.ndim != 2:
        raise ShapeError(f"expected a 2-D frame, got shape {tf_frame.shape}")
    n, m = tf_frame.shape
    a = np.fft.ifft(tf_frame, axis=1)          # a[n, k], carries the 1/M
    return np.fft.fft(a, axis=0).T / n         # y[k, l]
