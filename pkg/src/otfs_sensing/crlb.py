"""Fisher information over (gain, phase, delay, Doppler) and the derived bounds.

The observation model is ``y = s + w`` with mean ``s = h' Psi(tau, fd) x``
and white complex Gaussian noise of per-element variance ``sigma_w2``.  The
bound is conditioned on the realized symbol frame (no expectation over the
constellation is taken).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .crosstalk import FactoredCrossTalk, apply_frame, factored_crosstalk, partials
from .errors import DomainError, GuardError, ShapeError
from .grid import SPEED_OF_LIGHT, SystemConfig, vectorize

_CONDITION_LIMIT = 1e12
_TAP_BOUNDARY_EPS = 1e-9

# Index order of the parameter vector throughout this module.
PARAM_NAMES = ("gain", "phase", "tau", "doppler")


@dataclass(frozen=True)
class FisherMatrix:
    """4x4 Fisher information at ``theta = (gain, phase, tau, doppler)``."""

    entries: np.ndarray
    sigma_w2: float
    theta: tuple


def mean_vector(frame: np.ndarray, f: FactoredCrossTalk, h_prime: complex) -> np.ndarray:
    """Mean of the received vector, ``h' * Psi x``, vectorized."""
    frame = np.asarray(frame)
    if frame.shape != (f.num_subcarriers, f.num_slots):
        raise ShapeError(
            f"frame shape {frame.shape} does not match operator "
            f"({f.num_subcarriers}, {f.num_slots})")
    return h_prime * vectorize(apply_frame(f, frame))


def _check_tap_boundary(cfg: SystemConfig, tau: float) -> None:
    bins = tau * cfg.num_subcarriers * cfg.subcarrier_spacing
    dist_s = abs(bins - round(bins)) / (cfg.num_subcarriers * cfg.subcarrier_spacing)
    if dist_s < _TAP_BOUNDARY_EPS * cfg.symbol_time:
        raise DomainError(
            f"tau={tau} sits on a delay-tap boundary where the tau-derivative "
            "is undefined; offset it by a fraction of a tap")


def fisher(frame: np.ndarray, cfg: SystemConfig, theta,
           sigma_w2: float) -> FisherMatrix:
    """Fisher matrix from the analytic operator derivatives.

    ``theta = (gain, phase, tau, doppler)`` with gain > 0.  Entry (i, j) is
    ``(2/sigma_w2) Re{ sum_n (ds_n/dtheta_i)* (ds_n/dtheta_j) }``.
    """
    gain, phase, tau, doppler = theta
    if sigma_w2 <= 0:
        raise DomainError(f"sigma_w2 must be positive, got {sigma_w2}")
    if gain <= 0:
        raise DomainError(f"gain must be positive, got {gain}")
    _check_tap_boundary(cfg, tau)
    frame = np.asarray(frame)
    if frame.shape != (cfg.num_subcarriers, cfg.num_slots):
        raise ShapeError(
            f"frame shape {frame.shape} does not match config "
            f"({cfg.num_subcarriers}, {cfg.num_slots})")

    h_prime = gain * np.exp(1j * phase)
    f = factored_crosstalk(cfg, tau, doppler)
    d_tau, d_doppler = partials(cfg, tau, doppler)
    s = h_prime * vectorize(apply_frame(f, frame))
    x_vec = vectorize(frame)
    ds = (
        s / gain,                        # d/d gain
        1j * s,                          # d/d phase
        h_prime * d_tau.apply(x_vec),    # d/d tau
        h_prime * d_doppler.apply(x_vec),
    )
    j = np.empty((4, 4))
    for i in range(4):
        for k in range(i, 4):
            val = (2.0 / sigma_w2) * np.real(np.vdot(ds[i], ds[k]))
            j[i, k] = val
            j[k, i] = val
    return FisherMatrix(j, float(sigma_w2), tuple(theta))


def bounds(j: FisherMatrix, cfg: SystemConfig) -> tuple[float, float]:
    """Range and velocity standard-deviation floors from the Fisher matrix.

    The matrix is symmetrized and diagonally equilibrated before inversion
    (the raw entries mix seconds and hertz, so their unscaled condition
    number reflects units, not information); the 1e12 condition guard applies
    to the equilibrated matrix.
    """
    entries = 0.5 * (j.entries + j.entries.T)
    diag = np.diag(entries)
    if np.any(diag <= 0) or not np.all(np.isfinite(entries)):
        raise GuardError("Fisher matrix is singular: non-positive or non-finite diagonal")
    scale = 1.0 / np.sqrt(diag)
    scaled = entries * np.outer(scale, scale)
    cond = np.linalg.cond(scaled)
    if not np.isfinite(cond) or cond > _CONDITION_LIMIT:
        raise GuardError(
            f"Fisher matrix numerically singular: equilibrated condition {cond:.3e} "
            f"exceeds {_CONDITION_LIMIT:.0e}")
    inv_scaled = np.linalg.inv(scaled)
    sigma_tau = math.sqrt(inv_scaled[2, 2]) * scale[2]
    sigma_doppler = math.sqrt(inv_scaled[3, 3]) * scale[3]
    sigma_range = SPEED_OF_LIGHT / 2.0 * sigma_tau
    sigma_velocity = SPEED_OF_LIGHT / (2.0 * cfg.carrier_freq) * sigma_doppler
    return sigma_range, sigma_velocity
