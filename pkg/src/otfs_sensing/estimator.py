"""Single-target observation simulation and maximum-likelihood grid search.

The receiver scans a delay-Doppler hypothesis grid, builds the (optionally
masked) factored channel operator at every point, and keeps the hypothesis
maximizing ``|<Psi x, y>|^2 / ||Psi x||^2``.  The channel phase is a nuisance
scalar that cancels from this metric and is never estimated.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .crosstalk import FactoredCrossTalk, apply_frame, factored_crosstalk
from .dirichlet import masks_for
from .errors import ConfigError, DomainError, ShapeError
from .grid import (SPEED_OF_LIGHT, SystemConfig, devectorize,
                   validate_channel_params, vectorize)


@dataclass(frozen=True)
class SearchGrid:
    """Delay/Doppler search window and refinement densities.

    The fine stage steps are ``1/(m_prime * subcarrier_spacing)`` in delay
    and ``1/(n_prime * symbol_time)`` in Doppler, with ``m_prime >= M`` and
    ``n_prime >= N``.
    """

    tau_min: float
    tau_max: float
    doppler_min: float
    doppler_max: float
    m_prime: int
    n_prime: int


def default_grid(cfg: SystemConfig, m_prime: int | None = None,
                 n_prime: int | None = None) -> SearchGrid:
    """Default search window: half the unambiguous delay span, a quarter of
    the subcarrier spacing on either Doppler side, 4x refinement."""
    m, df = cfg.num_subcarriers, cfg.subcarrier_spacing
    return SearchGrid(
        tau_min=0.0,
        tau_max=0.5 * (m - 1) / (m * df),
        doppler_min=-0.25 * df,
        doppler_max=0.25 * df,
        m_prime=m_prime if m_prime is not None else 4 * m,
        n_prime=n_prime if n_prime is not None else 4 * cfg.num_slots,
    )


@dataclass(frozen=True)
class EstimationResult:
    """Grid-search outcome with derived range/velocity and cost counters."""

    tau_hat: float
    doppler_hat: float
    range_hat: float
    velocity_hat: float
    metric: float
    ops_used: int
    n_hypotheses: int


def simulate_rx(f: FactoredCrossTalk, frame: np.ndarray, h_prime: complex,
                snr_db: float, seed: int, noiseless: bool = False) -> np.ndarray:
    """Received vector ``h' * Psi x + w`` for one transmitted frame.

    The noise is circularly symmetric complex Gaussian with per-element
    variance ``10^(-snr_db/10)`` (unit-power symbols, unit channel gain), and
    is reproducible per seed.  ``noiseless=True`` skips the noise entirely.
    """
    frame = np.asarray(frame)
    if frame.shape != (f.num_subcarriers, f.num_slots):
        raise ShapeError(
            f"frame shape {frame.shape} does not match operator "
            f"({f.num_subcarriers}, {f.num_slots})")
    rx = h_prime * vectorize(apply_frame(f, frame))
    if noiseless:
        return rx
    sigma_w2 = 10.0 ** (-snr_db / 10.0)
    rng = np.random.default_rng(seed)
    size = f.grid_size
    noise = np.sqrt(sigma_w2 / 2.0) * (rng.standard_normal(size)
                                       + 1j * rng.standard_normal(size))
    return rx + noise


def likelihood_metric(x: np.ndarray, y: np.ndarray, f: FactoredCrossTalk) -> float:
    """Concentrated likelihood ``|x^H Psi^H y|^2 / (x^H Psi^H Psi x)``.

    Computed matrix-free: the numerator is ``|<Psi x, y>|^2`` and the
    denominator ``||Psi x||^2``.
    """
    x = np.asarray(x)
    y = np.asarray(y)
    if x.ndim != 1 or x.size != f.grid_size or y.shape != x.shape:
        raise ShapeError(
            f"need two vectors of length {f.grid_size}, got {x.shape} and {y.shape}")
    z = vectorize(apply_frame(f, devectorize(x, f.num_subcarriers, f.num_slots)))
    den = np.vdot(z, z).real
    if den <= 0.0:
        raise DomainError("zero-energy hypothesis response; the input frame is degenerate")
    return float(np.abs(np.vdot(z, y)) ** 2 / den)


def _axis_points(lo: float, hi: float, step: float) -> np.ndarray:
    if step <= 0:
        raise ConfigError(f"grid step must be positive, got {step}")
    count = int(math.floor((hi - lo) / step * (1 + 1e-12))) + 1
    return lo + step * np.arange(max(count, 0))


def _metric_frame(frame, y_frame, f):
    z = apply_frame(f, frame)
    den = np.vdot(z, z).real
    if den <= 0.0:
        return -np.inf
    return float(np.abs(np.vdot(z, y_frame)) ** 2 / den)


def ml_estimate(x, y: np.ndarray, cfg: SystemConfig, grid: SearchGrid,
                n_lobe: int | None = None) -> EstimationResult:
    """Two-stage grid search for the delay/Doppler pair maximizing the metric.

    A coarse pass at the natural resolutions ``1/(M df)`` and ``1/(N T)``
    covers the whole window; a fine pass at the grid's refinement steps then
    scans one coarse bin on either side of the coarse peak.  With ``n_lobe``
    given (non-zero), masked operators are used at every hypothesis.  Ties
    resolve to the lowest delay, then lowest Doppler.

    ``x`` may be the transmitted (M, N) frame or its length-NM vector.
    """
    m, n = cfg.num_subcarriers, cfg.num_slots
    x = np.asarray(x)
    frame = x if x.ndim == 2 else devectorize(x, m, n)
    if frame.shape != (m, n):
        raise ShapeError(f"frame shape {frame.shape} does not match config ({m}, {n})")
    y = np.asarray(y)
    if y.ndim != 1 or y.size != m * n:
        raise ShapeError(f"expected a received vector of length {m * n}, got {y.shape}")
    y_frame = devectorize(y, m, n)

    if n_lobe is not None and n_lobe == 0:
        n_lobe = None
    if grid.m_prime < m or grid.n_prime < n:
        raise ConfigError(
            f"refinement densities m_prime={grid.m_prime}, n_prime={grid.n_prime} "
            f"must be at least M={m}, N={n}")
    try:
        validate_channel_params(cfg, grid.tau_min, 0.0)
        validate_channel_params(cfg, grid.tau_max, grid.doppler_min)
        validate_channel_params(cfg, grid.tau_max, grid.doppler_max)
    except DomainError as exc:
        raise ConfigError(f"search window exceeds the valid channel range: {exc}") from exc

    df, t_sym = cfg.subcarrier_spacing, cfg.symbol_time
    coarse_tau = _axis_points(grid.tau_min, grid.tau_max, 1.0 / (m * df))
    coarse_fd = _axis_points(grid.doppler_min, grid.doppler_max, 1.0 / (n * t_sym))
    if coarse_tau.size == 0 or coarse_fd.size == 0:
        raise ConfigError("empty search grid: check the window bounds")

    ops = 0
    hypotheses = 0

    def evaluate(tau: float, doppler: float) -> float:
        nonlocal ops, hypotheses
        masks = masks_for(cfg, tau, doppler, n_lobe) if n_lobe else None
        f = factored_crosstalk(cfg, tau, doppler, masks=masks)
        ops += f.ops_evaluated
        hypotheses += 1
        return _metric_frame(frame, y_frame, f)

    best = (-np.inf, coarse_tau[0], coarse_fd[0])
    for tau in coarse_tau:
        for fd in coarse_fd:
            val = evaluate(tau, fd)
            if val > best[0]:
                best = (val, tau, fd)

    fine_tau_step = 1.0 / (grid.m_prime * df)
    fine_fd_step = 1.0 / (grid.n_prime * t_sym)
    reach_tau = round((1.0 / (m * df)) / fine_tau_step)
    reach_fd = round((1.0 / (n * t_sym)) / fine_fd_step)
    fine_tau = best[1] + fine_tau_step * np.arange(-reach_tau, reach_tau + 1)
    fine_fd = best[2] + fine_fd_step * np.arange(-reach_fd, reach_fd + 1)
    fine_tau = fine_tau[(fine_tau >= grid.tau_min) & (fine_tau <= grid.tau_max)]
    fine_fd = fine_fd[(fine_fd >= grid.doppler_min) & (fine_fd <= grid.doppler_max)]

    best_fine = (-np.inf, best[1], best[2])
    for tau in fine_tau:
        for fd in fine_fd:
            val = evaluate(tau, fd)
            if val > best_fine[0]:
                best_fine = (val, tau, fd)

    metric, tau_hat, fd_hat = best_fine
    return EstimationResult(
        tau_hat=float(tau_hat),
        doppler_hat=float(fd_hat),
        range_hat=float(SPEED_OF_LIGHT * tau_hat / 2.0),
        velocity_hat=float(SPEED_OF_LIGHT * fd_hat / (2.0 * cfg.carrier_freq)),
        metric=float(metric),
        ops_used=ops,
        n_hypotheses=hypotheses,
    )
