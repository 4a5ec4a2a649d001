"""Delay-Doppler channel (cross-talk) operator for a single point target.

The NM x NM operator couples every transmitted delay-Doppler symbol to every
received one.  It is available three ways:

- :func:`direct_crosstalk` evaluates the closed-form entry expression
  literally over all four indexes;
- :func:`factored_crosstalk` builds two N x N Doppler-block matrices and two
  delay-block matrices of M rows, whose padded Kronecker products compose the
  same operator at a fraction of the entry evaluations;
- :func:`apply` / :func:`apply_adjoint` use the factored form matrix-free.

Entries of the factored matrices may be restricted to the banded masks from
:mod:`.dirichlet`, in which case only the masked entries are ever computed
and counted.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .dirichlet import dirichlet_ratio, dirichlet_ratio_deriv
from .errors import ShapeError
from .grid import (SystemConfig, delay_tap_count, devectorize,
                   validate_channel_params, vectorize)


@dataclass(frozen=True)
class DenseCrossTalk:
    """Materialized NM x NM channel operator at one (tau, doppler) point.

    Row ``l*M + k`` and column ``l'*M + k'`` address the coupling from
    transmitted symbol (k', l') to received sample (k, l).
    """

    entries: np.ndarray
    tau: float
    doppler: float


@dataclass(frozen=True)
class FactoredCrossTalk:
    """Factored channel operator: Doppler blocks y1, y2 and delay blocks x1, x2.

    The dense operator is ``kron(y1, [x1 | 0]) + kron(y2, [0 | x2])`` where
    the zero paddings are M x k_tau and M x (M - k_tau) wide.  x2 holds the
    last ``k_tau`` columns of the delay-block matrix (the inter-symbol
    branch); it is empty when the delay spans no whole tap.
    ``ops_evaluated`` counts every complex matrix entry computed during
    construction.
    """

    y1: np.ndarray
    y2: np.ndarray
    x1: np.ndarray
    x2: np.ndarray
    k_tau: int
    tau: float
    doppler: float
    ops_evaluated: int

    @property
    def num_subcarriers(self) -> int:
        return self.x1.shape[0]

    @property
    def num_slots(self) -> int:
        return self.y1.shape[0]

    @property
    def grid_size(self) -> int:
        return self.num_subcarriers * self.num_slots


def direct_crosstalk(cfg: SystemConfig, tau: float, doppler: float) -> DenseCrossTalk:
    """Evaluate every operator entry literally from the closed form.

    Entry (l, l', k, k') is the product of the two Dirichlet-ratio factors in
    the Doppler and delay offsets, the Doppler phase ramp over k', and the
    inter-symbol phase on columns ``k' >= M - k_tau``, all over NM.  The
    ratio factors fall back to their exact geometric-sum form near the
    removable singularities.
    """
    validate_channel_params(cfg, tau, doppler)
    m, n = cfg.num_subcarriers, cfg.num_slots
    df, t_sym = cfg.subcarrier_spacing, cfg.symbol_time
    k_tau = delay_tap_count(cfg, tau)

    l = np.arange(n)[:, None]
    lp = np.arange(n)[None, :]
    k = np.arange(m)[:, None]
    kp = np.arange(m)[None, :]
    doppler_block = dirichlet_ratio(lp - l + doppler * n * t_sym, n)
    delay_block = dirichlet_ratio(kp - k + tau * m * df, m)
    phase_ramp = np.exp(2j * np.pi * doppler * np.arange(m) / (m * df))
    isi_phase = np.exp(-2j * np.pi * (np.arange(n) / n + doppler * t_sym))

    entries = (doppler_block[:, :, None, None]
               * (delay_block * phase_ramp[None, :])[None, None, :, :]) / (n * m)
    if k_tau > 0:
        entries[:, :, :, m - k_tau:] *= isi_phase[None, :, None, None]
    dense = entries.transpose(0, 2, 1, 3).reshape(n * m, n * m)
    return DenseCrossTalk(dense, tau, doppler)


def _masked_values(rows, cols, value_fn):
    vals = value_fn(rows, cols)
    return vals, len(rows)


def factored_crosstalk(cfg: SystemConfig, tau: float, doppler: float,
                       masks=None) -> FactoredCrossTalk:
    """Build the factored operator, optionally restricted to banded masks.

    ``masks`` is the ``(mask_y, mask_x1, mask_x2)`` triple produced by
    :func:`otfs_sensing.dirichlet.masks_for`; when given, only entries under
    a mask are computed (and counted), the rest stay zero.
    """
    validate_channel_params(cfg, tau, doppler)
    m, n = cfg.num_subcarriers, cfg.num_slots
    df, t_sym = cfg.subcarrier_spacing, cfg.symbol_time
    k_tau = delay_tap_count(cfg, tau)

    doppler_arg = doppler * n * t_sym
    delay_arg = tau * m * df

    def y1_val(rows, cols):
        return dirichlet_ratio(cols - rows + doppler_arg, n) / (n * m)

    def y2_val(rows, cols):
        return y1_val(rows, cols) * np.exp(-2j * np.pi * (cols / n + doppler * t_sym))

    def x_val(rows, cols):
        # cols are global column indexes in [0, M): the Doppler phase ramp
        # and the delay offset both use the column's true grid position.
        return (np.exp(2j * np.pi * doppler * cols / (m * df))
                * dirichlet_ratio(cols - rows + delay_arg, m))

    ops = 0
    if masks is None:
        l = np.arange(n)[:, None]
        lp = np.arange(n)[None, :]
        k = np.arange(m)[:, None]
        y1 = y1_val(l, lp)
        y2 = y2_val(l, lp)
        x1 = x_val(k, np.arange(m - k_tau)[None, :])
        x2 = x_val(k, np.arange(m - k_tau, m)[None, :])
        ops = 2 * n * n + m * (m - k_tau) + m * k_tau
    else:
        mask_y, mask_x1, mask_x2 = masks
        if mask_y.shape != (n, n) or mask_x1.shape != (m, m - k_tau) \
                or mask_x2.shape != (m, k_tau):
            raise ShapeError(
                f"mask shapes {mask_y.shape}/{mask_x1.shape}/{mask_x2.shape} do not "
                f"match operator blocks ({n},{n})/({m},{m - k_tau})/({m},{k_tau})")
        y1 = np.zeros((n, n), dtype=complex)
        y2 = np.zeros((n, n), dtype=complex)
        x1 = np.zeros((m, m - k_tau), dtype=complex)
        x2 = np.zeros((m, k_tau), dtype=complex)
        li, lpi = np.nonzero(mask_y)
        y1[li, lpi], cnt = _masked_values(li, lpi, y1_val)
        ops += cnt
        y2[li, lpi], cnt = _masked_values(li, lpi, y2_val)
        ops += cnt
        ki, kpi = np.nonzero(mask_x1)
        x1[ki, kpi], cnt = _masked_values(ki, kpi, x_val)
        ops += cnt
        ki, kpi = np.nonzero(mask_x2)
        x2[ki, kpi], cnt = _masked_values(ki, kpi + (m - k_tau), x_val)
        ops += cnt
    return FactoredCrossTalk(y1, y2, x1, x2, k_tau, tau, doppler, ops)


def compose(f: FactoredCrossTalk) -> DenseCrossTalk:
    """Materialize the factored operator as a dense matrix."""
    m, k_tau = f.num_subcarriers, f.k_tau
    x1_padded = np.hstack([f.x1, np.zeros((m, k_tau))])
    x2_padded = np.hstack([np.zeros((m, m - k_tau)), f.x2])
    dense = np.kron(f.y1, x1_padded) + np.kron(f.y2, x2_padded)
    return DenseCrossTalk(dense, f.tau, f.doppler)


def apply_frame(f: FactoredCrossTalk, frame: np.ndarray) -> np.ndarray:
    """Apply the operator to an (M, N) frame without materializing it.

    Uses ``kron(A, B) vec(V) = vec(B V A^T)`` once per Kronecker term.
    """
    split = f.num_subcarriers - f.k_tau
    out = (f.x1 @ frame[:split, :]) @ f.y1.T
    if f.k_tau > 0:
        out = out + (f.x2 @ frame[split:, :]) @ f.y2.T
    return out


def apply(f: FactoredCrossTalk, x: np.ndarray) -> np.ndarray:
    """Matrix-free product of the operator with a length-NM vector."""
    x = np.asarray(x)
    if x.ndim != 1 or x.size != f.grid_size:
        raise ShapeError(f"expected a vector of length {f.grid_size}, got shape {x.shape}")
    frame = devectorize(x, f.num_subcarriers, f.num_slots)
    return vectorize(apply_frame(f, frame))


def apply_adjoint(f: FactoredCrossTalk, y: np.ndarray) -> np.ndarray:
    """Matrix-free product of the conjugate-transposed operator with ``y``."""
    y = np.asarray(y)
    if y.ndim != 1 or y.size != f.grid_size:
        raise ShapeError(f"expected a vector of length {f.grid_size}, got shape {y.shape}")
    m, n, split = f.num_subcarriers, f.num_slots, f.num_subcarriers - f.k_tau
    w = devectorize(y, m, n)
    out = np.zeros((m, n), dtype=complex)
    out[:split, :] = (f.x1.conj().T @ w) @ f.y1.conj()
    if f.k_tau > 0:
        out[split:, :] = (f.x2.conj().T @ w) @ f.y2.conj()
    return vectorize(out)


@dataclass(frozen=True)
class CrossTalkDerivative:
    """Sum of padded Kronecker terms forming one operator derivative.

    Each term is ``(doppler_block, delay_block, col_offset)``: the delay
    block occupies columns ``col_offset : col_offset + delay_block.shape[1]``
    of its padded M x M factor.
    """

    terms: tuple
    num_subcarriers: int
    num_slots: int

    def apply(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x)
        size = self.num_subcarriers * self.num_slots
        if x.ndim != 1 or x.size != size:
            raise ShapeError(f"expected a vector of length {size}, got shape {x.shape}")
        frame = devectorize(x, self.num_subcarriers, self.num_slots)
        out = np.zeros_like(frame)
        for y_blk, x_blk, off in self.terms:
            out = out + (x_blk @ frame[off:off + x_blk.shape[1], :]) @ y_blk.T
        return vectorize(out)

    def dense(self) -> np.ndarray:
        m = self.num_subcarriers
        size = m * self.num_slots
        out = np.zeros((size, size), dtype=complex)
        for y_blk, x_blk, off in self.terms:
            padded = np.zeros((m, m), dtype=complex)
            padded[:, off:off + x_blk.shape[1]] = x_blk
            out += np.kron(y_blk, padded)
        return out


def partials(cfg: SystemConfig, tau: float,
             doppler: float) -> tuple[CrossTalkDerivative, CrossTalkDerivative]:
    """Analytic elementwise derivatives of the operator in tau and doppler.

    The integer tap count and the branch split are held fixed (they are
    piecewise constant in tau); each returned derivative exposes matrix-free
    ``apply`` and a ``dense`` materializer.  Near the removable singularities
    the differentiated geometric-sum form is used, which is exact there.
    """
    validate_channel_params(cfg, tau, doppler)
    m, n = cfg.num_subcarriers, cfg.num_slots
    df, t_sym = cfg.subcarrier_spacing, cfg.symbol_time
    k_tau = delay_tap_count(cfg, tau)

    l = np.arange(n)[:, None]
    lp = np.arange(n)[None, :]
    k = np.arange(m)[:, None]
    kp1 = np.arange(m - k_tau)[None, :]
    kp2 = np.arange(m - k_tau, m)[None, :]

    doppler_arg = lp - l + doppler * n * t_sym
    y1 = dirichlet_ratio(doppler_arg, n) / (n * m)
    isi_phase = np.exp(-2j * np.pi * (lp / n + doppler * t_sym))
    y2 = y1 * isi_phase

    ramp1 = np.exp(2j * np.pi * doppler * kp1 / (m * df))
    ramp2 = np.exp(2j * np.pi * doppler * kp2 / (m * df))
    arg1 = kp1 - k + tau * m * df
    arg2 = kp2 - k + tau * m * df
    x1 = ramp1 * dirichlet_ratio(arg1, m)
    x2 = ramp2 * dirichlet_ratio(arg2, m)

    # d/dtau enters only through the delay-offset argument, scaled by M*df
    dx1_tau = ramp1 * dirichlet_ratio_deriv(arg1, m) * (m * df)
    dx2_tau = ramp2 * dirichlet_ratio_deriv(arg2, m) * (m * df)
    d_tau = CrossTalkDerivative(
        ((y1, dx1_tau, 0), (y2, dx2_tau, m - k_tau)), m, n)

    # d/ddoppler enters the Doppler-offset argument (scaled by N*T), the
    # per-column phase ramp, and the inter-symbol phase
    dy1 = dirichlet_ratio_deriv(doppler_arg, n) * (n * t_sym) / (n * m)
    dy2 = dy1 * isi_phase + y1 * (-2j * np.pi * t_sym) * isi_phase
    dx1_fd = (2j * np.pi * kp1 / (m * df)) * x1
    dx2_fd = (2j * np.pi * kp2 / (m * df)) * x2
    d_doppler = CrossTalkDerivative(
        ((dy1, x1, 0), (dy2, x2, m - k_tau),
         (y1, dx1_fd, 0), (y2, dx2_fd, m - k_tau)), m, n)
    return d_tau, d_doppler


def dump_magnitude_csv(dense: DenseCrossTalk, path) -> None:
    """Write ``row,col,magnitude`` lines of the dense operator for heatmaps."""
    mags = np.abs(dense.entries)
    size = mags.shape[0]
    rows = np.repeat(np.arange(size), mags.shape[1])
    cols = np.tile(np.arange(mags.shape[1]), size)
    table = np.column_stack([rows, cols, mags.ravel()])
    np.savetxt(path, table, fmt="%d,%d,%.17g",
               header="row,col,magnitude", comments="")
