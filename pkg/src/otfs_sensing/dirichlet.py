"""Dirichlet-kernel evaluation, lobe samples, and banded selection masks.

The magnitude of every entry of the factored channel matrices is a sample of
``|sin(Q pi x) / sin(pi x)|`` taken at integer offsets from a fractional
position set by the delay or Doppler value.  Keeping the first ``n_lobe``
lobes of that kernel is therefore equivalent to keeping ``2*n_lobe - 1``
circularly shifted diagonals of each matrix, which is what the masks built
here encode.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .grid import SystemConfig, delay_tap_count, validate_channel_params

_SINGULARITY_EPS = 1e-9


def dirichlet_ratio(a, q: int):
    """Complex ratio ``(1 - e^{j2pi a}) / (1 - e^{j2pi a/q})``.

    Wherever the denominator magnitude drops below 1e-9 the ratio is replaced
    by its geometric-sum form ``sum_{r=0}^{q-1} e^{j2pi r a/q}``, which is
    exact everywhere including the removable singularities (value ``q`` when
    ``a`` is a multiple of ``q``).  Accepts scalars or arrays.
    """
    a = np.asarray(a, dtype=float)
    den = 1.0 - np.exp(2j * np.pi * a / q)
    num = 1.0 - np.exp(2j * np.pi * a)
    bad = np.abs(den) < _SINGULARITY_EPS
    out = num / np.where(bad, 1.0, den)
    if np.any(bad):
        r = np.arange(q)
        out = np.asarray(out, dtype=complex)
        out[bad] = np.exp(2j * np.pi * np.multiply.outer(a[bad], r) / q).sum(axis=-1)
    return out if out.ndim else complex(out)


def dirichlet_ratio_deriv(a, q: int):
    """Derivative of :func:`dirichlet_ratio` with respect to ``a``.

    Quotient rule away from the denominator zeros; the differentiated
    geometric sum ``sum_r (j2pi r/q) e^{j2pi r a/q}`` within 1e-9 of them.
    """
    a = np.asarray(a, dtype=float)
    u = 1.0 - np.exp(2j * np.pi * a)
    v = 1.0 - np.exp(2j * np.pi * a / q)
    du = -2j * np.pi * np.exp(2j * np.pi * a)
    dv = (-2j * np.pi / q) * np.exp(2j * np.pi * a / q)
    bad = np.abs(v) < _SINGULARITY_EPS
    vv = np.where(bad, 1.0, v)
    out = (du * vv - u * dv) / vv**2
    if np.any(bad):
        r = np.arange(q)
        phase = np.exp(2j * np.pi * np.multiply.outer(a[bad], r) / q)
        out = np.asarray(out, dtype=complex)
        out[bad] = (phase * (2j * np.pi * r / q)).sum(axis=-1)
    return out if out.ndim else complex(out)


def dirichlet_mag(x, q: int):
    """Kernel magnitude ``|sin(q pi x) / sin(pi x)|``, periodic with period 1.

    Integer ``x`` hits the removable singularity; the limit value ``q`` is
    returned there.
    """
    if q < 1:
        raise DomainError(f"q must be >= 1, got {q}")
    return np.abs(dirichlet_ratio(np.asarray(x, dtype=float) * q, q))


def lobe_samples(frac_offset: float, q: int, n_lobe: int) -> tuple[float, float]:
    """Magnitudes of the kernel-sample pair associated with the n-th lobe.

    The sample grid is offset from the kernel peak by ``frac_offset``; the
    main lobe (``n_lobe = 1``) holds the two samples at ``frac_offset`` and
    ``frac_offset - 1``, and each farther lobe holds a single sample at one
    more integer step outward on its side.
    """
    if q < 2:
        raise DomainError(f"q must be >= 2, got {q}")
    if not 0.0 <= frac_offset < 1.0:
        raise DomainError(f"frac_offset must lie in [0, 1), got {frac_offset}")
    if not 1 <= n_lobe <= math.ceil(q / 2):
        raise DomainError(f"n_lobe must lie in [1, {math.ceil(q / 2)}], got {n_lobe}")
    plus = float(dirichlet_mag((frac_offset + (n_lobe - 1)) / q, q))
    minus = float(dirichlet_mag((frac_offset - 1 - (n_lobe - 1)) / q, q))
    return plus, minus


@dataclass(frozen=True)
class BandMask:
    """Binary circulant band, circularly shifted by the recorded amounts."""

    bits: np.ndarray
    shift_left: int
    shift_down: int


def make_mask(q: int, n_lobe: int, shift_left: int = 0, shift_down: int = 0) -> BandMask:
    """Identity plus ``n_lobe - 1`` circular super- and sub-diagonals, shifted.

    Shifts are signed and taken modulo ``q``: ``shift_left`` rotates columns
    leftward, ``shift_down`` rotates rows downward.
    """
    if not 1 <= n_lobe <= math.ceil(q / 2):
        raise DomainError(f"n_lobe must lie in [1, {math.ceil(q / 2)}], got {n_lobe}")
    half = n_lobe - 1
    d = (np.arange(q)[:, None] - np.arange(q)[None, :]) % q
    bits = (d <= half) | (d >= q - half)
    bits = np.roll(bits, -shift_left, axis=1)
    bits = np.roll(bits, shift_down, axis=0)
    return BandMask(bits, shift_left % q, shift_down % q)


def masks_for(cfg: SystemConfig, tau: float, doppler: float,
              n_lobe: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Selection masks for the four factored matrices at one hypothesis.

    Returns ``(mask_y, mask_x1, mask_x2)`` as boolean arrays of shapes
    (N, N), (M, M - k_tau) and (M, k_tau).  The Doppler mask is shifted left
    by ``ceil(doppler * N * T) mod N`` and applies to both Doppler-block
    matrices; the delay masks start from the M x M band shifted left
    (respectively down) by ``k_tau - 1`` positions and keep the first
    ``M - k_tau`` (respectively last ``k_tau``) columns.  With ``k_tau = 0``
    the second delay mask is empty and the band is unshifted.

    ``n_lobe`` is clamped per matrix family to its own ``ceil(Q/2)`` cap, so
    a single lobe count can be used for grids with different M and N.  At the
    cap both samples of every lobe pair fall inside the requested lobes
    (``2*lobe >= Q``), so the family's mask saturates to full coverage and
    the masked operator degenerates to the unmasked one exactly.
    """
    if n_lobe < 1:
        raise DomainError(f"n_lobe must be >= 1, got {n_lobe}")
    validate_channel_params(cfg, tau, doppler)
    m, n = cfg.num_subcarriers, cfg.num_slots
    k_tau = delay_tap_count(cfg, tau)

    def family_mask(q, shift_left=0, shift_down=0):
        lobe = min(n_lobe, math.ceil(q / 2))
        if 2 * lobe >= q:
            return np.ones((q, q), dtype=bool)
        return make_mask(q, lobe, shift_left, shift_down).bits

    l_fd = math.ceil(doppler * n * cfg.symbol_time) % n
    mask_y = family_mask(n, shift_left=l_fd)
    if k_tau == 0:
        mask_x1 = family_mask(m)
        mask_x2 = np.zeros((m, 0), dtype=bool)
    else:
        shift = (k_tau - 1) % m
        mask_x1 = family_mask(m, shift_left=shift)[:, : m - k_tau]
        mask_x2 = family_mask(m, shift_down=shift)[:, m - k_tau:]
    return mask_y, mask_x1, mask_x2


def dump_mask_csv(mask: np.ndarray, path) -> None:
    """Write a mask as ``row,col,bit`` lines for visual inspection."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["row", "col", "bit"])
        for i in range(mask.shape[0]):
            for j in range(mask.shape[1]):
                writer.writerow([i, j, int(mask[i, j])])
