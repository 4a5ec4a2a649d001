"""Built-in oracle-equivalence checks, runnable without the test suite."""
from __future__ import annotations

import numpy as np

from .crosstalk import (apply, apply_adjoint, compose, direct_crosstalk,
                        factored_crosstalk, partials)
from .dirichlet import masks_for
from .grid import isfft, make_config, random_dd_frame, sfft, vectorize


def _sfft_slow(frame):
    m, n = frame.shape
    out = np.zeros((n, m), dtype=complex)
    for nn in range(n):
        for mm in range(m):
            acc = 0.0j
            for k in range(m):
                for l in range(n):
                    acc += frame[k, l] * np.exp(-2j * np.pi * (mm * k / m - nn * l / n))
            out[nn, mm] = acc
    return out


def run_selftest(log=print) -> bool:
    """Run the oracle-equivalence suite; returns True when every check passes."""
    checks = []

    def record(name, passed, detail=""):
        checks.append(passed)
        log(f"{'PASS' if passed else 'FAIL'}  {name}{'  (' + detail + ')' if detail else ''}")

    cfg = make_config(5.89e9, 156.25e3, 8, 4)
    rng = np.random.default_rng(99)
    tau_span = (cfg.num_subcarriers - 1) / (cfg.num_subcarriers * cfg.subcarrier_spacing)

    ident = direct_crosstalk(cfg, 0.0, 0.0).entries
    record("identity channel at (tau, doppler) = (0, 0)",
           np.abs(ident - np.eye(cfg.grid_size)).max() < 1e-12)

    worst = 0.0
    for _ in range(10):
        tau = rng.uniform(0.0, tau_span * 0.999)
        doppler = rng.uniform(-0.999, 0.999) * cfg.subcarrier_spacing
        dense = direct_crosstalk(cfg, tau, doppler).entries
        factored = compose(factored_crosstalk(cfg, tau, doppler)).entries
        worst = max(worst, np.abs(dense - factored).max())
    record("factored composition matches the literal dense operator",
           worst < 1e-9, f"max err {worst:.2e}")

    tau = 0.3 / (cfg.num_subcarriers * cfg.subcarrier_spacing)
    doppler = 0.2 / (cfg.num_slots * cfg.symbol_time)
    f = factored_crosstalk(cfg, tau, doppler)
    dense = compose(f).entries
    x = vectorize(random_dd_frame(cfg, 1))
    y = vectorize(random_dd_frame(cfg, 2))
    record("matrix-free apply matches the dense product",
           np.abs(apply(f, x) - dense @ x).max() / np.abs(dense @ x).max() < 1e-9)
    record("matrix-free adjoint matches the dense product",
           np.abs(apply_adjoint(f, y) - dense.conj().T @ y).max()
           / np.abs(dense.conj().T @ y).max() < 1e-9)

    frame = random_dd_frame(cfg, 3)
    record("transform round trip recovers the frame",
           np.abs(isfft(sfft(frame)) - frame).max() < 1e-10)
    record("fast forward transform matches the literal double sum",
           np.abs(sfft(frame) - _sfft_slow(frame)).max() < 1e-10)

    odd = make_config(5.89e9, 156.25e3, 9, 5)
    tau = 0.4 / (odd.num_subcarriers * odd.subcarrier_spacing)
    doppler = 0.3 / (odd.num_slots * odd.symbol_time)
    masks = masks_for(odd, tau, doppler, max((odd.num_subcarriers + 1) // 2,
                                             (odd.num_slots + 1) // 2))
    full = compose(factored_crosstalk(odd, tau, doppler)).entries
    masked = compose(factored_crosstalk(odd, tau, doppler, masks=masks)).entries
    record("maximal-lobe masks keep the whole operator (odd dimensions)",
           np.abs(full - masked).max() == 0.0)

    m, n = cfg.num_subcarriers, cfg.num_slots
    record("full factored build evaluates exactly 2N^2 + M^2 entries",
           f.ops_evaluated == 2 * n * n + m * m)

    d_tau, d_fd = partials(cfg, tau2 := 0.37 * tau_span, fd2 := 0.21 * cfg.subcarrier_spacing)
    step_t = 1e-6 / (cfg.num_subcarriers * cfg.subcarrier_spacing)
    step_f = 1e-4 / (cfg.num_slots * cfg.symbol_time)
    fd_tau = (direct_crosstalk(cfg, tau2 + step_t, fd2).entries
              - direct_crosstalk(cfg, tau2 - step_t, fd2).entries) / (2 * step_t)
    fd_fd = (direct_crosstalk(cfg, tau2, fd2 + step_f).entries
             - direct_crosstalk(cfg, tau2, fd2 - step_f).entries) / (2 * step_f)
    err_t = np.abs(d_tau.dense() - fd_tau).max() / np.abs(fd_tau).max()
    err_f = np.abs(d_fd.dense() - fd_fd).max() / np.abs(fd_fd).max()
    record("analytic derivatives match central differences",
           err_t < 1e-5 and err_f < 1e-5, f"rel err {err_t:.2e}, {err_f:.2e}")

    return all(checks)
