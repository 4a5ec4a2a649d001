"""Configuration-driven Monte-Carlo RMSE sweeps, bound curves, and inspection.

Experiment files are plain ``key = value`` text ('#' starts a comment, lists
are comma-separated); physical quantities carry their unit in the key name::

    carrier_freq_hz       = 5.89e9
    subcarrier_spacing_hz = 156.25e3
    num_subcarriers       = 16
    num_slots             = 8
    target_range_m        = 20
    target_speed_kmh      = 80          # or target_speed_mps
    snr_db                = -10, -5, 0
    n_lobe                = 0, 1, 2, 5  # 0 = full (unapproximated) estimator
    iterations            = 200
    seed                  = 2024
    grid_m_prime          = 128         # optional, default 4*num_subcarriers
    grid_n_prime          = 64          # optional, default 4*num_slots
    grid_tau_min_s        = 0.0         # optional window overrides
    grid_tau_max_s        = 3.0e-6
    grid_doppler_min_hz   = -39062.5
    grid_doppler_max_hz   = 39062.5
    output_path           = sweep.csv   # optional

Sweep CSVs are deterministic per (config, seed) byte for byte, also across
thread counts; wall-clock timings therefore live only on the in-memory rows,
never in the file.
"""
from __future__ import annotations

import csv
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import crlb as crlb_mod
from .crosstalk import direct_crosstalk, factored_crosstalk
from .dirichlet import dump_mask_csv, masks_for
from .errors import ConfigError, GuardError
from .estimator import SearchGrid, default_grid, ml_estimate, simulate_rx
from .grid import (SensingTarget, SystemConfig, make_config, random_dd_frame,
                   target_params, validate_channel_params)

# XOR salt separating the per-trial noise stream from the symbol stream.
NOISE_SEED_SALT = 0x9E3779B97F4A7C15

_DENSE_DUMP_LIMIT = 4096

SWEEP_CSV_COLUMNS = ("snr_db", "n_lobe", "rmse_range_m", "rmse_velocity_mps",
                     "crlb_range_m", "crlb_velocity_mps", "mean_ops_per_hypothesis")
CRLB_CSV_COLUMNS = ("snr_db", "crlb_range_m", "crlb_velocity_mps")


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated experiment description for the sweep runners."""

    system: SystemConfig
    target: SensingTarget
    snr_db: tuple
    n_lobe: tuple
    iterations: int
    seed: int
    grid: SearchGrid
    output_path: str | None = None


@dataclass(frozen=True)
class SweepRow:
    """One (snr, n_lobe) result row; wall time is not part of the CSV."""

    snr_db: float
    n_lobe: int
    rmse_range_m: float
    rmse_velocity_mps: float
    crlb_range_m: float
    crlb_velocity_mps: float
    mean_ops_per_hypothesis: float
    wall_time_s: float


_REQUIRED_KEYS = ("carrier_freq_hz", "subcarrier_spacing_hz", "num_subcarriers",
                  "num_slots", "target_range_m", "snr_db", "iterations", "seed")
_KNOWN_KEYS = set(_REQUIRED_KEYS) | {
    "target_speed_mps", "target_speed_kmh", "n_lobe", "output_path",
    "grid_m_prime", "grid_n_prime", "grid_tau_min_s", "grid_tau_max_s",
    "grid_doppler_min_hz", "grid_doppler_max_hz",
}


def _parse_scalar(key, text, kind):
    try:
        if kind is int:
            value = int(text, 0)
        else:
            value = float(text)
    except ValueError as exc:
        raise ConfigError(f"{key}: cannot parse {text!r} as {kind.__name__}") from exc
    return value


def _parse_list(key, text, kind):
    items = [part.strip() for part in text.split(",") if part.strip()]
    if not items:
        raise ConfigError(f"{key}: list must not be empty")
    return tuple(_parse_scalar(key, item, kind) for item in items)


def parse_experiment(text: str) -> ExperimentConfig:
    """Parse and validate an experiment from ``key = value`` text."""
    raw: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, value = (part.strip() for part in stripped.split("=", 1))
        if key not in _KNOWN_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in raw:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        raw[key] = value

    for key in _REQUIRED_KEYS:
        if key not in raw:
            raise ConfigError(f"{key}: required key missing")
    if "target_speed_mps" in raw and "target_speed_kmh" in raw:
        raise ConfigError("target_speed_mps and target_speed_kmh are mutually exclusive")
    if "target_speed_mps" not in raw and "target_speed_kmh" not in raw:
        raise ConfigError("target_speed_mps (or target_speed_kmh): required key missing")

    try:
        system = make_config(
            _parse_scalar("carrier_freq_hz", raw["carrier_freq_hz"], float),
            _parse_scalar("subcarrier_spacing_hz", raw["subcarrier_spacing_hz"], float),
            _parse_scalar("num_subcarriers", raw["num_subcarriers"], int),
            _parse_scalar("num_slots", raw["num_slots"], int),
        )
    except ConfigError as exc:
        raise ConfigError(f"system: {exc}") from exc

    if "target_speed_mps" in raw:
        speed = _parse_scalar("target_speed_mps", raw["target_speed_mps"], float)
    else:
        speed = _parse_scalar("target_speed_kmh", raw["target_speed_kmh"], float) / 3.6
    target = SensingTarget(
        range_m=_parse_scalar("target_range_m", raw["target_range_m"], float),
        speed_mps=speed)
    if target.range_m < 0:
        raise ConfigError(f"target_range_m: must be >= 0, got {target.range_m}")

    snr_db = _parse_list("snr_db", raw["snr_db"], float)
    n_lobe = _parse_list("n_lobe", raw["n_lobe"], int) if "n_lobe" in raw else (0,)
    for value in n_lobe:
        if value < 0:
            raise ConfigError(f"n_lobe: entries must be >= 0 (0 = full), got {value}")
    iterations = _parse_scalar("iterations", raw["iterations"], int)
    if iterations < 1:
        raise ConfigError(f"iterations: must be >= 1, got {iterations}")
    seed = _parse_scalar("seed", raw["seed"], int)
    if seed < 0:
        raise ConfigError(f"seed: must be a non-negative 64-bit integer, got {seed}")

    base = default_grid(system)
    grid = SearchGrid(
        tau_min=_parse_scalar("grid_tau_min_s", raw["grid_tau_min_s"], float)
        if "grid_tau_min_s" in raw else base.tau_min,
        tau_max=_parse_scalar("grid_tau_max_s", raw["grid_tau_max_s"], float)
        if "grid_tau_max_s" in raw else base.tau_max,
        doppler_min=_parse_scalar("grid_doppler_min_hz", raw["grid_doppler_min_hz"], float)
        if "grid_doppler_min_hz" in raw else base.doppler_min,
        doppler_max=_parse_scalar("grid_doppler_max_hz", raw["grid_doppler_max_hz"], float)
        if "grid_doppler_max_hz" in raw else base.doppler_max,
        m_prime=_parse_scalar("grid_m_prime", raw["grid_m_prime"], int)
        if "grid_m_prime" in raw else base.m_prime,
        n_prime=_parse_scalar("grid_n_prime", raw["grid_n_prime"], int)
        if "grid_n_prime" in raw else base.n_prime,
    )
    if grid.m_prime < system.num_subcarriers or grid.n_prime < system.num_slots:
        raise ConfigError(
            f"grid_m_prime/grid_n_prime: must be at least num_subcarriers="
            f"{system.num_subcarriers} / num_slots={system.num_slots}")
    if not grid.tau_min <= grid.tau_max:
        raise ConfigError("grid_tau_min_s: must not exceed grid_tau_max_s")
    if not grid.doppler_min <= grid.doppler_max:
        raise ConfigError("grid_doppler_min_hz: must not exceed grid_doppler_max_hz")

    tau, doppler, _ = target_params(target, system)
    try:
        validate_channel_params(system, tau, doppler)
        validate_channel_params(system, grid.tau_min, 0.0)
        validate_channel_params(system, grid.tau_max, grid.doppler_min)
        validate_channel_params(system, grid.tau_max, grid.doppler_max)
    except Exception as exc:
        raise ConfigError(f"target/grid: {exc}") from exc

    return ExperimentConfig(system=system, target=target, snr_db=snr_db,
                            n_lobe=n_lobe, iterations=iterations, seed=seed,
                            grid=grid, output_path=raw.get("output_path"))


def load_experiment(path) -> ExperimentConfig:
    """Read and parse an experiment config file."""
    with open(path, "r", encoding="utf-8") as fh:
        return parse_experiment(fh.read())


def _crlb_at(config: ExperimentConfig, snr_db: float) -> tuple[float, float]:
    tau, doppler, h_prime = target_params(config.target, config.system)
    frame = random_dd_frame(config.system, config.seed)
    sigma_w2 = 10.0 ** (-snr_db / 10.0)
    theta = (abs(h_prime), float(np.angle(h_prime)), tau, doppler)
    j = crlb_mod.fisher(frame, config.system, theta, sigma_w2)
    return crlb_mod.bounds(j, config.system)


def run_rmse_sweep(config: ExperimentConfig, threads: int = 1,
                   noiseless: bool = False, out_path=None) -> list[SweepRow]:
    """Monte-Carlo RMSE of range/velocity for every (snr_db, n_lobe) pair.

    Each trial draws a fresh frame and noise realization from the trial seed
    ``seed XOR trial_index``; trials may fan out to a thread pool but are
    always reduced in trial order, so the output does not depend on the
    thread count.  Writes one CSV row per pair when a path is given (the
    config's ``output_path`` serves as default).
    """
    cfg = config.system
    tau, doppler, h_prime = target_params(config.target, cfg)
    channel = factored_crosstalk(cfg, tau, doppler)

    def trial(args):
        snr_db, n_lobe, index = args
        trial_seed = config.seed ^ index
        frame = random_dd_frame(cfg, trial_seed)
        rx = simulate_rx(channel, frame, h_prime, snr_db,
                         seed=trial_seed ^ NOISE_SEED_SALT, noiseless=noiseless)
        est = ml_estimate(frame, rx, cfg, config.grid, n_lobe or None)
        return ((est.range_hat - config.target.range_m) ** 2,
                (est.velocity_hat - config.target.speed_mps) ** 2,
                est.ops_used, est.n_hypotheses)

    rows: list[SweepRow] = []
    for snr_db in config.snr_db:
        if noiseless:
            crlb_range, crlb_velocity = 0.0, 0.0
        else:
            crlb_range, crlb_velocity = _crlb_at(config, snr_db)
        for n_lobe in config.n_lobe:
            started = time.perf_counter()
            jobs = [(snr_db, n_lobe, i) for i in range(config.iterations)]
            if threads > 1:
                with ThreadPoolExecutor(max_workers=threads) as pool:
                    results = list(pool.map(trial, jobs))
            else:
                results = [trial(job) for job in jobs]
            sq_range = sum(r[0] for r in results)
            sq_velocity = sum(r[1] for r in results)
            total_ops = sum(r[2] for r in results)
            total_hyp = sum(r[3] for r in results)
            rows.append(SweepRow(
                snr_db=float(snr_db),
                n_lobe=int(n_lobe),
                rmse_range_m=math.sqrt(sq_range / config.iterations),
                rmse_velocity_mps=math.sqrt(sq_velocity / config.iterations),
                crlb_range_m=crlb_range,
                crlb_velocity_mps=crlb_velocity,
                mean_ops_per_hypothesis=total_ops / total_hyp,
                wall_time_s=time.perf_counter() - started,
            ))
    path = out_path if out_path is not None else config.output_path
    if path is not None:
        write_sweep_csv(rows, path)
    return rows


def run_crlb_curve(config: ExperimentConfig, out_path=None) -> list[tuple]:
    """Bound values per SNR point for the configured target and seed frame."""
    rows = []
    for snr_db in config.snr_db:
        crlb_range, crlb_velocity = _crlb_at(config, snr_db)
        rows.append((float(snr_db), crlb_range, crlb_velocity))
    path = out_path if out_path is not None else config.output_path
    if path is not None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(CRLB_CSV_COLUMNS)
            for row in rows:
                writer.writerow([repr(float(v)) for v in row])
    return rows


def inspect_operator(config: ExperimentConfig, tau: float | None = None,
                     doppler: float | None = None, n_lobe: int = 2,
                     dense: bool = True, out_dir=None) -> dict:
    """Entry-count accounting (and optional CSV dumps) for one hypothesis.

    Reports the per-hypothesis evaluated-entry counts of the dense literal
    route, the full factored route, and the masked factored route, plus the
    dense-to-masked ratio.  Dense magnitude dumps are guarded to grids of at
    most 4096 symbols; pass ``dense=False`` for a factored-only summary.
    """
    cfg = config.system
    if tau is None or doppler is None:
        t_tau, t_doppler, _ = target_params(config.target, cfg)
        tau = t_tau if tau is None else tau
        doppler = t_doppler if doppler is None else doppler
    size = cfg.grid_size
    full = factored_crosstalk(cfg, tau, doppler)
    if n_lobe:
        masks = masks_for(cfg, tau, doppler, n_lobe)
        masked = factored_crosstalk(cfg, tau, doppler, masks=masks)
    else:
        masks = None
        masked = full
    summary = {
        "num_subcarriers": cfg.num_subcarriers,
        "num_slots": cfg.num_slots,
        "tau_s": float(tau),
        "doppler_hz": float(doppler),
        "k_tau": full.k_tau,
        "n_lobe": int(n_lobe),
        "full_direct_entries": size * size,
        "full_factored_entries": full.ops_evaluated,
        "masked_factored_entries": masked.ops_evaluated,
        "direct_to_masked_ratio": size * size / masked.ops_evaluated,
    }
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        if dense:
            if size > _DENSE_DUMP_LIMIT:
                raise GuardError(
                    f"dense dump needs a grid of at most {_DENSE_DUMP_LIMIT} symbols "
                    f"(got {size}); request the factored-only summary instead")
            from .crosstalk import dump_magnitude_csv
            dump_magnitude_csv(direct_crosstalk(cfg, tau, doppler),
                               os.path.join(out_dir, "psi_magnitude.csv"))
        if masks is not None:
            dump_mask_csv(masks[0], os.path.join(out_dir, "mask_doppler.csv"))
            dump_mask_csv(masks[1], os.path.join(out_dir, "mask_delay_ici.csv"))
            dump_mask_csv(masks[2], os.path.join(out_dir, "mask_delay_isi.csv"))
    return summary


def write_sweep_csv(rows, path) -> None:
    """Write sweep rows with repr-exact floats (lossless round trip)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SWEEP_CSV_COLUMNS)
        for row in rows:
            writer.writerow([
                repr(float(row.snr_db)), int(row.n_lobe),
                repr(float(row.rmse_range_m)), repr(float(row.rmse_velocity_mps)),
                repr(float(row.crlb_range_m)), repr(float(row.crlb_velocity_mps)),
                repr(float(row.mean_ops_per_hypothesis)),
            ])


def read_sweep_csv(path) -> list[SweepRow]:
    """Parse a sweep CSV back into rows (wall time is not stored; it reads 0)."""
    rows = []
    with open(path, "r", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != SWEEP_CSV_COLUMNS:
            raise ConfigError(f"unexpected sweep CSV header: {header}")
        for rec in reader:
            rows.append(SweepRow(
                snr_db=float(rec[0]), n_lobe=int(rec[1]),
                rmse_range_m=float(rec[2]), rmse_velocity_mps=float(rec[3]),
                crlb_range_m=float(rec[4]), crlb_velocity_mps=float(rec[5]),
                mean_ops_per_hypothesis=float(rec[6]), wall_time_s=0.0))
    return rows
