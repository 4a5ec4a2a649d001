"""Command-line front end: rmse / crlb / inspect / selftest subcommands.

Exit codes: 0 success, 1 selftest failure, 2 configuration error,
3 numerical-guard error, 4 I/O error.
"""
from __future__ import annotations

import argparse
import dataclasses
import sys

from .errors import ConfigError, DomainError, GuardError
from .harness import (inspect_operator, load_experiment, run_crlb_curve,
                      run_rmse_sweep)
from .selftest import run_selftest

EXIT_OK = 0
EXIT_SELFTEST_FAILED = 1
EXIT_CONFIG = 2
EXIT_GUARD = 3
EXIT_IO = 4


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="otfs-sensing",
        description="Delay-Doppler sensing experiments: Monte-Carlo RMSE sweeps, "
                    "bound curves, and channel-operator inspection.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, needs_config=True):
        if needs_config:
            p.add_argument("--config", required=True, help="experiment config file")
        p.add_argument("--seed", type=int, default=None,
                       help="override the config seed (unsigned 64-bit)")
        p.add_argument("--out", default=None, help="output path override")

    p_rmse = sub.add_parser("rmse", help="run the Monte-Carlo RMSE sweep")
    add_common(p_rmse)
    p_rmse.add_argument("--noiseless", action="store_true",
                        help="disable receiver noise (exact-recovery checks)")
    p_rmse.add_argument("--threads", type=int, default=1,
                        help="worker threads for the trial fan-out")

    p_crlb = sub.add_parser("crlb", help="evaluate the bound curve over the SNR list")
    add_common(p_crlb)

    p_inspect = sub.add_parser("inspect", help="dump operator structure and entry counts")
    add_common(p_inspect)
    p_inspect.add_argument("--tau-s", type=float, default=None,
                           help="delay hypothesis (defaults to the config target)")
    p_inspect.add_argument("--doppler-hz", type=float, default=None,
                           help="Doppler hypothesis (defaults to the config target)")
    p_inspect.add_argument("--n-lobe", type=int, default=2,
                           help="lobe count for the masked route (0 = full)")
    p_inspect.add_argument("--summary-only", action="store_true",
                           help="skip the dense magnitude dump (no grid-size guard)")

    sub.add_parser("selftest", help="run the built-in oracle-equivalence suite")
    return parser


def _load(args):
    config = load_experiment(args.config)
    if args.seed is not None:
        if args.seed < 0:
            raise ConfigError(f"--seed must be non-negative, got {args.seed}")
        config = dataclasses.replace(config, seed=args.seed)
    return config


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "selftest":
            return EXIT_OK if run_selftest() else EXIT_SELFTEST_FAILED

        config = _load(args)
        if args.command == "rmse":
            rows = run_rmse_sweep(config, threads=args.threads,
                                  noiseless=args.noiseless, out_path=args.out)
            for row in rows:
                print(f"snr={row.snr_db:+.1f} dB  n_lobe={row.n_lobe}  "
                      f"rmse_range={row.rmse_range_m:.4g} m  "
                      f"rmse_velocity={row.rmse_velocity_mps:.4g} m/s  "
                      f"crlb=({row.crlb_range_m:.4g} m, {row.crlb_velocity_mps:.4g} m/s)  "
                      f"ops/hyp={row.mean_ops_per_hypothesis:.1f}  "
                      f"[{row.wall_time_s:.2f} s]")
        elif args.command == "crlb":
            rows = run_crlb_curve(config, out_path=args.out)
            for snr_db, crlb_range, crlb_velocity in rows:
                print(f"snr={snr_db:+.1f} dB  crlb_range={crlb_range:.6g} m  "
                      f"crlb_velocity={crlb_velocity:.6g} m/s")
        elif args.command == "inspect":
            summary = inspect_operator(
                config, tau=args.tau_s, doppler=args.doppler_hz,
                n_lobe=args.n_lobe, dense=not args.summary_only,
                out_dir=args.out)
            for key, value in summary.items():
                print(f"{key} = {value}")
        return EXIT_OK
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (GuardError, DomainError) as exc:
        print(f"numerical-guard error: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
