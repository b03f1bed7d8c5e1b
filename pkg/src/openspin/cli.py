"""Command-line harness.

Subcommands: run, sweep-dt, compare, validate. Output lands in --output if
given, else under $OPENSPIN_OUTPUT_ROOT, else ./runs, in a directory named
after the config file. Exit codes: 0 success, 2 configuration error,
3 numeric failure, 4 resource guard, 1 anything else.
"""

import argparse
import logging
import os
import sys
from pathlib import Path

from .config import parse_config
from .errors import ConfigError, DimensionError, NumericError, OpenspinError
from .runner import compare_methods, run_experiment, sweep_dt

EXIT_OK = 0
EXIT_OTHER = 1
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_RESOURCE = 4


def _output_dir(args, suffix: str) -> Path:
    if args.output:
        return Path(args.output)
    root = os.environ.get("OPENSPIN_OUTPUT_ROOT", "runs")
    name = Path(args.config).stem
    if suffix:
        name = f"{name}-{suffix}"
    return Path(root) / name


def _parse_dts(text: str):
    try:
        dts = [float(s) for s in text.split(",") if s.strip()]
    except ValueError as exc:
        raise ConfigError(f"cannot parse --dts {text!r}: {exc}") from exc
    if not dts:
        raise ConfigError("--dts must list at least one value")
    return dts


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="openspin",
        description="Open-system spin dynamics: surrogate channel, reconstruction, "
        "trajectory sampling, and an exact reference integrator.",
    )
    parser.add_argument("--log-level", default="WARNING",
                        help="python logging level (default WARNING)")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute one experiment config")
    p_run.add_argument("config")
    p_run.add_argument("--output", help="output directory (default from config name)")
    p_run.add_argument("--threads", type=int, default=1,
                       help="parallelism cap (used by sweeps; runs are sequential)")

    p_sweep = sub.add_parser("sweep-dt", help="error-vs-oracle table over a dt list")
    p_sweep.add_argument("config")
    p_sweep.add_argument("--dts", required=True, help="comma-separated dt values")
    p_sweep.add_argument("--output")
    p_sweep.add_argument("--threads", type=int, default=1)

    p_cmp = sub.add_parser("compare", help="reconstructed vs adjoint-direct vs oracle")
    p_cmp.add_argument("config")
    p_cmp.add_argument("--output")

    p_val = sub.add_parser("validate", help="parse and validate a config, run nothing")
    p_val.add_argument("config")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=getattr(logging, args.log_level.upper(), logging.WARNING))
    try:
        cfg = parse_config(args.config)
        if args.command == "validate":
            print(f"{args.config}: valid ({cfg.model_kind}, n={cfg.n}, dt={cfg.dt}, "
                  f"T={cfg.T}, strategy={cfg.strategy.kind}, sampler={cfg.sampler_kind})")
            return EXIT_OK
        if args.command == "run":
            outdir = _output_dir(args, "")
            series = run_experiment(cfg, outdir)
            print(f"wrote {outdir / 'results.csv'} ({len(series.records)} rows) "
                  f"and {outdir / 'metadata.json'}")
            return EXIT_OK
        if args.command == "sweep-dt":
            outdir = _output_dir(args, "sweep")
            table = sweep_dt(cfg, _parse_dts(args.dts), outdir, threads=args.threads)
            print(f"wrote {outdir / 'sweep.csv'} ({len(table)} rows)")
            for row in table:
                print(f"  dt={row['dt']:g} {row['observable']}: "
                      f"max error {row['max_abs_error']:.3e} "
                      f"(bound {row['bound_T_dt']:g})")
            return EXIT_OK
        outdir = _output_dir(args, "compare")
        summary = compare_methods(cfg, outdir)
        print(f"wrote {outdir / 'results.csv'}, defect_trace.csv, compare_summary.json")
        print(f"  final steady-state defect {summary['steady_state_defect_final']:.3e}")
        for label, devs in summary["observables"].items():
            print(f"  {label}: reconstructed dev {devs['max_abs_dev_reconstructed']:.3e}, "
                  f"direct dev {devs['max_abs_dev_adjoint_direct']:.3e}, "
                  f"final gap {devs['final_gap_reconstructed_vs_direct']:.3e}")
        return EXIT_OK
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (DimensionError, MemoryError) as exc:
        print(f"resource guard: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except OpenspinError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_OTHER


if __name__ == "__main__":
    sys.exit(main())
