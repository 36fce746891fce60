"""Command-line front end.

Subcommands map one-to-one onto the reproduction tasks:

  g2zero     phase diagram of the zero-delay correlation
  levels     dressed energies versus coupling, with crossing detection
  g2tau      delayed intensity correlation traces
  crosscorr  frequency-filtered cross-correlation traces
  spectrum   emission spectra
  baseline   standard-RWA master-equation comparison (flat g2 = 2)

Exit codes: 0 success, 2 configuration error, 3 numerical failure at one or
more points, 4 convergence-flag failure.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import plotting
from .errors import ConfigError, ThermalRabiError
from .sweep import (FORMATS, NORMALIZATIONS, TASKS, parse_config,
                    run_point_sweep, run_trace_task, write_sweep)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_CONVERGENCE = 4


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="thermalrabi",
        description="Photon statistics of thermal cavities at arbitrary "
                    "light-matter coupling")
    sub = parser.add_subparsers(dest="task", required=True, metavar="TASK")
    for task in TASKS:
        p = sub.add_parser(task, help=f"run the {task} task")
        p.add_argument("--config", metavar="PATH", default=None,
                       help="key=value config file; flags override it")
        p.add_argument("--g-min", type=float, default=None)
        p.add_argument("--g-max", type=float, default=None)
        p.add_argument("--g-steps", type=int, default=None)
        p.add_argument("--t-min", type=float, default=None)
        p.add_argument("--t-max", type=float, default=None)
        p.add_argument("--t-steps", type=int, default=None)
        p.add_argument("--n-fock", type=int, default=None)
        p.add_argument("--gamma-a", type=float, default=None)
        p.add_argument("--gamma-x", type=float, default=None)
        p.add_argument("--model", default=None,
                       help="rabi | multi-tls:N | two-mode")
        p.add_argument("--markers", action="store_true", default=None,
                       help="use the four phase-diagram marker points")
        p.add_argument("--normalize", choices=NORMALIZATIONS, default=None)
        p.add_argument("--tau-max", type=float, default=None)
        p.add_argument("--level-cut", type=int, default=None)
        p.add_argument("--out", metavar="DIR", default=None)
        p.add_argument("--workers", type=int, default=None)
        p.add_argument("--format", choices=FORMATS, default=None)
        p.add_argument("--no-plot", dest="plot", action="store_false",
                       default=None, help="skip figure rendering")
        p.add_argument("--no-convergence-check", dest="check_convergence",
                       action="store_false", default=None)
    return parser


def _overrides(args: argparse.Namespace) -> dict:
    skip = {"config", "task"}
    out = {k: v for k, v in vars(args).items() if k not in skip and v is not None}
    out["task"] = args.task
    return out


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = parse_config(args.config, _overrides(args))
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        if config.task in ("g2zero", "baseline"):
            result = run_point_sweep(config)
            paths = write_sweep(result)
            if config.plot and not config.markers:
                paths.append(plotting.render_g2zero_heatmap(
                    config.g_grid(), config.t_grid(), result.values_grid(),
                    Path(config.out) / f"{config.task}.png"))
            for p in paths:
                print(p)
            if result.n_failed:
                print(f"{result.n_failed} point(s) failed", file=sys.stderr)
                return EXIT_NUMERICAL
            if config.check_convergence and not result.all_converged:
                print("convergence flag failed at >= 1 point", file=sys.stderr)
                return EXIT_CONVERGENCE
            return EXIT_OK

        paths, statuses = run_trace_task(config)
        for p in paths:
            print(p)
        failed = [s for s in statuses if s != "ok"]
        if failed:
            print(f"{len(failed)} point(s) failed", file=sys.stderr)
            return EXIT_NUMERICAL
        return EXIT_OK
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ThermalRabiError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
