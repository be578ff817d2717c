"""Command-line front end.

Subcommands:
    estimate         one estimate per method at the configured threshold
    theta-sweep      second moment across a theta grid
    threshold-sweep  second moment across a threshold grid (minmax theta)
    efficiency       variance-reduction factors across a threshold grid
    diagnose         tail-dominance and optimality diagnostics

Exit codes: 0 success, 2 config error, 3 numeric/domain error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .experiments import (
    ConfigError,
    efficiency_rows_to_csv,
    parse_config,
    parse_methods,
    run_diagnostics,
    run_efficiency_sweep,
    run_single_estimate,
    run_theta_sweep,
    run_threshold_sweep,
    sweep_rows_to_csv,
)

_COMMANDS = ("estimate", "theta-sweep", "threshold-sweep", "efficiency", "diagnose")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tailtwist",
        description=(
            "Estimate P(sum of heavy-tailed components > threshold) by "
            "hazard-rate twisting importance sampling."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="config file path")
        p.add_argument("--out", help="output path (default: stdout)")
        p.add_argument("--seed", type=int, help="override the config seed")
        p.add_argument("--runs", type=int, help="override replications per estimate")
        p.add_argument("--method", help="override methods, comma-separated")
        p.add_argument("--workers", type=int, default=1, help="parallel chunk workers")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        try:
            text = Path(args.config).read_text()
        except OSError as exc:
            raise ConfigError(None, f"cannot read config: {exc}")
        config = parse_config(text)
        methods = parse_methods(args.method) if args.method else None
        config = config.override(runs=args.runs, seed=args.seed, methods=methods)

        if args.command == "theta-sweep" and not config.theta_grid:
            raise ConfigError(None, "theta-sweep needs a theta_grid in the config")
        if args.command in ("threshold-sweep", "efficiency", "diagnose") and not config.gamma_grid_db:
            raise ConfigError(None, f"{args.command} needs a gamma_grid_db in the config")

        if args.command == "estimate":
            output = sweep_rows_to_csv(run_single_estimate(config, args.workers))
        elif args.command == "theta-sweep":
            output = sweep_rows_to_csv(run_theta_sweep(config, args.workers))
        elif args.command == "threshold-sweep":
            output = sweep_rows_to_csv(run_threshold_sweep(config, args.workers))
        elif args.command == "efficiency":
            output = efficiency_rows_to_csv(run_efficiency_sweep(config, args.workers))
        else:
            output = run_diagnostics(config, args.workers).to_text()
    except ConfigError as exc:
        print(f"tailtwist: config error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, ArithmeticError) as exc:
        print(f"tailtwist: error: {exc}", file=sys.stderr)
        return 3

    if args.out:
        Path(args.out).write_text(output)
    else:
        sys.stdout.write(output)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
