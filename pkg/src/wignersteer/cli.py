"""Command-line front end: ``wignersteer <scenario> [--config PATH] [flags]``.

Exit codes: 0 success, 2 scenario assertion failure, 3 configuration error.
"""
from __future__ import annotations

import argparse
import sys

from .scenarios import SCENARIOS, ConfigError, ScenarioConfig, ScenarioFailure
from .conditional import ConditioningError, HeraldImpossibleError


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wignersteer", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="scenario", required=True)
    for name, fn in SCENARIOS.items():
        p = sub.add_parser(name, help=(fn.__doc__ or "").strip().splitlines()[0])
        p.add_argument("--config", help="JSON scenario config")
        p.add_argument("--out", help="output directory (overrides config)")
        p.add_argument("--grid-n", type=int, help="points per axis of the main grid")
        p.add_argument("--grid-l", type=float, help="half-width of the main grid")
        p.add_argument("--seed", type=int, help="seed for random-point scans")
    return parser


def load_config(args) -> ScenarioConfig:
    if args.config:
        cfg = ScenarioConfig.from_file(args.config)
        if cfg.scenario != args.scenario:
            raise ConfigError(f"config is for scenario {cfg.scenario!r}, not {args.scenario!r}")
    else:
        cfg = ScenarioConfig(args.scenario)
    if args.out:
        cfg.out_dir = args.out
    if args.grid_n is not None:
        if args.grid_n < 16 or args.grid_n % 2:
            raise ConfigError("--grid-n must be an even integer >= 16")
        cfg.grid = {**cfg.grid, "n": args.grid_n}
    if args.grid_l is not None:
        if not args.grid_l > 0:
            raise ConfigError("--grid-l must be positive")
        cfg.grid = {**cfg.grid, "half_width": args.grid_l}
    if args.seed is not None:
        cfg.seed = args.seed
    return cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args)
        report = SCENARIOS[args.scenario](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 3
    except (ScenarioFailure, HeraldImpossibleError, ConditioningError) as exc:
        print(f"FAIL: {exc}", file=sys.stderr)
        return 2
    print(f"{args.scenario}: {report['status']} -> {cfg.out_dir}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
