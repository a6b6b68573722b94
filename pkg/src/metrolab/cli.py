"""Command line interface.

    metrolab run <config.yaml>          execute a scenario, emit CSV + JSON
    metrolab list-scenarios             show scenario names and defaults
    metrolab fit <csv> --model inv-sqrt fit k1 + k2/sqrt(N) + k3/N to two columns
    metrolab bounds --hs-range R --E e [--d d] [--beta b] [--t t]

Exit codes: 0 success, 2 configuration errors, 3 numerical-accuracy failures.
"""
from __future__ import annotations

import argparse
import sys

from .bounds import (dephasing_bound, dynamical_bound, low_temperature_bound,
                     thermal_bound)
from .config import load_config
from .errors import ConfigError, IntegrationAccuracyError, MetrolabError
from .scenarios import SCENARIOS, fit_inverse_sqrt_regression, run_scenario
from .table import emit, parse_csv, render_real


def _cmd_run(args):
    config = load_config(args.config)
    table = run_scenario(config)
    paths = emit(table, formats=config.formats, output_dir=config.output_dir)
    for path in paths:
        print(path)
    return 0


def _cmd_list(args):
    for name in sorted(SCENARIOS):
        sdef = SCENARIOS[name]
        print(f"{name}: {sdef.description}")
        if args.verbose:
            for key, value in sorted(sdef.default_grids.items()):
                shown = value if len(value) <= 8 else value[:4] + ["..."] + value[-2:]
                print(f"    {key} = {shown}")
    return 0


def _cmd_fit(args):
    if args.model != "inv-sqrt":
        raise ConfigError(f"unknown fit model {args.model!r}")
    header, rows = parse_csv(args.csv)
    for col in (args.x, args.y):
        if col not in header:
            raise ConfigError(f"column {col!r} not in {args.csv} (has {header})")
    ix, iy = header.index(args.x), header.index(args.y)
    points = [(float(r[ix]), float(r[iy])) for r in rows]
    k1, k2, k3, rms = fit_inverse_sqrt_regression(points)
    print(f"k1 = {render_real(k1)}")
    print(f"k2 = {render_real(k2)}")
    print(f"k3 = {render_real(k3)}")
    print(f"rms = {render_real(rms)}")
    return 0


def _cmd_bounds(args):
    if args.hs_range <= 0:
        raise ConfigError("--hs-range must be positive")
    reports = []
    if args.t is not None:
        reports.append(dynamical_bound(args.hs_range, args.t))
    reports.append(dephasing_bound(args.hs_range, args.E, d=args.d))
    if args.beta is not None:
        reports.append(thermal_bound(args.hs_range, args.beta))
    if args.gap is not None:
        reports.append(low_temperature_bound(args.hs_range, args.gap))
    for rep in reports:
        print(f"{rep.kind}: {render_real(rep.value)}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="metrolab",
                                     description="many-body metrology scenario harness")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a scenario from a config file")
    p_run.add_argument("config")
    p_run.set_defaults(func=_cmd_run)

    p_list = sub.add_parser("list-scenarios", help="list scenario names")
    p_list.add_argument("-v", "--verbose", action="store_true")
    p_list.set_defaults(func=_cmd_list)

    p_fit = sub.add_parser("fit", help="regression fit over CSV columns")
    p_fit.add_argument("csv")
    p_fit.add_argument("--model", default="inv-sqrt")
    p_fit.add_argument("--x", default="N")
    p_fit.add_argument("--y", default="qfi_norm")
    p_fit.set_defaults(func=_cmd_fit)

    p_b = sub.add_parser("bounds", help="evaluate precision upper bounds")
    p_b.add_argument("--hs-range", type=float, required=True, dest="hs_range")
    p_b.add_argument("--E", type=float, required=True)
    p_b.add_argument("--d", type=int, default=None)
    p_b.add_argument("--beta", type=float, default=None)
    p_b.add_argument("--t", type=float, default=None)
    p_b.add_argument("--gap", type=float, default=None)
    p_b.set_defaults(func=_cmd_bounds)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except IntegrationAccuracyError as exc:
        print(f"numerical accuracy failure: {exc}", file=sys.stderr)
        return 3
    except MetrolabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
