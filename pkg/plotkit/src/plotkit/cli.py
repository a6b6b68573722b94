"""plotkit render <figure-spec.yaml> [more specs...]"""
from __future__ import annotations

import argparse
import sys

from .expr import ExpressionError
from .render import render
from .spec import SpecError, load_spec


def main(argv=None):
    parser = argparse.ArgumentParser(prog="plotkit",
                                     description="render metrolab CSV tables into figures")
    sub = parser.add_subparsers(dest="command", required=True)
    p_render = sub.add_parser("render", help="render one or more figure specs")
    p_render.add_argument("specs", nargs="+")
    args = parser.parse_args(argv)
    try:
        for path in args.specs:
            out = render(load_spec(path))
            print(out)
    except (SpecError, ExpressionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
