"""Command line: render one figure kind from a simulator output file."""

from __future__ import annotations

import argparse
import sys

from .figures import plot_sweep1d, plot_sweep2d, plot_trajectory
from .schemas import SchemaError

KINDS = {
    "trajectory": plot_trajectory,
    "sweep1d": plot_sweep1d,
    "sweep2d": plot_sweep2d,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="divestplots",
        description="Render figures from divestsim CSV outputs",
    )
    sub = parser.add_subparsers(dest="kind", required=True)
    for name in KINDS:
        p = sub.add_parser(name, help=f"render a {name} figure")
        p.add_argument("input", help="simulator CSV file")
        p.add_argument("output", help="image file to write (png, pdf, svg)")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        out = KINDS[args.kind](args.input, args.output)
    except SchemaError as exc:
        print(f"divestplots: schema error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"divestplots: {exc}", file=sys.stderr)
        return 1
    print(out)
    return 0


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
