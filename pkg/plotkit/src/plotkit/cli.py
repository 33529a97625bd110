"""Command line interface: ``plotkit render`` turns an experiment CSV into
an SVG or PNG figure."""

import argparse
import sys

from .errors import PlotkitError
from .render import PlotSpec, X_AXES, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plotkit",
        description="Render experiment CSV tables as figures.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("render", help="render a CSV to an SVG/PNG figure")
    p.add_argument("--csv", required=True, help="input CSV file")
    p.add_argument("--x", required=True, choices=X_AXES,
                   help="column used for the x axis")
    p.add_argument("--group", default="family",
                   help="column whose values become separate lines "
                        "(default: family)")
    p.add_argument("--out", required=True, help="output figure path")
    p.add_argument("--format", default="svg", choices=("svg", "png"),
                   help="output format (default: svg)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        spec = PlotSpec(input_csv=args.csv, x_axis=args.x,
                        group_by=args.group, output=args.out,
                        format=args.format)
        path = render(spec)
    except PlotkitError as exc:
        print(f"plotkit: {exc}", file=sys.stderr)
        return exc.exit_code
    print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
