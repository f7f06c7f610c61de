"""Command-line entry point.

    polyfilter-convert convert --source {planetoid|webkb} --in RAW --out DIR
    polyfilter-convert plot --csv ABLATION.csv --out CHART.png

Exit codes: 0 success, 1 conversion/plot error.
"""

from __future__ import annotations

import argparse
import sys

from .errors import ConvertError
from .planetoid import convert_planetoid
from .plotting import plot_results
from .webkb import convert_webkb


def cmd_convert(args) -> int:
    fn = convert_planetoid if args.source == "planetoid" else convert_webkb
    out = fn(args.in_dir, args.out)
    print(f"wrote dataset directory {out}")
    return 0


def cmd_plot(args) -> int:
    n = plot_results(args.csv, args.out)
    print(f"wrote {args.out} ({n} series)")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polyfilter-convert",
        description="Convert raw graph datasets; plot ablation CSVs")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("convert", help="raw files -> portable dataset dir")
    p.add_argument("--source", choices=("planetoid", "webkb"), required=True)
    p.add_argument("--in", dest="in_dir", required=True,
                   help="directory holding the raw files")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("plot", help="ablation CSV -> line chart")
    p.add_argument("--csv", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_plot)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConvertError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
