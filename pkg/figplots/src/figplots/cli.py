"""Command line: figplots <family> --in a.csv [--in b.csv] --out fig.png
[--theory-overlay]."""

from __future__ import annotations

import argparse
import sys

from .plots import plot_risk, plot_spectrum
from .reader import SchemaError


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="figplots",
        description="Render anisokrr result CSVs as figures.")
    parser.add_argument("family", choices=("spectrum", "risk"))
    parser.add_argument("--in", dest="inputs", action="append", required=True,
                        metavar="CSV", help="input CSV (repeatable)")
    parser.add_argument("--out", required=True, metavar="IMG",
                        help="output image path")
    parser.add_argument("--theory-overlay", action="store_true",
                        help="dotted theory curves (risk family only)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.family == "spectrum":
            if args.theory_overlay:
                print("figplots: --theory-overlay applies to the risk "
                      "family only", file=sys.stderr)
                return 2
            plot_spectrum(args.inputs, args.out)
        else:
            plot_risk(args.inputs, args.out,
                      theory_overlay=args.theory_overlay)
    except (SchemaError, OSError) as exc:
        print(f"figplots: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
