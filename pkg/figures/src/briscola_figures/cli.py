"""CLI: render-breakeven --in breakeven.csv --out figure.pdf"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .render import FigureSpec, SchemaError, render_breakeven


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="render-breakeven",
        description="Draw the 3x3 win-rate-vs-imbalance grid from a break-even CSV.",
    )
    parser.add_argument("--in", dest="input_csv", type=Path, required=True,
                        help="break-even CSV produced by the tournament report")
    parser.add_argument("--out", dest="output", type=Path, required=True,
                        help="output image (.pdf or .svg; vector by default)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        out = render_breakeven(FigureSpec(args.input_csv, args.output))
    except SchemaError as exc:
        print(f"invalid break-even CSV: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
