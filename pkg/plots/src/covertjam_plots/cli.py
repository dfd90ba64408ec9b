"""Figure-rendering CLI: `render --kind {fig3|fig4|direction} --in <csv> --out <img>`.

Exit codes: 0 on success, 1 on schema mismatch, missing columns, or any other
rendering failure (no partial output file is left behind).
"""

import argparse
import sys
from pathlib import Path

from .render import KINDS, FigureSpec, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="covertjam-render", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("render", help="render one CSV report into an image")
    p.add_argument("--kind", required=True, choices=KINDS)
    p.add_argument("--in", dest="input_csv", required=True, help="input CSV path")
    p.add_argument("--out", required=True, help="output image path (format from extension)")
    p.add_argument("--title", default="", help="optional figure title override")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    spec = FigureSpec(
        input_csv=Path(args.input_csv),
        figure_kind=args.kind,
        output=Path(args.out),
        title=args.title,
    )
    try:
        out = render(spec)
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
