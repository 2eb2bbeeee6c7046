"""Command-line entry point: render every table from a run manifest."""

import argparse
import sys

from .panels import PlotkitError, render_all


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plotkit", description="Render simulation CSV outputs")
    sub = parser.add_subparsers(dest="command", required=True)
    r = sub.add_parser("render", help="render all tables from a manifest")
    r.add_argument("--manifest", required=True,
                   help="path to a run's manifest.json")
    r.add_argument("--out", required=True, help="output image directory")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        written = render_all(args.manifest, args.out)
    except (PlotkitError, FileNotFoundError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
