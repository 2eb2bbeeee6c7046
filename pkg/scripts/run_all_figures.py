#!/usr/bin/env python3
"""Run every bundled figure config and collect outputs under one directory.

Usage: python scripts/run_all_figures.py [--out DIR] [--threads N] [--only NAME ...]
"""

import argparse
import sys
import time

from spinmetro.cli import bundled_config_names, main as cli_main


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="runs", help="output root directory")
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--only", nargs="*", default=None,
                    help="subset of bundled config names")
    args = ap.parse_args()

    names = args.only or bundled_config_names()
    failures = []
    for name in names:
        start = time.monotonic()
        code = cli_main(["run", "--config", name, "--out", args.out,
                         "--threads", str(args.threads)])
        elapsed = time.monotonic() - start
        status = "ok" if code == 0 else f"FAILED (exit {code})"
        print(f"{name}: {status} in {elapsed:.1f}s")
        if code != 0:
            failures.append(name)
    if failures:
        print("failed:", ", ".join(failures))
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
