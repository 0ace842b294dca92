#!/usr/bin/env python3
"""Dump the three revenue curves against the high value b as CSV.

Defaults reproduce the flagship picture: n=2, p=1/2, a=1, b running from
just above a up to past the top breakpoint, with the three breakpoints
inserted and flagged.  Feed the CSV to any plotting tool; the *_dec columns
are 12-digit decimal renderings of the exact fractions beside them.

Usage: python scripts/reproduce_revenue_curves.py [--out curves.csv]
"""

import argparse
import sys

from twopoint_auctions.cli import main as cli_main


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", default="2")
    parser.add_argument("--p", default="1/2")
    parser.add_argument("--a", default="1")
    parser.add_argument("--b-min", default="101/100")
    parser.add_argument("--b-max", default="4")
    parser.add_argument("--steps", default="60")
    parser.add_argument("--out")
    args = parser.parse_args()

    argv = [
        "sweep", "--n", args.n, "--p", args.p, "--a", args.a,
        "--b-min", args.b_min, "--b-max", args.b_max, "--steps", args.steps,
    ]
    if args.out:
        argv += ["--out", args.out]
    return cli_main(argv)


if __name__ == "__main__":
    sys.exit(main())
