#!/usr/bin/env python3
"""Probe the discretized two-interval uniform family.

For each scale a, solves the exact LPs of the midpoint-grid discretization
and reports the optima next to the normalized two-point references 25/8 and
51/16 (at ratio 2).  Band membership of the discretized optimum against the
known additive windows for the true continuous optimum is indicative only.

grid_m=2 cells take a couple of minutes each: the truthfulness program has
thousands of rows and is solved exactly.

Usage: python scripts/continuous_probe.py --a-list 10,20,40 --grid-m 2
"""

import argparse
import sys
import time

from twopoint_auctions.core import decimal_str, rat, rat_str
from twopoint_auctions.continuous import corollary_probe


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--a-list", default="10,20,40")
    parser.add_argument("--lambda", dest="lam", default="2")
    parser.add_argument("--grid-m", type=int, default=1)
    args = parser.parse_args()

    a_values = [rat(x) for x in args.a_list.split(",")]
    t0 = time.perf_counter()
    rows = corollary_probe(a_values, args.grid_m, lam=rat(args.lam))
    for row in rows:
        gap = (row.lp_bic - row.lp_dic) / row.lp_dic
        print(
            f"a={rat_str(row.a)} m={row.grid_m} "
            f"lp_D={rat_str(row.lp_dic)} ({decimal_str(row.lp_dic)}) "
            f"lp_B={rat_str(row.lp_bic)} ({decimal_str(row.lp_bic)}) "
            f"lp_D/a={decimal_str(row.ratio_dic)} "
            f"lp_B/a={decimal_str(row.ratio_bic)} "
            f"gap={decimal_str(gap)} "
            f"bands={row.within_band_dic}/{row.within_band_bic}"
        )
    print(f"done in {time.perf_counter() - t0:.1f} s "
          f"(references: {rat_str(rows[0].ref_dic)}, {rat_str(rows[0].ref_bic)})")
    return 0


if __name__ == "__main__":
    sys.exit(main())
