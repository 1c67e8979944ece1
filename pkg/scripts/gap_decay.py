#!/usr/bin/env python3
"""Measure how the multi-pocket construction's gap to capacity shrinks with
blocklength, for a few target error exponents.

For each beta' the script builds codes over a range of levels n, prints the
gap sequence, and fits the log2-gap slope (the empirical 1/mu').
"""

import argparse

import numpy as np

from polarbec.construction import construct_multipocket
from polarbec.erasure import RootChannel
from polarbec.errors import EmptyCodeError


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--z0", type=float, default=0.5)
    parser.add_argument("--mu-p", type=float, default=8.0)
    parser.add_argument("--mu-star", type=float, default=3.8)
    parser.add_argument("--pockets", type=int, default=4)
    parser.add_argument(
        "--betas", type=float, nargs="+", default=[0.0, 0.10, 0.25]
    )
    parser.add_argument(
        "--levels", type=int, nargs="+", default=[14, 16, 18, 20, 22]
    )
    args = parser.parse_args()

    root = RootChannel(args.z0)
    print(
        f"z0={args.z0} mu'={args.mu_p} mu*={args.mu_star} pockets={args.pockets}"
    )
    for beta_p in args.betas:
        gaps = []
        kept = []
        for n in args.levels:
            try:
                _, report = construct_multipocket(
                    root,
                    n,
                    beta_p,
                    args.mu_p,
                    args.mu_star,
                    pockets=args.pockets,
                    p_ub=2.0**-10,
                )
            except EmptyCodeError:
                continue
            gaps.append(report.gap)
            kept.append(n)
        if len(gaps) < 2:
            print(f"beta'={beta_p}: fewer than two feasible levels, skipped")
            continue
        slope = float(np.polyfit(kept, np.log2(gaps), 1)[0])
        gap_text = ", ".join(f"{g:.5f}" for g in gaps)
        print(
            f"beta'={beta_p}: n={kept} gaps=[{gap_text}] "
            f"log2-slope={slope:+.4f} (target -1/mu' = {-1.0 / args.mu_p:+.4f})"
        )


if __name__ == "__main__":
    main()
