#!/usr/bin/env python3
"""Trace the achievable (beta', 1/mu') frontier and diff it against the
stored reference boundary for mu* = 3.627.

Writes an optional CSV with one row per reference coordinate and prints the
worst deviation plus the two anchor values.
"""

import argparse
import csv

from polarbec import frontier as fr


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--mu-star", type=float, default=3.627)
    parser.add_argument("--csv", help="write ref_beta,got_beta,inv_mu,delta rows here")
    args = parser.parse_args()

    rows = []
    worst = 0.0
    for beta_ref, inv_ref in fr.REFERENCE_BOUNDARY_3627:
        got = fr.max_beta(1.0 / inv_ref, args.mu_star)
        delta = got - beta_ref
        worst = max(worst, abs(delta))
        rows.append((inv_ref, beta_ref, got, delta))

    points = fr.trace_frontier(args.mu_star)
    print(f"mu* = {args.mu_star}")
    print(f"reference points checked: {len(rows)}")
    print(f"worst |delta beta'|:      {worst:.3e}")
    print(f"top of frontier (1/mu'):  {points[0].inv_mu_p:.6f}")
    print(f"beta' ceiling (1/mu'->0): {points[-1].beta_p:.6f}")
    print(f"conjectured x-intercept:  {fr.conjectured_intercept(args.mu_star):.6f}")

    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["inv_mu_p", "beta_ref", "beta_got", "delta"])
            writer.writerows(rows)
        print(f"wrote {args.csv}")


if __name__ == "__main__":
    main()
