#!/usr/bin/env python3
"""Run the full analysis chain for one candidate decay function:

    candidate h  ->  sup ratio  ->  certified mu*  ->  frontier sweep
                                                   ->  corollary checks

The chain is the package's pieces wired end to end; each stage prints the
quantity the next stage consumes.
"""

import argparse

from polarbec import criterion as cr
from polarbec import frontier as fr


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--alpha", type=float, default=0.64)
    parser.add_argument("--grid", type=int, default=100_000)
    parser.add_argument("--samples", type=int, default=11)
    args = parser.parse_args()

    h = cr.CandidateH.power(args.alpha)
    res = cr.sup_ratio(h, grid_size=args.grid)
    print(f"h(xi) = (xi(1-xi))^{args.alpha}")
    print(f"  sup ratio     {res.ratio:.9f}  at xi = {res.argmax:.6f}")
    print(f"  edge limits   {res.left_limit:.6f} / {res.right_limit:.6f}")
    if res.ratio >= 1.0:
        print("  candidate does not certify polarization, stopping")
        return
    if res.ratio <= 2.0**-0.5:
        print("  ratio at or below 2^-1/2: certified mu* would not exceed 2")
        return
    mu_star = cr.mu_star_from_ratio(res.ratio)
    print(f"  certified mu* {mu_star:.6f}")

    points = fr.trace_frontier(mu_star, samples=args.samples)
    print(f"frontier at mu* = {mu_star:.4f} ({args.samples} samples)")
    for pt in points:
        print(f"  1/mu' = {pt.inv_mu_p:.6f}   max beta' = {pt.beta_p:.6f}")

    rep = fr.verify_corollaries(mu_star)
    print(
        f"corollary checks: segment margin {rep.segment_min_margin:.3e}, "
        f"containment {'ok' if rep.containment_ok else 'FAILED'}, "
        f"overall {'pass' if rep.passed else 'FAIL'}"
    )


if __name__ == "__main__":
    main()
