#!/usr/bin/env python3
"""Scan the scale-shift energy ratio across a range of grading exponents.

One line per exponent: the scanned maximum, where it sits, and how much it
moved under grid refinement.  Exponents must stay inside (0.5, 1.5).
"""

import argparse

import numpy as np

from scalesq import marcinkiewicz_estimate_scan


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--alpha-min", type=float, default=0.6)
    ap.add_argument("--alpha-max", type=float, default=1.4)
    ap.add_argument("--steps", type=int, default=9)
    ap.add_argument("--no-refine", action="store_true")
    args = ap.parse_args()

    print(f"{'alpha':>6} {'max_ratio':>12} {'x*':>10} {'y*':>10} {'delta':>10} {'pass':>5}")
    for alpha in np.linspace(args.alpha_min, args.alpha_max, args.steps):
        rep = marcinkiewicz_estimate_scan(float(alpha), refine=not args.no_refine)
        print(
            f"{rep.alpha:>6.3f} {rep.max_ratio:>12.6g} "
            f"{rep.argmax[0]:>10.4g} {rep.argmax[1]:>10.4g} "
            f"{rep.refinement_delta:>10.3g} {str(rep.passed):>5}"
        )


if __name__ == "__main__":
    main()
