#!/usr/bin/env python3
"""Sweep the norm-equivalence experiment over kernels, exponents, and weights.

Prints one table row per combination; useful for eyeballing how the ratio
spread reacts to the weight exponent before pinning bounds in a config.
"""

import argparse

from scalesq import (
    Geometry,
    default_dyadic_range,
    default_test_family,
    default_time_grid,
    dyadic_square_ratio,
    equivalence_experiment,
    kernel_from_id,
    square_function_ratio,
    weight_from_id,
)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--kernels", nargs="+", default=["haar", "gm:1", "poisson-q"])
    ap.add_argument("--exponents", nargs="+", type=float, default=[1.5, 2.0, 3.0])
    ap.add_argument("--weights", nargs="+", default=["const", "pow:0.3"])
    ap.add_argument("--mode", choices=("continuous", "dyadic"), default="continuous")
    ap.add_argument("--grid-n", type=int, default=1024)
    ap.add_argument("--grid-l", type=float, default=32.0)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    geom = Geometry(1, args.grid_n, args.grid_l)
    family = default_test_family(geom, args.seed)
    tg = default_time_grid(geom)
    kr = default_dyadic_range(geom)

    print(f"{'kernel':<14} {'p':>4} {'weight':<9} {'min':>9} {'max':>9} {'spread':>9}")
    for kid in args.kernels:
        kernel = kernel_from_id(kid)
        for p in args.exponents:
            for wid in args.weights:
                w = weight_from_id(wid, radius_floor=geom.spacing)
                if args.mode == "continuous":
                    fn = square_function_ratio(kernel, tg, p, w)
                else:
                    fn = dyadic_square_ratio(kernel, kr, p, w)
                rep = equivalence_experiment(family, fn, args.mode, p, wid)
                print(
                    f"{kid:<14} {p:>4g} {wid:<9} "
                    f"{rep.min_ratio:>9.4f} {rep.max_ratio:>9.4f} {rep.spread:>9.4f}"
                )


if __name__ == "__main__":
    main()
