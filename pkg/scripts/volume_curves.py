#!/usr/bin/env python3
"""Tabulate the volume of a spherical family along a parameter sweep.

Prints the closed form, the Schlafli integral and (optionally) the cone
decomposition side by side for G = I and the given rates and signs.

    python3 scripts/volume_curves.py --n 3 --lam 1 2 4 --points 9
"""
import argparse

import numpy as np

from flexcross import flexion, measure, samples


def parse_args(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--lam", type=float, nargs="+", help="rates (default 7^k)")
    p.add_argument("--s", type=int, nargs="+", help="signs s_i (default all -1)")
    p.add_argument("--s-prime", type=int, nargs="+", help="signs s'_i (default all +1)")
    p.add_argument("--points", type=int, default=9, help="samples per branch")
    p.add_argument("--decomposition", action="store_true", help="also run the cone decomposition")
    return p.parse_args(argv)


def main(argv=None):
    args = parse_args(argv)
    data = samples.identity_data(args.n, args.lam, args.s, args.s_prime)
    family = flexion.build(data)
    mags = np.geomspace(1e-2, 1e2, args.points)
    grid = [0.0, *mags, *(-mags), np.inf]
    sig = measure.sphere_volume(args.n)
    print(f"# n={args.n} lambda={data.lam.tolist()} sigma_n={sig:.12g}")
    print("u,closed_form,schlafli" + (",decomposition,abs_error" if args.decomposition else ""))
    rng = np.random.default_rng(0)
    for u in grid:
        cf = measure.closed_form_volume(data, u)
        sc = measure.schlafli_volume(family, u)
        row = [f"{u:g}", f"{cf.value:.12f}", f"{sc.value:.12f}"]
        if args.decomposition:
            d = measure.generalized_volume(flexion.configuration(family, u), rng=rng)
            row += [f"{d.value:.12f}", f"{d.abs_error:.1e}"]
        print(",".join(row))


if __name__ == "__main__":
    main()
