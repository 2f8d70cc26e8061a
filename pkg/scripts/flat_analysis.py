#!/usr/bin/env python3
"""Summarize the flat positions of random families.

For each family prints the position of the concurrency point, the case of
the classification, the residuals and whether the facet classes follow the
parity rule.

    python3 scripts/flat_analysis.py --kind hyperbolic --n 4 --count 5
"""
import argparse

import numpy as np

from flexcross import flatgeom, flexion, samples
from flexcross.flexion import INF


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--kind", choices=("euclidean", "spherical", "hyperbolic"), default="spherical")
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--count", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--perturb", type=float, default=0.0, help="move vertices before the analysis")
    args = p.parse_args(argv)
    rng = np.random.default_rng(args.seed)
    for j in range(args.count):
        fam = flexion.build(samples.random_data(args.kind, args.n, rng))
        for u, label in ((0.0, "0"), (INF, "inf")):
            c = flexion.configuration(fam, u)
            if args.perturb:
                c = flatgeom.perturbed_flat(c, args.perturb, rng)
                print(f"#{j} P_{label}: concurrency residual {flatgeom.concurrency_residual(c):.2e}")
                continue
            rep = flatgeom.analyse(c)
            a = rep.analysis
            kinds = sorted({pk.kind for pk in a.per_k.values()})
            spread = max(pk.spread for pk in a.per_k.values())
            print(
                f"#{j} P_{label}: O {a.o_kind}, {a.case} ({', '.join(kinds)}), "
                f"concurrency {rep.concurrency.residual:.1e}, ratios {rep.ratio_error:.1e}, "
                f"spread {spread:.1e}, parity {all(a.parity_ok.values())}"
            )


if __name__ == "__main__":
    main()
