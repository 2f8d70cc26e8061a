#!/usr/bin/env python3
"""Edge-length drift against vertex magnitude for random families.

In the hyperboloid model a short edge whose end points have coordinates of
size |x| is resolved only to about eps |x|^2 in double precision.  This
script prints, per family, the largest relative edge-length deviation over
a parameter sweep next to the largest vertex coordinate and the estimate
eps |x|^2.

    python3 scripts/edge_conditioning.py --kind hyperbolic --n 2 --count 20
"""
import argparse

import numpy as np

from flexcross import flexion, samples, spaces
from flexcross.flexion import INF

KINDS = ("euclidean", "spherical", "hyperbolic")


def sweep():
    mags = np.logspace(-3, 3, 31)
    return [0.0, INF, *mags, *(-mags)]


def drift(family):
    n = family.n
    verts = [("a", i) for i in range(n)] + [("b", i) for i in range(n)]
    pairs = [(p, q) for i, p in enumerate(verts) for q in verts[i + 1:] if p[1] != q[1]]
    ref, worst, size = None, 0.0, 0.0
    for u in sweep():
        c = flexion.configuration(family, u)
        d = np.array([spaces.geodesic_distance(c.space, c.vertex(*p), c.vertex(*q)) for p, q in pairs])
        ref = d if ref is None else ref
        worst = max(worst, float(np.max(np.abs(d - ref) / ref)))
        size = max(size, float(np.abs(c.all_vertices()).max()))
    return worst, size


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--kind", choices=KINDS, default="hyperbolic")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--count", type=int, default=20)
    p.add_argument("--seed", type=int, default=101, help="seed of the acceptance sampler")
    args = p.parse_args(argv)
    rng = np.random.default_rng([args.seed, args.n, KINDS.index(args.kind)])
    eps = np.finfo(float).eps
    print("family,max_rel_deviation,max_coordinate,eps_x2")
    for j in range(args.count):
        fam = flexion.build(samples.random_data(args.kind, args.n, rng))
        worst, size = drift(fam)
        print(f"{j},{worst:.2e},{size:.2e},{eps * size * size:.2e}")


if __name__ == "__main__":
    main()
