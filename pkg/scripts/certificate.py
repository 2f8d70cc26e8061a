#!/usr/bin/env python3
"""Run the rotated-family embedding certificate for G = I.

    python3 scripts/certificate.py --n 3 4
"""
import argparse

from flexcross import embedding, flexion, samples


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--n", type=int, nargs="+", default=[2, 3, 4])
    p.add_argument("--levels", type=int, default=10, help="halvings of the bracket starting at |u| = 1")
    args = p.parse_args(argv)
    status = 0
    for n in args.n:
        rf = embedding.rotated_family(flexion.build(samples.identity_data(n)))
        cert = embedding.theorem_1_1_certificate(rf, u_grid=embedding.default_bracket(1.0, args.levels))
        print(f"n={n}: {'PASS' if cert.passed else 'FAIL'}, embedded for |u| <= {cert.delta:g}")
        for item in cert.items:
            print(f"  {'ok ' if item.passed else 'BAD'} {item.name}: {item.detail}")
        status |= not cert.passed
    return status


if __name__ == "__main__":
    raise SystemExit(main())
