"""Random admissible generators for tests, scripts and the CLI.

Spherical Gram matrices come from random well-conditioned unit vectors.
Euclidean and hyperbolic ones are Gram matrices of facet normals of random
simplices in one dimension lower, which makes every proper principal minor
positive.  In those two geometries the signs are forced by ``(G, lam)`` up to
a global flip, so they are computed rather than drawn.
"""
from __future__ import annotations

import numpy as np

from . import flexion, spaces
from .errors import FlexcrossError
from .spaces import EUCLIDEAN, HYPERBOLIC, SPHERICAL, Space


def random_rates(n: int, rng: np.random.Generator, min_ratio: float = 1.15) -> np.ndarray:
    """Increasing positive rates with consecutive ratios at least ``min_ratio``."""
    first = rng.uniform(0.3, 1.2)
    ratios = rng.uniform(min_ratio, 2.5, size=n - 1)
    return first * np.concatenate([[1.0], np.cumprod(ratios)])


def _unit_rows(A: np.ndarray) -> np.ndarray:
    return A / np.linalg.norm(A, axis=1, keepdims=True)


def random_spherical_gram(n: int, rng: np.random.Generator, spread: float = 0.6) -> np.ndarray:
    """Unit-diagonal positive definite matrix, condition number kept moderate."""
    while True:
        A = np.eye(n) + spread * rng.standard_normal((n, n)) / np.sqrt(n)
        N = _unit_rows(A)
        G = N @ N.T
        if np.linalg.eigvalsh(G)[0] > 0.05:
            return 0.5 * (G + G.T)


def random_euclidean_gram(n: int, rng: np.random.Generator) -> np.ndarray:
    """Gram matrix of unit facet normals (with random orientation) of a simplex in E^{n-1}."""
    while True:
        P = rng.standard_normal((n, n - 1))
        normals = np.zeros((n, n - 1))
        ok = True
        for j in range(n):
            rest = np.delete(P, j, axis=0)
            M = rest[1:] - rest[0] if n > 2 else np.zeros((0, n - 1))
            if n > 2:
                _, sv, vt = np.linalg.svd(M)
                if sv[-1] < 0.15 * sv[0]:
                    ok = False
                    break
                v = vt[-1]
            else:
                v = np.ones(1)
            normals[j] = v / np.linalg.norm(v)
        if not ok:
            continue
        normals *= rng.choice([-1.0, 1.0], size=(n, 1))
        G = normals @ normals.T
        np.fill_diagonal(G, 1.0)
        return 0.5 * (G + G.T)


def random_hyperbolic_gram(n: int, rng: np.random.Generator, radius: float = 0.85) -> np.ndarray:
    """Gram matrix of unit normals of a random compact simplex in Lambda^{n-1}."""
    sp = Space(HYPERBOLIC, n - 1) if n >= 3 else None
    while True:
        if n == 2:
            g = np.cosh(rng.uniform(0.2, 1.5)) * rng.choice([-1.0, 1.0])
            return np.array([[1.0, g], [g, 1.0]])
        k = rng.uniform(-1, 1, size=(n, n - 1))
        k *= radius * rng.uniform(0.2, 1.0, size=(n, 1)) / np.maximum(
            np.linalg.norm(k, axis=1, keepdims=True), 1e-12
        )
        pts = spaces.from_klein(k)
        J = sp.signature
        normals = np.zeros((n, n))
        for j in range(n):
            rest = np.delete(pts, j, axis=0)
            # normal: form-orthogonal to the other vertices
            _, sv, vt = np.linalg.svd(rest * J)
            v = vt[-1]
            q = float(spaces.bilinear_form(sp, v, v))
            if q <= 1e-3 or sv[-1] < 1e-3 * sv[0]:
                break
            normals[j] = v / np.sqrt(q)
        else:
            normals *= rng.choice([-1.0, 1.0], size=(n, 1))
            G = spaces.gram(sp, normals)
            np.fill_diagonal(G, 1.0)
            G = 0.5 * (G + G.T)
            if spaces.condition_violation(HYPERBOLIC, G) is None:
                return G


def random_gram(kind: str, n: int, rng: np.random.Generator) -> np.ndarray:
    return {
        SPHERICAL: random_spherical_gram,
        EUCLIDEAN: random_euclidean_gram,
        HYPERBOLIC: random_hyperbolic_gram,
    }[kind](n, rng)


def random_data(
    kind: str,
    n: int,
    rng: np.random.Generator,
    products=None,
    s=None,
    max_tries: int = 500,
) -> flexion.SimplestTypeData:
    """Random admissible data.

    ``products`` prescribes the row ``s_i s'_i``; ``s`` prescribes the
    spherical row ``s`` (otherwise drawn at random).  For euclidean and
    hyperbolic space the prescribed products are met by rejection.
    """
    space = Space(kind, n)
    for _ in range(max_tries):
        G = random_gram(kind, n, rng)
        lam = random_rates(n, rng)
        if kind == SPHERICAL:
            srow = np.asarray(s, dtype=float) if s is not None else rng.choice([-1.0, 1.0], size=n)
            prod = (
                np.asarray(products, dtype=float)
                if products is not None
                else rng.choice([-1.0, 1.0], size=n)
            )
            data = flexion.SimplestTypeData(space, G, lam, srow, srow * prod)
        else:
            try:
                srow = flexion.forced_signs(space, G)
                if rng.random() < 0.5:
                    srow = -srow
                sp = flexion.forced_primes(space, G, lam, srow)
            except FlexcrossError:
                continue
            data = flexion.SimplestTypeData(space, G, lam, srow, sp)
            if products is not None and not np.array_equal(data.products, products):
                continue
        if flexion.validate_data(data) is not None:
            continue
        try:
            fam = flexion.build(data)
            for u in (0.0, 1.0, float("inf")):
                flexion.configuration(fam, u)
        except FlexcrossError:
            continue
        return data
    raise RuntimeError(f"no admissible {kind} data found in {max_tries} draws")


def identity_data(n: int, lam=None, s=None, s_prime=None) -> flexion.SimplestTypeData:
    """Spherical data with ``G = I``; defaults ``lam = 7^k``, ``s = -1``, ``s' = +1``."""
    lam = np.power(7.0, np.arange(n)) if lam is None else lam
    s = -np.ones(n) if s is None else s
    s_prime = np.ones(n) if s_prime is None else s_prime
    return flexion.SimplestTypeData(Space(SPHERICAL, n), np.eye(n), lam, s, s_prime)
