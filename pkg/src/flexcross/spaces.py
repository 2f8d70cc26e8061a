"""Linear algebra of the three constant-curvature model spaces.

Euclidean space is ``R^n`` with the dot product.  The sphere is the unit
sphere of ``R^{n+1}``.  Lobachevsky space is the upper sheet of the
hyperboloid ``<x, x> = -1`` in ``R^{n,1}``, with coordinate 0 carrying the
negative sign.  Points and vectors are plain ``numpy`` arrays.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateError, InputError, InvalidDataError, InvalidPointError

EUCLIDEAN = "euclidean"
SPHERICAL = "spherical"
HYPERBOLIC = "hyperbolic"
KINDS = (EUCLIDEAN, SPHERICAL, HYPERBOLIC)

CLAMP_TOL = 1e-12
GRAM_TOL = 1e-10
RANK_TOL = 1e-8


@dataclass(frozen=True)
class Space:
    """One of E^n, S^n, Lambda^n."""

    kind: str
    n: int

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InputError(f"unknown space kind {self.kind!r}")
        if int(self.n) != self.n or self.n < 2:
            raise InputError(f"dimension must be an integer >= 2, got {self.n!r}")

    @property
    def dim(self) -> int:
        """Dimension of the ambient vector space V."""
        return self.n if self.kind == EUCLIDEAN else self.n + 1

    @property
    def curved(self) -> bool:
        return self.kind != EUCLIDEAN

    @property
    def signature(self) -> np.ndarray:
        sig = np.ones(self.dim)
        if self.kind == HYPERBOLIC:
            sig[0] = -1.0
        return sig

    @property
    def curvature_sign(self) -> int:
        return {EUCLIDEAN: 0, SPHERICAL: 1, HYPERBOLIC: -1}[self.kind]


def _check_dim(space: Space, *vectors):
    for v in vectors:
        if np.shape(v)[-1] != space.dim:
            raise InputError(
                f"vector of length {np.shape(v)[-1]} given for {space.kind} "
                f"space of ambient dimension {space.dim}"
            )


def bilinear_form(space: Space, x, y) -> float | np.ndarray:
    """Ambient scalar product; Lorentzian (``-x0 y0 + ...``) for hyperbolic.

    Broadcasts over leading axes.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    _check_dim(space, x, y)
    return np.sum(x * space.signature * y, axis=-1)


def gram(space: Space, vectors) -> np.ndarray:
    """Matrix of pairwise scalar products of the rows of ``vectors``."""
    vectors = np.asarray(vectors, dtype=float)
    _check_dim(space, vectors)
    return (vectors * space.signature) @ vectors.T


def _clamped(value: float, lo: float, hi: float | None = None) -> float:
    if value < lo:
        if value < lo - CLAMP_TOL:
            return value
        return lo
    if hi is not None and value > hi:
        if value > hi + CLAMP_TOL:
            return value
        return hi
    return value


def geodesic_distance(space: Space, p, q) -> float:
    """Distance between two model points."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    _check_dim(space, p, q)
    if space.kind == EUCLIDEAN:
        return float(np.linalg.norm(p - q))
    if space.kind == SPHERICAL:
        c = float(bilinear_form(space, p, q))
        c = min(1.0, max(-1.0, _clamped(c, -1.0, 1.0)))
        return float(np.arccos(c))
    c = -float(bilinear_form(space, p, q))
    if c < 1.0 - 1e-9:
        raise InvalidPointError(f"-<p,q> = {c} < 1: not points of one hyperboloid sheet")
    return float(np.arccosh(max(c, 1.0)))


def project_to_model(space: Space, v, sign: int = 1) -> np.ndarray:
    """Rescale ``v`` onto the model.

    On the sphere the result is ``sign * v / |v|``.  On the hyperboloid the
    sheet ``x0 > 0`` decides the sign and ``sign`` is ignored.  Euclidean
    vectors are returned unchanged.
    """
    v = np.asarray(v, dtype=float)
    _check_dim(space, v)
    if space.kind == EUCLIDEAN:
        return v.copy()
    q = float(bilinear_form(space, v, v))
    if space.kind == SPHERICAL:
        if q <= 0.0:
            raise DegenerateError("cannot project the zero vector to the sphere")
        return sign * v / np.sqrt(q)
    if q >= -CLAMP_TOL:
        from .errors import NotTimelikeError

        raise NotTimelikeError(f"<v,v> = {q:.3e} is not negative")
    w = v / np.sqrt(-q)
    return w if w[0] > 0 else -w


def is_model_point(space: Space, p, tol: float = CLAMP_TOL) -> bool:
    p = np.asarray(p, dtype=float)
    if not np.all(np.isfinite(p)):
        return False
    if space.kind == EUCLIDEAN:
        return True
    q = float(bilinear_form(space, p, p))
    if space.kind == SPHERICAL:
        return abs(q - 1.0) <= tol
    return abs(q + 1.0) <= tol and p[0] > 0


def to_klein(p) -> np.ndarray:
    """Beltrami-Klein coordinates of hyperboloid points (broadcasts)."""
    p = np.asarray(p, dtype=float)
    return p[..., 1:] / p[..., :1]


def from_klein(k) -> np.ndarray:
    k = np.asarray(k, dtype=float)
    r2 = np.sum(k * k, axis=-1, keepdims=True)
    if np.any(r2 >= 1.0):
        raise InvalidPointError("Klein coordinates outside the unit ball")
    head = 1.0 / np.sqrt(1.0 - r2)
    return np.concatenate([head, k * head], axis=-1)


# --------------------------------------------------------------------------
# Frames

@dataclass(frozen=True)
class Frame:
    """Vectors n_i with prescribed Gram matrix, unit axis m orthogonal to them,
    and (optionally) the dual basis c_i of span(n_i)."""

    normals: np.ndarray
    axis: np.ndarray
    duals: np.ndarray | None = field(default=None)

    def with_duals(self, duals) -> "Frame":
        return Frame(self.normals, self.axis, np.asarray(duals, dtype=float))


def condition_violation(kind: str, G, det_tol: float = 1e-10) -> str | None:
    """First failure of the Gram-matrix conditions, or None.

    Unit diagonal, strictly positive principal minors of sizes 2..n-1 and a
    determinant whose sign matches the geometry.
    """
    G = np.asarray(G, dtype=float)
    n = G.shape[0]
    if G.ndim != 2 or G.shape[1] != n:
        return "G must be square"
    if not np.all(np.isfinite(G)):
        return "G must be finite"
    if not np.allclose(G, G.T, atol=1e-12):
        return "G must be symmetric"
    if not np.allclose(np.diag(G), 1.0, atol=1e-12):
        return "unit diagonal"
    from itertools import combinations

    for size in range(2, n):
        for idx in combinations(range(n), size):
            if np.linalg.det(G[np.ix_(idx, idx)]) <= 0.0:
                return "principal minors positive"
    det = np.linalg.det(G)
    scale = max(1.0, float(np.max(np.abs(G)))) ** n
    if kind == SPHERICAL and not det > det_tol * scale:
        return "det sign regime"
    if kind == HYPERBOLIC and not det < -det_tol * scale:
        return "det sign regime"
    if kind == EUCLIDEAN and abs(det) > det_tol * scale:
        return "det sign regime"
    return None


def realize_gram(space: Space, G) -> Frame:
    """Vectors ``n_1..n_n`` in V with Gram matrix ``G`` and a unit axis ``m``.

    The axis is ``e_0`` for the sphere and Euclidean space and ``e_n`` for
    the hyperboloid (``e_0`` is time-like there).  For a positive definite
    ``G`` the normals are the rows of the symmetric square root, so the
    identity matrix is realized by the standard basis.
    """
    G = np.asarray(G, dtype=float)
    n = space.n
    if G.shape != (n, n):
        raise InputError(f"G must be {n}x{n}")
    bad = condition_violation(space.kind, G)
    if bad is not None and not (space.kind == EUCLIDEAN and bad == "det sign regime"):
        raise InvalidDataError(f"Gram matrix violates condition: {bad}")
    w, Q = np.linalg.eigh(G)
    normals = np.zeros((n, space.dim))
    axis = np.zeros(space.dim)
    if space.kind == SPHERICAL:
        if w[0] <= 0:
            raise InvalidDataError("Gram matrix violates condition: det sign regime")
        normals[:, 1:] = (Q * np.sqrt(w)) @ Q.T
        axis[0] = 1.0
    elif space.kind == HYPERBOLIC:
        neg = w < 0
        if neg.sum() != 1:
            raise InvalidDataError("Gram matrix violates condition: det sign regime")
        normals[:, 0] = Q[:, neg][:, 0] * np.sqrt(-w[neg][0])
        normals[:, 1:n] = Q[:, ~neg] * np.sqrt(w[~neg])
        axis[n] = 1.0
    else:
        drop = int(np.argmin(np.abs(w)))
        top = float(np.max(np.abs(w)))
        if abs(w[drop]) > RANK_TOL * top:
            raise InvalidDataError("Gram matrix violates condition: det sign regime")
        keep = [j for j in range(n) if j != drop]
        if np.any(w[keep] <= RANK_TOL * top):
            raise DegenerateError("euclidean Gram matrix has rank below n-1")
        normals[:, 1:] = Q[:, keep] * np.sqrt(w[keep])
        axis[0] = 1.0
    return Frame(normals, axis)


def dual_basis(space: Space, frame: Frame) -> np.ndarray:
    """Basis ``c_i`` of span(n_j) with ``<c_i, n_j> = delta_ij``."""
    G = gram(space, frame.normals)
    if np.linalg.cond(G) > 1e12:
        raise DegenerateError("normals are numerically dependent")
    return np.linalg.solve(G, frame.normals)


# --------------------------------------------------------------------------
# Helpers shared by the geometric modules

def orthonormalize(space: Space, vectors, tol: float = 1e-12):
    """Form-orthonormal basis of span(vectors) by Gram-Schmidt.

    Returns ``(basis, signs)`` where ``signs[j] = <e_j, e_j>`` is +-1.
    Raises DegenerateError when a vector is dependent on its predecessors or
    isotropic.  Two passes of re-orthogonalisation are applied.
    """
    basis = []
    signs = []
    for v in np.asarray(vectors, dtype=float):
        w = v.copy()
        for _ in range(2):
            for e, s in zip(basis, signs):
                w = w - s * float(bilinear_form(space, w, e)) * e
        q = float(bilinear_form(space, w, w))
        ref = max(1.0, float(np.dot(v, v)))
        if abs(q) <= tol * ref:
            raise DegenerateError("vectors are linearly dependent (or span is degenerate)")
        basis.append(w / np.sqrt(abs(q)))
        signs.append(1.0 if q > 0 else -1.0)
    return np.array(basis).reshape(len(basis), space.dim), np.array(signs)


def project_out(space: Space, v, basis, signs) -> np.ndarray:
    """Component of ``v`` form-orthogonal to the span of an orthonormal basis."""
    w = np.asarray(v, dtype=float).copy()
    for _ in range(2):
        for e, s in zip(basis, signs):
            w = w - s * float(bilinear_form(space, w, e)) * e
    return w


def complement_basis(space: Space, vectors, tol: float = 1e-10):
    """Orthonormal basis of the form-orthogonal complement of span(vectors).

    Time-like directions (hyperbolic) come first.
    """
    vectors = np.atleast_2d(np.asarray(vectors, dtype=float))
    if vectors.size:
        base, base_signs = orthonormalize(space, vectors)
    else:
        base, base_signs = np.zeros((0, space.dim)), np.zeros(0)
    out, out_signs = [], []
    for e in np.eye(space.dim):
        w = project_out(space, e, list(base) + out, list(base_signs) + out_signs)
        q = float(bilinear_form(space, w, w))
        if abs(q) > tol:
            out.append(w / np.sqrt(abs(q)))
            out_signs.append(1.0 if q > 0 else -1.0)
        if len(out) + len(base) == space.dim:
            break
    order = np.argsort(out_signs, kind="stable")
    return np.array(out)[order].reshape(-1, space.dim), np.array(out_signs)[order]
