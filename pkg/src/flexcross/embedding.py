"""Embeddedness, degree of flat positions, hemispheres and the rotated family.

Two geodesic simplices are compared by linear programming: in E^n and in
the Klein model of Lambda^n they are affine simplices, on the sphere they
are the traces of salient cones.  A configuration is embedded when every
pair of facets is disjoint or meets exactly in its common face.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog

from . import spaces
from .combinatorics import complex_kn, shared_face
from .errors import InputError, UnsupportedError
from .flexion import Configuration, FlexFamily, SimplestTypeData, as_param, configuration
from .measure import flat_degree
from .spaces import HYPERBOLIC, SPHERICAL, Space

DISJOINT = "disjoint"
SHARED_FACE = "exactly-shared-face"
IMPROPER = "improper"
INCONCLUSIVE = "inconclusive"

EMBEDDED = "embedded"
SELF_INTERSECTING = "self-intersecting"

# margins at or below ZERO_TOL are treated as exact zeros, margins above
# BAND_TOL as clear decisions; anything in between is reported as inconclusive
ZERO_TOL = 1e-12
BAND_TOL = 1e-9

STRICT_POS = "strictly-positive"
STRICT_NEG = "strictly-negative"
CLOSED_POS = "closed-positive"
CLOSED_NEG = "closed-negative"
EQUATORIAL = "equatorial"
MIXED = "mixed"

_LP_OPTIONS = {"primal_feasibility_tolerance": 1e-10, "dual_feasibility_tolerance": 1e-10}


@dataclass(frozen=True)
class IntersectionRelation:
    tag: str
    witness: np.ndarray | None = None
    margin: float = 0.0


@dataclass(frozen=True)
class EmbeddingVerdict:
    status: str
    witness: np.ndarray | None = None
    pair: tuple | None = None


def _affine_points(space: Space, verts: np.ndarray) -> np.ndarray:
    if space.kind == HYPERBOLIC:
        return spaces.to_klein(verts)
    return verts


def _shared_pairs(v1: np.ndarray, v2: np.ndarray, tol: float = 1e-12):
    pairs = []
    for i, p in enumerate(v1):
        for j, q in enumerate(v2):
            if np.max(np.abs(p - q)) <= tol * max(1.0, np.max(np.abs(p))):
                pairs.append((i, j))
    return pairs


def _equality_rows(space: Space, P: np.ndarray, Q: np.ndarray):
    """Constraints for ``sum alpha P = sum beta Q`` plus the normalizations."""
    p, q = len(P), len(Q)
    A = np.hstack([P.T, -Q.T])
    b = np.zeros(P.shape[1])
    norm_a = np.concatenate([np.ones(p), np.zeros(q)])
    rows = [A, norm_a[None, :]]
    rhs = [b, [1.0]]
    if space.kind != SPHERICAL:
        norm_b = np.concatenate([np.zeros(p), np.ones(q)])
        rows.append(norm_b[None, :])
        rhs.append([1.0])
    return np.vstack(rows), np.concatenate(rhs)


def _witness(space: Space, P: np.ndarray, alpha: np.ndarray) -> np.ndarray:
    point = alpha @ P
    if space.kind == HYPERBOLIC:
        return spaces.from_klein(point)
    if space.kind == SPHERICAL:
        return point / np.linalg.norm(point)
    return point


def _separation(space: Space, P: np.ndarray, Q: np.ndarray):
    """Minimal sup-norm gap between points of the two simplices (cones)."""
    p, q = len(P), len(Q)
    d = P.shape[1]
    A_eq, b_eq = _equality_rows(space, P, Q)
    # drop the coordinate rows; they become |..| <= t
    A_eq = A_eq[d:]
    b_eq = b_eq[d:]
    diff = np.hstack([P.T, -Q.T])
    A_ub = np.vstack([np.hstack([diff, -np.ones((d, 1))]), np.hstack([-diff, -np.ones((d, 1))])])
    b_ub = np.zeros(2 * d)
    A_eq = np.hstack([A_eq, np.zeros((len(A_eq), 1))])
    c = np.zeros(p + q + 1)
    c[-1] = 1.0
    res = linprog(c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq, bounds=(0, None), method="highs", options=_LP_OPTIONS)
    if res.status != 0:
        raise RuntimeError(f"separation program failed: {res.message}")
    return float(res.fun), res.x[:p]


def _off_shared_mass(space: Space, P, Q, pairs):
    p, q = len(P), len(Q)
    shared_p = {i for i, _ in pairs}
    shared_q = {j for _, j in pairs}
    c = np.zeros(p + q)
    for i in range(p):
        if i not in shared_p:
            c[i] = -1.0
    for j in range(q):
        if j not in shared_q:
            c[p + j] = -1.0
    A_eq, b_eq = _equality_rows(space, P, Q)
    res = linprog(c, A_eq=A_eq, b_eq=b_eq, bounds=(0, None), method="highs", options=_LP_OPTIONS)
    if res.status != 0:
        raise RuntimeError(f"mass program failed: {res.message}")
    return float(-res.fun), res.x[:p]


def simplex_pair_relation(space: Space, s1, s2, shared=None) -> IntersectionRelation:
    """How two geodesic simplices meet.

    ``shared`` lists index pairs ``(i, j)`` of coinciding vertices; by
    default they are detected by coordinates.  With a common vertex set the
    off-common barycentric mass is maximized over the intersection; without
    one the sup-norm separation is minimized.
    """
    v1 = np.atleast_2d(np.asarray(s1, dtype=float))
    v2 = np.atleast_2d(np.asarray(s2, dtype=float))
    for v in (v1, v2):
        if space.kind == SPHERICAL:
            rank = np.linalg.matrix_rank(v, tol=1e-10)
            if rank < len(v):
                raise InputError("degenerate spherical simplex")
        elif len(v) > 1 and np.linalg.matrix_rank(v[1:] - v[0], tol=1e-10) < len(v) - 1:
            raise InputError("degenerate simplex")
    pairs = _shared_pairs(v1, v2) if shared is None else list(shared)
    P = _affine_points(space, v1)
    Q = _affine_points(space, v2)
    if pairs:
        mass, alpha = _off_shared_mass(space, P, Q, pairs)
        if mass <= ZERO_TOL:
            return IntersectionRelation(SHARED_FACE, None, mass)
        if mass <= BAND_TOL:
            return IntersectionRelation(INCONCLUSIVE, None, mass)
        return IntersectionRelation(IMPROPER, _witness(space, P, alpha), mass)
    gap, alpha = _separation(space, P, Q)
    if gap > BAND_TOL:
        return IntersectionRelation(DISJOINT, None, gap)
    if gap > ZERO_TOL:
        return IntersectionRelation(INCONCLUSIVE, None, gap)
    return IntersectionRelation(IMPROPER, _witness(space, P, alpha), gap)


def is_embedded(config: Configuration) -> EmbeddingVerdict:
    """Check all unordered facet pairs; the first improper pair is the witness."""
    cx = complex_kn(config.n)
    facets = cx.facets()
    verts = {f: config.face_vertices(f) for f in facets}
    pending = None
    for a in range(len(facets)):
        for b in range(a + 1, len(facets)):
            f1, f2 = facets[a], facets[b]
            common = shared_face(f1, f2)
            pos1 = {v: i for i, v in enumerate(f1.vertices())}
            pos2 = {v: i for i, v in enumerate(f2.vertices())}
            pairs = [(pos1[v], pos2[v]) for v in common.vertices()]
            rel = simplex_pair_relation(config.space, verts[f1], verts[f2], pairs)
            if rel.tag == IMPROPER:
                return EmbeddingVerdict(SELF_INTERSECTING, rel.witness, (f1, f2))
            if rel.tag == INCONCLUSIVE and pending is None:
                pending = (f1, f2)
    if pending is not None:
        return EmbeddingVerdict(INCONCLUSIVE, None, pending)
    return EmbeddingVerdict(EMBEDDED)


def spherical_degree(config: Configuration, rng: np.random.Generator | None = None) -> int:
    """Degree of a flat spherical configuration onto the equator orthogonal to m."""
    if config.space.kind != SPHERICAL:
        raise UnsupportedError("degree is defined for spherical flat positions")
    pair = config.all_vertices() @ config.axis
    if np.max(np.abs(pair)) > 1e-9:
        raise InputError("configuration is not flat")
    return flat_degree(config, np.random.default_rng(0) if rng is None else rng)


def hemisphere_position(config: Configuration, axis, tol: float = 1e-10) -> str:
    """Position of all vertices relative to the hemisphere ``<x, axis> > 0``."""
    if config.space.kind != SPHERICAL:
        raise UnsupportedError("hemispheres are defined on the sphere")
    vals = config.all_vertices() @ np.asarray(axis, dtype=float)
    if np.all(np.abs(vals) <= tol):
        return EQUATORIAL
    if np.all(vals > tol):
        return STRICT_POS
    if np.all(vals < -tol):
        return STRICT_NEG
    if np.all(vals > -tol):
        return CLOSED_POS
    if np.all(vals < tol):
        return CLOSED_NEG
    return MIXED


def rho(family: FlexFamily, u) -> float:
    """Smallest spherical distance from a moving vertex to the equator."""
    if family.space.kind != SPHERICAL:
        raise UnsupportedError("rho is defined for spherical families")
    cfg = configuration(family, u)
    vals = np.abs(cfg.b @ family.frame.axis)
    return float(np.min(np.arcsin(np.clip(vals, 0.0, 1.0))))


# --------------------------------------------------------------------------
# Rotated family

def rotation_matrix(khat: np.ndarray, m: np.ndarray, alpha: float) -> np.ndarray:
    """Rotation by ``alpha`` in the plane (khat, m) fixing its orthogonal complement.

    ``khat -> cos a khat - sin a m`` and ``m -> sin a khat + cos a m``.
    """
    dim = len(m)
    R = np.eye(dim)
    c, s = np.cos(alpha), np.sin(alpha)
    R += (c - 1.0) * (np.outer(khat, khat) + np.outer(m, m))
    R += s * (np.outer(khat, m) - np.outer(m, khat))
    return R


@dataclass(eq=False)
class RotatedFamily:
    base: FlexFamily
    axis_vector: np.ndarray
    fixed_subspace: np.ndarray
    rho_samples: dict = field(default_factory=dict)

    @property
    def khat(self) -> np.ndarray:
        return self.axis_vector / np.linalg.norm(self.axis_vector)

    def rho(self, u) -> float:
        u = as_param(u)
        if u not in self.rho_samples:
            self.rho_samples[u] = rho(self.base, u)
        return self.rho_samples[u]

    def alpha(self, u) -> float:
        u = as_param(u)
        if u == 0.0 or np.isinf(u):
            return 0.0
        return 0.5 * np.sign(u) * self.rho(u)


def theorem_pattern(data: SimplestTypeData) -> bool:
    return bool(np.all(data.s == -1) and np.all(data.s_prime == 1))


def rotated_family(family: FlexFamily) -> RotatedFamily:
    """Family with sign pattern ``s = -1, s' = +1`` prepared for the rotation."""
    if family.space.kind != SPHERICAL:
        raise UnsupportedError("the rotation construction is spherical")
    if not theorem_pattern(family.data):
        raise InputError("the rotation needs s_i = -1 and s'_i = +1")
    fr = family.frame
    k = fr.normals.sum(axis=0)
    if abs(k @ fr.axis) > 1e-10:
        raise InputError("k is not orthogonal to m")
    if np.any(fr.duals @ k <= 0):
        raise InputError("k does not form acute angles with the c_i")
    khat = k / np.linalg.norm(k)
    U, _ = spaces.complement_basis(family.space, [khat, fr.axis])
    return RotatedFamily(family, k, np.asarray(U))


def rotated_configuration(rfam: RotatedFamily, u) -> Configuration:
    u = as_param(u)
    cfg = configuration(rfam.base, u)
    alpha = rfam.alpha(u)
    if alpha == 0.0:
        return cfg
    return cfg.transformed(rotation_matrix(rfam.khat, rfam.base.frame.axis, alpha))


@dataclass(frozen=True)
class CertificateItem:
    name: str
    passed: bool
    detail: str


@dataclass(frozen=True)
class Certificate:
    items: tuple
    delta: float
    witness: np.ndarray | None

    @property
    def passed(self) -> bool:
        return all(item.passed for item in self.items)

    def failed(self) -> list[str]:
        return [item.name for item in self.items if not item.passed]


def default_bracket(start: float = 1.0, levels: int = 14) -> np.ndarray:
    return start * 0.5 ** np.arange(levels)


def theorem_1_1_certificate(
    rfam: RotatedFamily,
    u_grid=None,
    rng: np.random.Generator | None = None,
) -> Certificate:
    """Check the four properties of the rotated family.

    ``u_grid`` holds positive magnitudes, tested with both signs.  The
    reported ``delta`` is the largest magnitude below which every tested
    sample is embedded.
    """
    rng = np.random.default_rng(0) if rng is None else rng
    m = rfam.base.frame.axis
    mags = np.sort(np.asarray(default_bracket() if u_grid is None else u_grid, dtype=float))[::-1]
    mags = mags[np.isfinite(mags) & (mags > 0)]
    items = []

    p0 = rotated_configuration(rfam, 0.0)
    pos0 = hemisphere_position(p0, m)
    deg0 = spherical_degree(p0, rng)
    items.append(
        CertificateItem("(ii) P_0 equatorial with degree 1", pos0 == EQUATORIAL and deg0 == 1, f"position={pos0}, degree={deg0}")
    )

    bad = []
    for mag in mags:
        for u, want in ((mag, STRICT_POS), (-mag, STRICT_NEG)):
            pos = hemisphere_position(rotated_configuration(rfam, u), m)
            if pos != want:
                bad.append(f"u={u:g}:{pos}")
    items.append(CertificateItem("(iii) strict hemispheres", not bad, "; ".join(bad) or f"{2 * len(mags)} samples"))

    pinf = rotated_configuration(rfam, np.inf)
    posinf = hemisphere_position(pinf, m)
    verdict = is_embedded(pinf)
    items.append(
        CertificateItem(
            "(iv) P_inf equatorial and self-intersecting",
            posinf == EQUATORIAL and verdict.status == SELF_INTERSECTING,
            f"position={posinf}, verdict={verdict.status}",
        )
    )

    delta = 0.0
    for mag in mags[::-1]:
        ok = all(is_embedded(rotated_configuration(rfam, u)).status == EMBEDDED for u in (mag, -mag))
        if not ok:
            break
        delta = float(mag)
    items.append(CertificateItem("(i) embedded near 0", delta > 0, f"verified bracket |u| <= {delta:g}"))
    return Certificate(tuple(items), delta, verdict.witness)


def remark_bounds(family: FlexFamily) -> dict:
    """Distances ``dist(a_i, -e_i)`` and ``dist(b_i(0), e_i)`` with ``e_i`` the
    facet normals, and the bound ``arcsin(1/sqrt n)``."""
    if family.space.kind != SPHERICAL:
        raise UnsupportedError("bounds are stated on the sphere")
    e = family.frame.normals
    cfg = configuration(family, 0.0)
    sp = family.space
    da = np.array([spaces.geodesic_distance(sp, cfg.a[i], -e[i]) for i in range(family.n)])
    db = np.array([spaces.geodesic_distance(sp, cfg.b[i], e[i]) for i in range(family.n)])
    return {"a": da, "b": db, "bound": float(np.arcsin(1.0 / np.sqrt(family.n)))}
