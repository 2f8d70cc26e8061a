"""Geometry of the flat positions.

A flat configuration lies in the hyperplane X^{n-1} orthogonal to m.  Its
points are written in homogeneous coordinates of R^n: the vector itself for
S^{n-1} and Lambda^{n-1} (the latter read in the Klein model), ``(p, 1)``
for E^{n-1}.  Hyperplanes are then covectors on R^n, and the bisecting
hyperplanes of the cross-polytopes ``P_(k)`` (vertices a_k, b_k removed)
all pass through one projective point O.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from itertools import combinations

import numpy as np

from . import spaces
from .angles import X_set, lambda_face
from .combinatorics import FaceId, complex_kn, faces
from .errors import (
    ClassificationError,
    ConcurrencyError,
    DegenerateError,
    InputError,
    NotApplicableError,
    UnsupportedError,
)
from .flexion import Configuration, SimplestTypeData, dual_family
from .measure import face_volume
from .spaces import EUCLIDEAN, HYPERBOLIC, SPHERICAL, Space

FLAT_TOL = 1e-10
CONCURRENCY_TOL = 1e-6
EQUAL_TOL = 1e-8
ANGLE_TOL = 1e-9

CASE_I = "concentric-spheres-or-orispheres"
CASE_II = "common-hyperplane"
CIRCUMSCRIBED = "circumscribed"
EQUIDISTANT = "equidistant"
PARALLEL = "parallel"
EQUAL_ANGLE = "equal-angle"


def _normalize_covector(v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    norm = np.linalg.norm(v)
    if norm == 0:
        raise DegenerateError("zero functional")
    v = v / norm
    nz = np.flatnonzero(np.abs(v) > 1e-14)
    if v[nz[0]] < 0:
        v = -v
    return v


@dataclass(frozen=True, eq=False)
class ProjectiveHyperplane:
    """Covector on R^n up to scale, stored with unit norm and positive
    first nonzero coordinate."""

    functional: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "functional", _normalize_covector(self.functional))

    def distance(self, other: "ProjectiveHyperplane") -> float:
        """Sine of the angle between the representative lines."""
        return projective_distance(self.functional, other.functional)


def projective_distance(x, y) -> float:
    """Sine of the angle between the lines spanned by ``x`` and ``y``."""
    x = np.asarray(x, dtype=float) / np.linalg.norm(x)
    y = np.asarray(y, dtype=float) / np.linalg.norm(y)
    # the rejection is accurate where sqrt(1 - cos^2) loses half the digits
    return float(np.linalg.norm(y - (x @ y) * x))


# --------------------------------------------------------------------------
# Reduced coordinates

@dataclass(frozen=True, eq=False)
class FlatFrame:
    """Coordinates on the hyperplane m^perp.

    ``space`` is X^{n-1}; ``basis`` rows are form-orthonormal vectors of
    the ambient space with norms ``signs``.
    """

    space: Space
    ambient: Space
    basis: np.ndarray
    signs: np.ndarray

    def coords(self, v) -> np.ndarray:
        v = np.atleast_2d(np.asarray(v, dtype=float))
        pair = spaces.bilinear_form(self.ambient, v[:, None, :], self.basis[None, :, :])
        return pair * self.signs

    def homogeneous(self, c) -> np.ndarray:
        c = np.atleast_2d(c)
        if self.space.kind == EUCLIDEAN:
            return np.hstack([c, np.ones((len(c), 1))])
        return c


def flat_frame(config: Configuration) -> FlatFrame:
    space = config.space
    n = space.n
    if n < 3:
        raise UnsupportedError("flat-position geometry needs n >= 3")
    basis, signs = spaces.complement_basis(space, [config.axis])
    if space.kind == HYPERBOLIC:
        # put the vertices on the upper sheet of the reduced model
        if float(spaces.bilinear_form(space, config.a[0], basis[0])) * signs[0] < 0:
            basis = basis.copy()
            basis[0] = -basis[0]
    return FlatFrame(Space(space.kind, n - 1), space, basis, signs)


def check_flat(config: Configuration, tol: float = FLAT_TOL) -> None:
    pair = spaces.bilinear_form(config.space, config.all_vertices(), config.axis)
    if config.space.kind == EUCLIDEAN:
        pair = pair - pair[0]
    if np.max(np.abs(pair)) > tol:
        raise InputError(f"configuration is not flat (max |<v, m>| = {np.max(np.abs(pair)):.3g})")


# --------------------------------------------------------------------------
# The cross-polytopes P_(k)

@dataclass(frozen=True, eq=False)
class PKCrossPolytope:
    """``P_(k)``: the flat configuration with a_k and b_k removed."""

    k: int
    frame: FlatFrame
    points: dict = field(repr=False)
    source: Configuration = field(repr=False)

    @property
    def n(self) -> int:
        return self.source.n

    def facets(self) -> list[FaceId]:
        return [F for F in faces(self.n, self.n - 2) if F.missing(self.n) == (self.k,)]

    def ridges(self) -> list[FaceId]:
        return [G for G in faces(self.n, self.n - 3) if self.k in G.missing(self.n)]

    def vertices_of(self, F: FaceId) -> np.ndarray:
        return np.array([self.points[v] for v in F.vertices()])

    def facet_sign(self, F: FaceId) -> int:
        """Coherent orientation of P_(k) read on the reindexed complex."""
        return -1 if len(F.J) % 2 else 1


def pk_cross_polytope(flat: Configuration, k: int, frame: FlatFrame | None = None) -> PKCrossPolytope:
    n = flat.n
    if not 0 <= k < n:
        raise InputError("k out of range")
    frame = flat_frame(flat) if frame is None else frame
    pts = {}
    for i in range(n):
        if i == k:
            continue
        pts[("a", i)] = frame.coords(flat.a[i])[0]
        pts[("b", i)] = frame.coords(flat.b[i])[0]
    return PKCrossPolytope(k, frame, pts, flat)


# --------------------------------------------------------------------------
# Hyperplanes of facets and bisectors

def _facet_normal(space: Space, verts: np.ndarray):
    """Unit normal and offset of the hyperplane through ``verts`` (reduced coordinates)."""
    if space.kind == EUCLIDEAN:
        chords = verts[1:] - verts[0]
        _, sv, vt = np.linalg.svd(chords)
        nu = vt[-1]
        return nu, float(nu @ verts[0])
    basis, _ = spaces.complement_basis(space, verts)
    if len(basis) != 1:
        raise DegenerateError("facet does not span a hyperplane")
    return basis[0], 0.0


def _signed(space: Space, nu, offset, x) -> float:
    """Value of the facet functional (sine/sinh of signed distance, or distance)."""
    if space.kind == EUCLIDEAN:
        return float(nu @ x - offset)
    return float(spaces.bilinear_form(space, nu, x))


def _covector(space: Space, nu, offset) -> np.ndarray:
    """Functional as a covector on homogeneous coordinates."""
    if space.kind == EUCLIDEAN:
        return np.concatenate([nu, [-offset]])
    return nu * space.signature


def _ridge_facets(pk: PKCrossPolytope, G: FaceId):
    (l,) = [i for i in G.missing(pk.n) if i != pk.k]
    return l, G.with_vertex("a", l), G.with_vertex("b", l)


def bisector_hyperplane(pk: PKCrossPolytope, G: FaceId, interior: bool | None = None) -> ProjectiveHyperplane:
    """Bisecting hyperplane of the angle of ``P_(k)`` at the (n-3)-face ``G``.

    By default the interior bisector is used when ``l`` is in ``X_k`` and
    the exterior one otherwise, ``l`` being the index missing from G and k.
    """
    space = pk.frame.space
    l, F, Fp = _ridge_facets(pk, G)
    if interior is None:
        data = pk.source.family.data if pk.source.family is not None else None
        if data is None:
            raise InputError("configuration carries no family data")
        interior = l in X_set(data, pk.k)
    vF = pk.vertices_of(F)
    vFp = pk.vertices_of(Fp)
    nu, c = _facet_normal(space, vF)
    nup, cp = _facet_normal(space, vFp)
    apex_F = pk.points[("a", l)]
    apex_Fp = pk.points[("b", l)]
    if _signed(space, nu, c, apex_Fp) < 0:
        nu, c = -nu, -c
    if _signed(space, nup, cp, apex_F) < 0:
        nup, cp = -nup, -cp
    if np.linalg.norm(nu - nup) < ANGLE_TOL or np.linalg.norm(nu + nup) < ANGLE_TOL:
        raise DegenerateError(f"dihedral angle at {G.label()} is 0 or pi")
    sign = -1.0 if interior else 1.0
    return ProjectiveHyperplane(_covector(space, nu + sign * nup, c + sign * cp))


def _normal_plane(space: Space, G_verts: np.ndarray):
    """Orthonormal basis (ambient coordinates of the reduced space) of the
    normal plane of the face spanned by ``G_verts`` at its barycenter."""
    if space.kind == EUCLIDEAN:
        x = G_verts.mean(axis=0)
        chords = G_verts[1:] - G_verts[0]
        if len(chords):
            _, _, vt = np.linalg.svd(chords)
            plane = vt[len(chords):]
        else:
            plane = np.eye(space.dim)
        return x, plane
    x = spaces.project_to_model(space, G_verts.mean(axis=0))
    plane, _ = spaces.complement_basis(space, G_verts)
    return x, plane


def _direction_angle(space: Space, x, plane, target) -> float:
    if space.kind == EUCLIDEAN:
        w = target - x
        coords = plane @ w
    else:
        coords = np.array([float(spaces.bilinear_form(space, e, target)) for e in plane])
    return float(np.arctan2(coords[1], coords[0]))


def _hyperplane_angle(space: Space, plane, H: ProjectiveHyperplane) -> float:
    """Angle in the normal plane of one half of the trace of ``H``."""
    f = H.functional
    normal = f[:-1] if space.kind == EUCLIDEAN else f * space.signature
    if space.kind == EUCLIDEAN:
        coords = plane @ normal
    else:
        coords = np.array([float(spaces.bilinear_form(space, e, normal)) for e in plane])
    return float(np.arctan2(coords[0], -coords[1]))


def ratio_r(space: Space, f1_verts, H: ProjectiveHyperplane, f2_verts, tol: float = 1e-8) -> float:
    """``sin angle(F1, H+) / sin angle(H+, F2)`` around the common face of F1 and F2."""
    f1 = np.asarray(f1_verts, dtype=float)
    f2 = np.asarray(f2_verts, dtype=float)
    common = [v for v in f1 if any(np.allclose(v, w, atol=1e-12) for w in f2)]
    if len(common) < len(f1) - 1:
        raise InputError("simplices do not share a codimension-one face")
    G = np.array(common[: len(f1) - 1])
    hom = G if space.kind != EUCLIDEAN else np.hstack([G, np.ones((len(G), 1))])
    if np.max(np.abs(hom @ H.functional)) > tol:
        raise InputError("hyperplane does not pass through the common face")
    apex1 = [v for v in f1 if not any(np.allclose(v, g, atol=1e-12) for g in G)]
    apex2 = [v for v in f2 if not any(np.allclose(v, g, atol=1e-12) for g in G)]
    x, plane = _normal_plane(space, G)
    if not apex2:
        return 1.0
    t1 = _direction_angle(space, x, plane, apex1[0])
    t2 = _direction_angle(space, x, plane, apex2[0])
    h = _hyperplane_angle(space, plane, H)
    return float(np.sin(h - t1) / np.sin(t2 - h))


# --------------------------------------------------------------------------
# Concurrency

@dataclass(frozen=True, eq=False)
class Concurrency:
    point: np.ndarray
    residual: float
    triple_residual: float
    hyperplanes: dict = field(repr=False)


def all_bisectors(flat: Configuration, frame: FlatFrame | None = None) -> dict:
    frame = flat_frame(flat) if frame is None else frame
    out = {}
    for k in range(flat.n):
        pk = pk_cross_polytope(flat, k, frame)
        for G in pk.ridges():
            out[(k, G)] = bisector_hyperplane(pk, G)
    return out


def triple_residual(hyperplanes: dict, n: int) -> float:
    """Worst ``s_3/s_1`` over bisector triples around a facet of P_0 (three
    hyperplanes through one codimension-two subspace)."""
    worst = 0.0
    by_face = {}
    for (k, G), H in hyperplanes.items():
        by_face.setdefault(G, H)
    for facet in complex_kn(n).facets():
        subfaces = [facet_minus(facet, v) for v in facet.vertices()]
        for F1, F2, F3 in combinations(subfaces, 3):
            G12, G23, G31 = _meet(F1, F2), _meet(F2, F3), _meet(F3, F1)
            M = np.array([by_face[G].functional for G in (G12, G23, G31)])
            sv = np.linalg.svd(M, compute_uv=False)
            worst = max(worst, float(sv[-1] / sv[0]))
    return worst


def facet_minus(facet: FaceId, vertex) -> FaceId:
    side, i = vertex
    if side == "a":
        return FaceId(facet.i_mask & ~(1 << i), facet.j_mask)
    return FaceId(facet.i_mask, facet.j_mask & ~(1 << i))


def _meet(F1: FaceId, F2: FaceId) -> FaceId:
    return FaceId(F1.i_mask & F2.i_mask, F1.j_mask & F2.j_mask)


def concurrency_point(flat: Configuration, tol: float = CONCURRENCY_TOL, frame: FlatFrame | None = None) -> Concurrency:
    """Common point of all bisecting hyperplanes, by SVD of their covectors.

    ``residual`` is the smallest singular value over the next one.
    """
    frame = flat_frame(flat) if frame is None else frame
    hyper = all_bisectors(flat, frame)
    M = np.array([H.functional for H in hyper.values()])
    _, sv, vt = np.linalg.svd(M)
    residual = float(sv[-1] / sv[-2])
    O = _normalize_covector(vt[-1])
    if residual > tol:
        raise ConcurrencyError(f"bisecting hyperplanes are not concurrent (ratio {residual:.3g})")
    return Concurrency(O, residual, triple_residual(hyper, flat.n), hyper)


def concurrency_residual(flat: Configuration) -> float:
    """Residual ratio without raising (for detection experiments)."""
    frame = flat_frame(flat)
    M = np.array([H.functional for H in all_bisectors(flat, frame).values()])
    sv = np.linalg.svd(M, compute_uv=False)
    return float(sv[-1] / sv[-2])


def perturbed_flat(config: Configuration, scale: float, rng: np.random.Generator) -> Configuration:
    """Move every vertex by about ``scale`` inside the flat hyperplane.

    The result stays flat, so the flat analysis applies, but in general no
    longer belongs to a flexible family and loses the concurrency property.
    """
    check_flat(config)
    space = config.space
    basis, signs = spaces.complement_basis(space, [config.axis])

    def move(v):
        w = rng.standard_normal(len(basis)) @ basis
        if space.kind != EUCLIDEAN:
            w = spaces.project_out(space, w, [v], [float(spaces.bilinear_form(space, v, v))])
        q = abs(float(spaces.bilinear_form(space, w, w)))
        moved = v + scale * w / np.sqrt(q)
        return spaces.project_to_model(space, moved) if space.kind != EUCLIDEAN else moved

    a = np.array([move(v) for v in config.a])
    b = np.array([move(v) for v in config.b])
    return replace(config, a=a, b=b)


# --------------------------------------------------------------------------
# Classification

@dataclass(frozen=True)
class PerK:
    kind: str
    values: np.ndarray
    spread: float
    detail: float


@dataclass(frozen=True, eq=False)
class FlatAnalysis:
    O: np.ndarray
    residual: float
    case: str
    per_k: dict
    classes: dict
    parity_ok: dict
    o_kind: str
    margin: float = 0.0
    equal_angle: dict | None = None


def _oriented_covector(pk: PKCrossPolytope, F: FaceId) -> np.ndarray:
    """Covector of the facet hyperplane with the co-orientation induced by
    the coherent orientation of P_(k)."""
    space = pk.frame.space
    verts = pk.vertices_of(F)
    nu, c = _facet_normal(space, verts)
    chords = verts[1:] - verts[0]
    if space.kind == EUCLIDEAN:
        det = np.linalg.det(np.vstack([nu, chords]))
    else:
        det = np.linalg.det(np.vstack([verts[0], nu, chords]))
    if pk.facet_sign(F) * det < 0:
        nu, c = -nu, -c
    return _covector(space, nu, c)


def _o_kind(space: Space, O: np.ndarray, tol: float = 1e-9) -> str:
    if space.kind == SPHERICAL:
        return "antipodal-pair"
    if space.kind == EUCLIDEAN:
        return "finite" if abs(O[-1]) > tol else "infinite"
    q = float(spaces.bilinear_form(space, O, O))
    if q < -tol:
        return "interior"
    if q > tol:
        return "exterior"
    return "absolute"


def classify_flat(flat: Configuration, conc: Concurrency | None = None, tol: float = EQUAL_TOL) -> FlatAnalysis:
    """Classify the flat position by the position of O and check the facet classes."""
    check_flat(flat)
    frame = flat_frame(flat)
    if conc is None:
        conc = concurrency_point(flat, frame=frame)
    space = frame.space
    data = flat.family.data
    O = conc.point.copy()
    kind = _o_kind(space, O)
    if kind == "interior" and O[0] < 0:
        O = -O
    per_k, classes, parity = {}, {}, {}
    equal_angle = {} if space.kind == SPHERICAL else None
    margin = np.inf
    for k in range(flat.n):
        pk = pk_cross_polytope(flat, k, frame)
        Fs = pk.facets()
        cov = {F: _oriented_covector(pk, F) for F in Fs}
        vals = np.array([cov[F] @ O for F in Fs])
        if np.min(np.abs(vals)) < 1e-12:
            raise ClassificationError(f"O lies on a facet hyperplane of P_({k + 1})")
        anchor = Fs.index(next(F for F in Fs if not F.J))
        signs = np.sign(vals) * np.sign(vals[anchor])
        cls = {F: int(s < 0) for F, s in zip(Fs, signs)}
        classes[k] = cls
        X = X_set(data, k)
        parity[k] = all(cls[F] == len(set(F.J) - X) % 2 for F in Fs)
        per_k[k] = _per_k_data(space, kind, O, [cov[F] for F in Fs], tol)
        if equal_angle is not None:
            radius = per_k[k].detail
            equal_angle[k] = float(np.pi / 2 - radius)
        margin = min(margin, _angle_margin(pk))
    case = CASE_I if kind in ("antipodal-pair", "finite", "interior", "absolute") else CASE_II
    return FlatAnalysis(O, conc.residual, case, per_k, classes, parity, kind, float(margin), equal_angle)


def _per_k_data(space: Space, kind: str, O, covectors, tol) -> PerK:
    covs = np.array(covectors)
    if space.kind == EUCLIDEAN:
        normals = covs[:, :-1] / np.linalg.norm(covs[:, :-1], axis=1, keepdims=True)
        if kind == "finite":
            p = O[:-1] / O[-1]
            vals = np.abs(covs[:, :-1] @ p + covs[:, -1]) / np.linalg.norm(covs[:, :-1], axis=1)
            return PerK(CIRCUMSCRIBED, vals, float(np.ptp(vals)), float(vals.mean()))
        d = O[:-1] / np.linalg.norm(O[:-1])
        vals = np.arccos(np.clip(np.abs(normals @ d), 0.0, 1.0))
        return PerK(EQUAL_ANGLE, vals, float(np.ptp(vals)), float(vals.mean()))
    J = space.signature
    normals = covs * J  # vectors with the form
    if space.kind == SPHERICAL:
        o = O / np.linalg.norm(O)
        vals = np.arcsin(np.clip(np.abs(normals @ o), 0.0, 1.0))
        return PerK(CIRCUMSCRIBED, vals, float(np.ptp(vals)), float(vals.mean()))
    pairs = np.array([float(spaces.bilinear_form(space, v, O)) for v in normals])
    q = float(spaces.bilinear_form(space, O, O))
    if kind == "interior":
        vals = np.arcsinh(np.abs(pairs / np.sqrt(-q)))
        return PerK(CIRCUMSCRIBED, vals, float(np.ptp(vals)), float(vals.mean()))
    if kind == "absolute":
        vals = np.abs(pairs) / np.abs(pairs).max()
        return PerK(CIRCUMSCRIBED, vals, float(np.ptp(vals)), 0.0)
    c = np.abs(pairs / np.sqrt(q))
    mean = float(c.mean())
    if mean > 1 + tol:
        vals = np.arccosh(c)
        sub = EQUIDISTANT
    elif mean < 1 - tol:
        vals = np.arccos(c)
        sub = EQUAL_ANGLE
    else:
        vals = c
        sub = PARALLEL
    return PerK(sub, vals, float(np.ptp(vals)), float(vals.mean()))


def _angle_margin(pk: PKCrossPolytope) -> float:
    """Smallest distance of a dihedral angle of P_(k) from 0 and pi."""
    space = pk.frame.space
    worst = np.inf
    for G in pk.ridges():
        l, F, Fp = _ridge_facets(pk, G)
        x, plane = _normal_plane(space, pk.vertices_of(G)) if G.dim >= 0 else (None, None)
        if plane is None:
            continue
        t1 = _direction_angle(space, x, plane, pk.points[("a", l)])
        t2 = _direction_angle(space, x, plane, pk.points[("b", l)])
        d = abs(np.angle(np.exp(1j * (t2 - t1))))
        worst = min(worst, d, np.pi - d)
    return float(worst)


# --------------------------------------------------------------------------
# Ratio law and alternating sums

def position_lambda(data: SimplestTypeData, F: FaceId, u: float) -> float:
    """``lambda_F`` of the data for which the flat position ``u`` is the zero one.

    P_inf is the zero position of the dual data, whose index ``j`` is the
    original index ``n - 1 - j``.
    """
    if not np.isinf(u):
        return lambda_face(data, F)
    dual, perm = dual_family(data)
    inv = np.argsort(perm)
    return lambda_face(dual, FaceId.of([inv[i] for i in F.I], [inv[j] for j in F.J]))


def lemma_ratios(flat: Configuration, frame: FlatFrame | None = None):
    """For each (n-3)-face G: coincidence of B_{k,G} and B_{l,G}, and the
    worst deviation of ``r(F1, B_G, F2)`` from ``lambda_F2 / lambda_F1``."""
    frame = flat_frame(flat) if frame is None else frame
    data = flat.family.data
    u = flat.u
    n = flat.n
    coincide = 0.0
    ratio = 0.0
    for G in faces(n, n - 3):
        k, l = G.missing(n)
        pk = pk_cross_polytope(flat, k, frame)
        pl = pk_cross_polytope(flat, l, frame)
        Bk = bisector_hyperplane(pk, G)
        Bl = bisector_hyperplane(pl, G)
        coincide = max(coincide, Bk.distance(Bl))
        for F1 in (G.with_vertex("a", l), G.with_vertex("b", l)):
            for F2 in (G.with_vertex("a", k), G.with_vertex("b", k)):
                r = ratio_r(frame.space, pk.vertices_of(F1), Bk, pl.vertices_of(F2))
                want = position_lambda(data, F2, u) / position_lambda(data, F1, u)
                ratio = max(ratio, abs(r - want) / max(1.0, abs(want)))
    return coincide, ratio


def hemisphere_hypothesis(pk: PKCrossPolytope, O, tol: float = 1e-12) -> bool:
    """All vertices of P_(k) in a closed hemisphere bounded by the great
    sphere with pole ``+-O``."""
    vals = np.array([p @ O for p in pk.points.values()])
    return bool(np.all(vals >= -tol) or np.all(vals <= tol))


def circumscribed_alternating_sum(pk: PKCrossPolytope, analysis: FlatAnalysis) -> float:
    """Residual of the class-by-colour signed sum of facet volumes of P_(k)."""
    space = pk.frame.space
    if space.kind == SPHERICAL and not hemisphere_hypothesis(pk, analysis.O):
        raise NotApplicableError("P_(k) is not contained in a hemisphere concentric with its sphere")
    total = 0.0
    for F, cls in analysis.classes[pk.k].items():
        sign = (-1) ** (cls + len(F.J))
        total += sign * face_volume(pk.source, F).value
    return abs(total)


@dataclass(frozen=True, eq=False)
class FlatReport:
    analysis: FlatAnalysis
    concurrency: Concurrency
    coincidence: float
    ratio_error: float
    alternating: dict


def analyse(flat: Configuration) -> FlatReport:
    """Full analysis of one flat position."""
    frame = flat_frame(flat)
    conc = concurrency_point(flat, frame=frame)
    analysis = classify_flat(flat, conc)
    coincide, ratio = lemma_ratios(flat, frame)
    alt = {}
    for k in range(flat.n):
        pk = pk_cross_polytope(flat, k, frame)
        try:
            alt[k] = circumscribed_alternating_sum(pk, analysis)
        except NotApplicableError:
            alt[k] = None
    return FlatReport(analysis, conc, coincide, ratio, alt)
