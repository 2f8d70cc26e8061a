"""Oriented dihedral angles, their closed-form law, links and quadrangles.

The ambient orientation of a configuration is the sign ``sigma`` stored on
it: a tangent frame ``t_1..t_n`` at ``x`` is positive when
``sigma * det[x, t_1, .., t_n] > 0`` (curved) or ``sigma * det[t_1..t_n] > 0``
(euclidean).  K_n carries the orientation of ``combinatorics.complex_kn``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import spaces
from .combinatorics import EMPTY_FACE, FaceId, complex_kn, faces
from .errors import ClassificationError, DegenerateError, InputError, UnsupportedError
from .flexion import INF, Configuration, FlexFamily, SimplestTypeData, as_param, configuration
from .spaces import EUCLIDEAN, SPHERICAL, Space

TWO_PI = 2.0 * np.pi
DEGENERACY_TOL = 1e-10


def canonical_angle(theta: float) -> float:
    """Representative of ``theta`` mod 2 pi in ``(-pi, pi]``."""
    r = float(np.mod(theta, TWO_PI))
    return r - TWO_PI if r > np.pi else r


def angle_distance(a: float, b: float) -> float:
    """Distance in R / 2 pi Z."""
    return abs(canonical_angle(a - b))


def ambient_orientation_sign(data: SimplestTypeData) -> int:
    """``s_1 ... s_n``: +1 exactly when m is an interior normal of [a_1 .. a_n]."""
    return int(np.prod(data.s))


# --------------------------------------------------------------------------
# Measurement

def _point_in_face(space: Space, verts: np.ndarray) -> np.ndarray:
    x = verts.mean(axis=0)
    if space.kind == EUCLIDEAN:
        return x
    return spaces.project_to_model(space, x)


def _orientation_det(space: Space, sigma: int, x, vectors) -> float:
    rows = list(vectors)
    if space.kind != EUCLIDEAN:
        rows = [x] + rows
    return sigma * float(np.linalg.det(np.array(rows)))


def _tangent_basis(space: Space, x, verts):
    """Orthonormal basis of span(x, tangent space of the simplex) for curved
    spaces, or of the simplex directions for euclidean space."""
    chords = [v - verts[0] for v in verts[1:]]
    if space.kind == EUCLIDEAN:
        vecs = chords
    else:
        vecs = [x] + chords
    if not vecs:
        return np.zeros((0, space.dim)), np.zeros(0)
    return spaces.orthonormalize(space, vecs, tol=DEGENERACY_TOL)


def _normal_direction(space: Space, x, basis, signs, target) -> np.ndarray:
    """Unit tangent vector at x toward ``target``, orthogonal to the face."""
    v = target - x if space.kind == EUCLIDEAN else target
    w = spaces.project_out(space, v, basis, signs)
    q = float(spaces.bilinear_form(space, w, w))
    if q <= DEGENERACY_TOL ** 2:
        raise DegenerateError("vertex lies in the plane of the face")
    return w / np.sqrt(q)


def _dihedral_at(space, sigma, ridge_verts, apex1, apex2, facet1_verts, facet1_sign):
    """Oriented angle at a codimension-two face between the facets
    ``ridge + apex1`` (Delta_1) and ``ridge + apex2``.

    ``facet1_verts`` lists the vertices of Delta_1 in the order carrying
    orientation ``facet1_sign``.
    """
    x = _point_in_face(space, ridge_verts)
    basis, signs = _tangent_basis(space, x, ridge_verts)
    n1 = _normal_direction(space, x, basis, signs, apex1)
    n2 = _normal_direction(space, x, basis, signs, apex2)
    # the second direction of the normal plane
    full, full_signs = spaces.complement_basis(space, list(basis) + [n1])
    if len(full) != 1:
        raise DegenerateError("face normal plane is not two-dimensional")
    w = full[0]
    chords = [v - facet1_verts[0] for v in facet1_verts[1:]]
    det = facet1_sign * _orientation_det(space, sigma, x, [w] + chords)
    if abs(det) < DEGENERACY_TOL ** 2:
        raise DegenerateError("facet is degenerate")
    m1 = w if det > 0 else -w
    cos_part = float(spaces.bilinear_form(space, n2, n1))
    sin_part = -float(spaces.bilinear_form(space, n2, m1))
    return canonical_angle(np.arctan2(sin_part, cos_part))


def measured_dihedral(config: Configuration, F: FaceId, first: str = "a") -> float:
    """Oriented dihedral angle at the (n-2)-face ``F`` measured from the geometry.

    ``first`` selects which incident facet plays the role of Delta_1
    (``'a'``: the facet through ``a_k``); the value does not depend on it.
    """
    n = config.n
    if F.dim != n - 2:
        raise InputError("F must be an (n-2)-face")
    cx = complex_kn(n)
    fa, fb = cx.ridge_facets(F)
    (k,) = F.missing(n)
    f1, other = (fa, ("b", k)) if first == "a" else (fb, ("a", k))
    own = ("a", k) if first == "a" else ("b", k)
    return _dihedral_at(
        config.space,
        config.orientation,
        config.face_vertices(F),
        config.vertex(*own),
        config.vertex(*other),
        config.face_vertices(f1),
        cx.sign(f1),
    )


# --------------------------------------------------------------------------
# Closed form

def X_set(data: SimplestTypeData, k: int) -> frozenset[int]:
    """``{i < k : s_i s'_i = 1} | {i > k : s_i s'_i = -1}``."""
    p = data.products
    return frozenset(
        i for i in range(data.n) if (i < k and p[i] == 1) or (i > k and p[i] == -1)
    )


def lambda_face(data: SimplestTypeData, F: FaceId) -> float:
    """``lambda_F = (-1)^{|J & X_k|} s_k lambda_k``."""
    if F.dim != data.n - 2:
        raise InputError("F must be an (n-2)-face")
    (k,) = F.missing(data.n)
    parity = len(X_set(data, k) & set(F.J)) % 2
    return (-1.0 if parity else 1.0) * data.s[k] * data.lam[k]


def predicted_dihedral(data: SimplestTypeData, F: FaceId, u) -> float:
    """``2 arctan(lambda_F u) + (0 or pi)`` according to ``s_k s'_k``."""
    n = data.n
    if n == 2 and data.space.kind != SPHERICAL:
        raise UnsupportedError("the angle law is not asserted for quadrangles in E^2 and Lambda^2")
    u = as_param(u)
    lam_f = lambda_face(data, F)
    (k,) = F.missing(n)
    if np.isinf(u):
        turn = np.sign(lam_f) * np.pi
    else:
        turn = 2.0 * np.arctan(lam_f * u)
    offset = 0.0 if data.products[k] == 1 else np.pi
    return canonical_angle(turn + offset)


def unwrapped_increment(data: SimplestTypeData, F: FaceId, u) -> float:
    """``psi_F(u) - psi_F(0)`` followed continuously from 0 (not reduced mod 2 pi)."""
    u = as_param(u)
    lam_f = lambda_face(data, F)
    if np.isinf(u):
        return float(np.sign(lam_f) * np.pi)
    return float(2.0 * np.arctan(lam_f * u))


# --------------------------------------------------------------------------
# Links

@dataclass(frozen=True)
class LinkPolytope:
    """Link of a face: a cross-polytope in the unit sphere of the normal space.

    ``basis`` holds an orthonormal basis of the normal space (ambient
    coordinates); ``config`` is the link as a spherical configuration whose
    index ``j`` corresponds to the original index ``indices[j]``.
    """

    face: FaceId
    center: np.ndarray
    basis: np.ndarray
    indices: tuple[int, ...]
    config: Configuration

    def directions(self) -> dict[tuple[str, int], np.ndarray]:
        """Unit tangent directions (ambient coordinates) keyed by vertex label."""
        out = {}
        for j, i in enumerate(self.indices):
            out[("a", i)] = self.config.a[j] @ self.basis
            out[("b", i)] = self.config.b[j] @ self.basis
        return out


def link_of_face(config: Configuration, G: FaceId) -> LinkPolytope:
    """Link of ``G``; for the empty face of a spherical quadrangle, the
    quadrangle itself."""
    n = config.n
    space = config.space
    if G == EMPTY_FACE:
        if not (n == 2 and space.kind == SPHERICAL):
            raise InputError("the empty face has a link only for spherical quadrangles")
        basis = np.eye(space.dim)
        return LinkPolytope(G, np.zeros(space.dim), basis, (0, 1), config)
    if G.dim > n - 3:
        raise InputError("links are computed for faces of dimension at most n-3")
    verts = config.face_vertices(G)
    x = _point_in_face(space, verts)
    base, base_signs = _tangent_basis(space, x, verts)
    normal, _ = spaces.complement_basis(space, base)
    r = n - G.dim - 1
    if len(normal) != r + 1:
        raise DegenerateError("face is degenerate")
    idx = G.missing(n)
    J = space.signature

    def coords(target):
        d = _normal_direction(space, x, base, base_signs, target)
        return (normal * J) @ d

    a = np.array([coords(config.a[i]) for i in idx])
    b = np.array([coords(config.b[i]) for i in idx])
    link_space = Space(SPHERICAL, r)

    # orient the normal sphere so that exterior normals of link facets are
    # the exterior normals of the corresponding ambient facets
    cx = complex_kn(n)
    facet = G
    for i in idx:
        facet = facet.with_vertex("a", i)
    fverts = config.face_vertices(facet)
    own_basis, own_signs = _tangent_basis(space, x, fverts)
    ext_amb, _ = spaces.complement_basis(space, own_basis)
    if len(ext_amb) != 1:
        raise DegenerateError("facet is degenerate")
    chords = [v - fverts[0] for v in fverts[1:]]
    det = cx.sign(facet) * _orientation_det(space, config.orientation, x, [ext_amb[0]] + chords)
    m_amb = ext_amb[0] if det > 0 else -ext_amb[0]
    m_link = (normal * J) @ m_amb
    link_facet_sign = complex_kn(r).sign(FaceId.of(range(r), ()))
    y = a[0]
    link_chords = [a[j] - a[0] for j in range(1, r)]
    det_link = link_facet_sign * float(np.linalg.det(np.array([y, m_link] + link_chords)))
    if abs(det_link) < DEGENERACY_TOL:
        raise DegenerateError("link facet is degenerate")
    sigma = 1 if det_link > 0 else -1
    link_axis = np.zeros(r + 1)
    link_cfg = Configuration(link_space, a, b, config.u, link_axis, sigma, None)
    return LinkPolytope(G, x, normal, tuple(idx), link_cfg)


def link_dihedral(link: LinkPolytope, side: str, index: int) -> float:
    """Angle of a quadrangle link at the vertex ``(side, index)`` (original
    index), to be compared with the ambient angle at ``G + vertex``."""
    if link.config.n != 2:
        raise InputError("link_dihedral is defined for quadrangle links")
    return measured_dihedral(link.config, _link_ridge(link, side, index))


# --------------------------------------------------------------------------
# Quadrangles

QUAD_OPPOSITE_SAME = "opposite-sides-equal-inverse"
QUAD_OPPOSITE_FLIPPED = "opposite-sides-equal-inverse-second"
QUAD_SUPPLEMENTARY = "supplementary-sides"


@dataclass(frozen=True)
class QuadrangleClassification:
    type: str
    alpha: float
    beta: float
    bricard_constant: float
    constant_spread: float
    k: int
    l: int


def _quad_sides(link: LinkPolytope, k: int, l: int):
    """Side lengths AB, BC, CD, DA with A = a_l, B = a_k, C = b_l, D = b_k."""
    cfg = link.config
    jk, jl = link.indices.index(k), link.indices.index(l)
    A, B, C, D = cfg.a[jl], cfg.a[jk], cfg.b[jl], cfg.b[jk]

    def arc(p, q):
        return spaces.geodesic_distance(cfg.space, p, q)

    return arc(A, B), arc(B, C), arc(C, D), arc(D, A)


def default_quadrangle_samples(count: int = 16) -> np.ndarray:
    """Parameter samples away from the flat positions (both signs)."""
    mags = np.geomspace(0.05, 20.0, count // 2)
    return np.concatenate([mags, -mags[::-1]])


def classify_link_quadrangle(
    family: FlexFamily, G: FaceId, u_samples=None, tol: float = 1e-9, const_tol: float = 1e-8
) -> QuadrangleClassification:
    """Side pattern and Bricard constant of the link quadrangle of ``G``."""
    n = family.n
    if not (G.dim == n - 3 or (n == 2 and G == EMPTY_FACE and family.space.kind == SPHERICAL)):
        raise InputError("G must be an (n-3)-face")
    k, l = G.missing(n)
    u_samples = default_quadrangle_samples() if u_samples is None else np.asarray(u_samples)
    first = link_of_face(configuration(family, u_samples[0]), G)
    AB, BC, CD, DA = _quad_sides(first, k, l)
    if abs(AB - CD) < tol and abs(DA - BC) < tol:
        kind = "equal"
    elif abs(AB + CD - np.pi) < tol and abs(DA + BC - np.pi) < tol:
        kind = QUAD_SUPPLEMENTARY
    else:
        raise ClassificationError(
            f"link quadrangle sides {AB:.6g}, {BC:.6g}, {CD:.6g}, {DA:.6g} fit no regime"
        )
    alpha, beta = AB, DA
    if abs(alpha - beta) < tol or abs(alpha + beta - np.pi) < tol:
        raise ClassificationError("degenerate quadrangle: alpha = beta or alpha + beta = pi")
    values = []
    flips = []
    for u in u_samples:
        link = link_of_face(configuration(family, u), G)
        psi_a = link_dihedral(link, "a", l)
        psi_b = link_dihedral(link, "a", k)
        psi_c = link_dihedral(link, "b", l)
        ta, tb = np.tan(psi_a / 2), np.tan(psi_b / 2)
        values.append(ta * tb if kind == "equal" else ta / tb)
        flips.append(angle_distance(psi_c, -psi_a) < angle_distance(psi_c, psi_a))
    values = np.array(values)
    if kind == "equal":
        kind = QUAD_OPPOSITE_FLIPPED if all(flips) else QUAD_OPPOSITE_SAME
    spread = float(np.std(values))
    if spread > const_tol * max(1.0, abs(float(np.mean(values)))):
        raise ClassificationError(f"Bricard quantity is not constant (spread {spread:.3e})")
    return QuadrangleClassification(kind, alpha, beta, float(np.mean(values)), spread, k, l)


def _link_ridge(link: LinkPolytope, side: str, index: int) -> FaceId:
    """Ridge of the link quadrangle: the single vertex ``(side, index)``."""
    j = link.indices.index(index)
    return EMPTY_FACE.with_vertex(side, j)


def bricard_expression(alpha: float, beta: float) -> float:
    """``cos((alpha - beta)/2) / cos((alpha + beta)/2)``."""
    return float(np.cos((alpha - beta) / 2) / np.cos((alpha + beta) / 2))


def ridge_faces(n: int) -> list[FaceId]:
    return faces(n, n - 2)


def angle_table(config: Configuration) -> dict[FaceId, float]:
    return {F: measured_dihedral(config, F) for F in ridge_faces(config.n)}


def predicted_table(data: SimplestTypeData, u) -> dict[FaceId, float]:
    return {F: predicted_dihedral(data, F, u) for F in ridge_faces(data.n)}


__all__ = [
    "INF",
    "LinkPolytope",
    "QuadrangleClassification",
    "X_set",
    "ambient_orientation_sign",
    "angle_distance",
    "canonical_angle",
    "classify_link_quadrangle",
    "lambda_face",
    "link_of_face",
    "measured_dihedral",
    "predicted_dihedral",
]
