"""Volumes: simplices, faces, generalized oriented volume and its closed forms.

Curved simplices of dimension three and higher are integrated numerically
by radial projection of the flat simplex spanned by the vertex vectors,

    V = sqrt|det Gamma| * integral over the standard simplex of |t^T Gamma t|^(-(k+1)/2) dt,

with ``Gamma`` the Gram matrix of the vertices.  The integral uses a
collapsed (Duffy) Gauss-Jacobi product rule, compares two orders for an
error estimate and keeps bisecting the longest edge of the worst piece
until the summed estimate meets the tolerance.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import roots_jacobi

from . import spaces
from .angles import X_set, lambda_face, unwrapped_increment
from .combinatorics import FaceId, complex_kn, faces
from .errors import (
    DegenerateError,
    IndeterminateError,
    InputError,
    UnsupportedError,
)
from .flexion import Configuration, FlexFamily, SimplestTypeData, as_param, configuration
from .spaces import EUCLIDEAN, HYPERBOLIC, SPHERICAL, Space

EXACT = "exact"
QUADRATURE = "quadrature"
MONTE_CARLO = "monte-carlo"

DEFAULT_QUAD_TOL = {3: 1e-10, 4: 1e-7}
FLAT_TOL = 1e-12


def sphere_volume(n: int) -> float:
    """Volume ``2 pi^{(n+1)/2} / Gamma((n+1)/2)`` of the unit n-sphere."""
    if n < 0:
        raise InputError("n must be non-negative")
    return 2.0 * math.pi ** ((n + 1) / 2) / math.gamma((n + 1) / 2)


@dataclass(frozen=True)
class VolumeEstimate:
    value: float
    abs_error: float
    method: str


@dataclass(frozen=True)
class GeneralizedVolume:
    """Generalized oriented volume; ``modulus`` is sigma_n on the sphere."""

    value: float
    modulus: float | None = None
    abs_error: float = 0.0

    def __post_init__(self):
        if self.modulus is not None:
            value = float(np.mod(self.value, self.modulus))
            # representative of 0 for values a rounding error below the modulus
            if self.modulus - value <= 1e-12 * self.modulus:
                value = 0.0
            object.__setattr__(self, "value", value)
        object.__setattr__(self, "value", float(self.value) + 0.0)

    def distance(self, other) -> float:
        """Distance to another volume (or plain number), modulo sigma_n if set."""
        value = other.value if isinstance(other, GeneralizedVolume) else float(other)
        diff = self.value - value
        if self.modulus is None:
            return abs(diff)
        diff = float(np.mod(diff, self.modulus))
        return min(diff, self.modulus - diff)


# --------------------------------------------------------------------------
# Quadrature over the standard simplex

@lru_cache(maxsize=None)
def simplex_rule(k: int, order: int) -> tuple[np.ndarray, np.ndarray]:
    """Collapsed Gauss-Jacobi rule on ``{t >= 0, sum t = 1}`` in R^{k+1}.

    Returns barycentric nodes ``(N, k+1)`` and weights summing to ``1/k!``.
    """
    axes = []
    for j in range(1, k + 1):
        alpha = k - j
        y, w = roots_jacobi(order, alpha, 0.0)
        axes.append(((1.0 + y) / 2.0, w / 2.0 ** (alpha + 1)))
    grids = np.meshgrid(*[a[0] for a in axes], indexing="ij")
    wgrids = np.meshgrid(*[a[1] for a in axes], indexing="ij")
    x = np.stack([g.ravel() for g in grids], axis=1)
    w = np.prod(np.stack([g.ravel() for g in wgrids], axis=1), axis=1)
    t = np.zeros((x.shape[0], k + 1))
    remaining = np.ones(x.shape[0])
    for j in range(k):
        t[:, j + 1] = x[:, j] * remaining
        remaining = remaining * (1.0 - x[:, j])
    t[:, 0] = remaining
    return t, w


def _cone_integral(gamma: np.ndarray, order: int) -> float:
    k = gamma.shape[0] - 1
    t, w = simplex_rule(k, order)
    q = np.abs(np.einsum("pi,ij,pj->p", t, gamma, t))
    return float(np.sqrt(abs(np.linalg.det(gamma))) * (w @ q ** (-(k + 1) / 2.0)))


def _piece(space: Space, verts: np.ndarray) -> tuple[float, float]:
    k = verts.shape[0] - 1
    gamma = spaces.gram(space, verts)
    low_order = 6 if k >= 4 else 8
    lo = _cone_integral(gamma, low_order)
    hi = _cone_integral(gamma, low_order + 4)
    return hi, abs(hi - lo)


def _bisect(space: Space, verts: np.ndarray):
    gamma = spaces.gram(space, verts)
    # longest edge: smallest off-diagonal Gram entry (cos d, or -cosh d)
    np.fill_diagonal(gamma, np.inf)
    i, j = np.unravel_index(np.argmin(gamma), gamma.shape)
    mid = spaces.project_to_model(space, verts[i] + verts[j])
    left = verts.copy()
    left[i] = mid
    right = verts.copy()
    right[j] = mid
    return left, right


def _curved_quadrature(space: Space, verts: np.ndarray, tol: float, max_pieces: int = 4000):
    """Globally adaptive bisection: refine the piece with the largest error."""
    value, err = _piece(space, verts)
    heap = [(-err, 0, verts, value)]
    total_value, total_err = value, err
    counter = 1
    while total_err > tol:
        if len(heap) >= max_pieces:
            raise DegenerateError("simplex quadrature did not converge")
        neg_err, _, v, val = heapq.heappop(heap)
        total_value -= val
        total_err += neg_err
        for child in _bisect(space, v):
            cval, cerr = _piece(space, child)
            heapq.heappush(heap, (-cerr, counter, child, cval))
            counter += 1
            total_value += cval
            total_err += cerr
    # re-sum to avoid drift from the running updates
    return float(sum(p[3] for p in heap)), float(sum(-p[0] for p in heap))


# --------------------------------------------------------------------------
# Simplices

def _check_rank(space: Space, verts: np.ndarray, affine: bool):
    M = verts[1:] - verts[0] if affine else verts
    if M.size == 0:
        return
    sv = np.linalg.svd(M, compute_uv=False)
    scale = max(1.0, float(np.max(np.abs(verts))))
    if sv[-1] <= 1e-12 * scale * max(sv[0], 1.0):
        raise DegenerateError("simplex vertices are dependent")


def _vertex_angle(space: Space, p, q, r) -> float:
    sign = float(spaces.bilinear_form(space, p, p))
    basis = np.array([p / np.sqrt(abs(sign))])
    signs = np.array([np.sign(sign)])
    tq = spaces.project_out(space, q, basis, signs)
    tr = spaces.project_out(space, r, basis, signs)
    c = float(spaces.bilinear_form(space, tq, tr)) / np.sqrt(
        float(spaces.bilinear_form(space, tq, tq)) * float(spaces.bilinear_form(space, tr, tr))
    )
    return float(np.arccos(np.clip(c, -1.0, 1.0)))


def simplex_volume(space: Space, vertices, tol: float | None = None) -> VolumeEstimate:
    """Volume of the geodesic simplex with the given vertices."""
    verts = np.atleast_2d(np.asarray(vertices, dtype=float))
    k = verts.shape[0] - 1
    if verts.shape[1] != space.dim:
        raise InputError("vertex dimension does not match the space")
    if k > space.n:
        raise InputError("too many vertices for the space dimension")
    if k == 0:
        return VolumeEstimate(1.0, 0.0, EXACT)
    if space.kind == EUCLIDEAN:
        E = verts[1:] - verts[0]
        _check_rank(space, verts, affine=True)
        vol = float(np.sqrt(max(np.linalg.det(E @ E.T), 0.0)) / math.factorial(k))
        return VolumeEstimate(vol, 4 * np.finfo(float).eps * vol, EXACT)
    _check_rank(space, verts, affine=False)
    if k == 1:
        d = spaces.geodesic_distance(space, verts[0], verts[1])
        return VolumeEstimate(d, 4 * np.finfo(float).eps * max(d, 1.0), EXACT)
    if k == 2:
        p, q, r = verts
        total = _vertex_angle(space, p, q, r) + _vertex_angle(space, q, r, p) + _vertex_angle(space, r, p, q)
        area = total - np.pi if space.kind == SPHERICAL else np.pi - total
        return VolumeEstimate(float(area), 1e-14 * max(1.0, total), EXACT)
    if tol is None:
        tol = DEFAULT_QUAD_TOL.get(k, 1e-8)
    value, err = _curved_quadrature(space, verts, tol)
    return VolumeEstimate(value, err, QUADRATURE)


def face_volume(config: Configuration, F: FaceId, tol: float | None = None) -> VolumeEstimate:
    """Volume of the face ``F``; cached per family (faces are rigid)."""
    if F.dim <= 0:
        return VolumeEstimate(1.0, 0.0, EXACT)
    fam = config.family
    key = ("face_volume", F, tol)
    if fam is not None and key in fam._cache:
        return fam._cache[key]
    est = simplex_volume(config.space, config.face_vertices(F), tol)
    if fam is not None:
        fam._cache[key] = est
    return est


# --------------------------------------------------------------------------
# Winding numbers

def _facet_data(config: Configuration):
    cx = complex_kn(config.n)
    return [(config.face_vertices(f), cx.sign(f)) for f in cx.facets()]


def _crossing_sign(space, sigma, y, direction, verts, eps) -> int:
    chords = [v - verts[0] for v in verts[1:]]
    rows = [direction] + chords
    if space.kind == SPHERICAL:
        rows = [y] + rows
    det = np.linalg.det(np.array(rows))
    return int(np.sign(eps * sigma * det))


def _ray_crossings(config: Configuration, x, direction, facets, tol: float):
    """Signed crossings of the ray ``x + t d`` (t > 0) in flat or Klein coordinates."""
    total = 0
    space = config.space
    n = space.n
    for verts, eps in facets:
        pts = spaces.to_klein(verts) if space.kind == HYPERBOLIC else verts
        # x + t d = sum beta_j p_j, sum beta_j = 1
        A = np.zeros((n + 1, n + 1))
        A[:n, 0] = -direction
        A[:n, 1:] = pts.T
        A[n, 1:] = 1.0
        rhs = np.concatenate([x, [1.0]])
        try:
            sol = np.linalg.solve(A, rhs)
        except np.linalg.LinAlgError:
            return None
        if np.linalg.cond(A) > 1e12:
            return None
        t, beta = sol[0], sol[1:]
        if abs(t) < tol or np.any(np.abs(beta) < tol):
            if np.all(beta > -tol) and t > -tol:
                return None
            continue
        if t > 0 and np.all(beta > 0):
            chords = [p - pts[0] for p in pts[1:]]
            det = np.linalg.det(np.array([direction] + chords))
            total += int(np.sign(eps * config.orientation * det))
    return total


def _arc_crossings(config: Configuration, start, end, facets, tol: float):
    """Signed crossings of the chord-parametrized arc from ``start`` to ``end``."""
    total = 0
    space = config.space
    d = end - start
    for verts, eps in facets:
        # start + tau d = sum beta_j v_j
        A = np.column_stack([-d, verts.T])
        try:
            sol = np.linalg.solve(A, start)
        except np.linalg.LinAlgError:
            return None
        if np.linalg.cond(A) > 1e12:
            return None
        tau, beta = sol[0], sol[1:]
        near = abs(tau) < tol or abs(tau - 1) < tol or np.any(np.abs(beta) < tol * np.abs(beta).max())
        inside = -tol < tau < 1 + tol and np.all(beta > -tol * np.abs(beta).max())
        if near and inside:
            return None
        if 0 < tau < 1 and np.all(beta > 0):
            y = start + tau * d
            total += _crossing_sign(space, config.orientation, y, d, verts, eps)
    return total


def winding_number(
    config: Configuration,
    x,
    base=None,
    rng: np.random.Generator | None = None,
    tol: float = 1e-9,
    retries: int = 32,
) -> int:
    """Winding number of the polytope around ``x``.

    Euclidean and hyperbolic: crossings of a random ray to infinity.
    Spherical: ``base`` is assigned 0 and crossings along an arc are counted
    with the convention that leaving through a facet along its exterior
    normal lowers the value by one.
    """
    space = config.space
    x = np.asarray(x, dtype=float)
    rng = np.random.default_rng(0) if rng is None else rng
    facets = _facet_data(config)
    if space.kind == SPHERICAL:
        if base is None:
            raise InputError("spherical winding numbers need a base point")
        base = np.asarray(base, dtype=float)
        count = _arc_crossings(config, base, x, facets, tol)
        for _ in range(retries):
            if count is not None:
                return -count
            w = rng.standard_normal(space.dim)
            w /= np.linalg.norm(w)
            c1 = _arc_crossings(config, base, w, facets, tol)
            c2 = _arc_crossings(config, w, x, facets, tol)
            if c1 is not None and c2 is not None:
                count = c1 + c2
        if count is None:
            raise IndeterminateError("no generic path found")
        return -count
    point = spaces.to_klein(x) if space.kind == HYPERBOLIC else x
    for _ in range(retries):
        d = rng.standard_normal(space.n)
        d /= np.linalg.norm(d)
        count = _ray_crossings(config, point, d, facets, tol)
        if count is not None:
            return count
    raise IndeterminateError("no generic ray found")


# --------------------------------------------------------------------------
# Generalized volume

def is_flat(config: Configuration, tol: float = 1e-10) -> bool:
    pair = spaces.bilinear_form(config.space, config.all_vertices(), config.axis)
    if config.space.kind == EUCLIDEAN:
        pair = pair - pair[0]
    return bool(np.all(np.abs(pair) < tol))


def signed_cover_count(config: Configuration, y, tol: float = 1e-8) -> int | None:
    """Signed number of facets of a flat spherical configuration covering the
    point ``y`` of the great sphere orthogonal to the axis.

    Orientations are compared with that of [a_1 .. a_n].  Returns None when
    ``y`` is within ``tol`` of a facet boundary.
    """
    m = config.axis
    ref = np.sign(np.linalg.det(np.vstack([m, config.a])))
    total = 0
    for verts, eps in _facet_data(config):
        M = np.vstack([m, verts])
        det = np.linalg.det(M)
        coeff = np.linalg.solve(M.T, y)
        beta = coeff[1:]
        scale = np.abs(beta).max()
        if np.any(np.abs(beta) < tol * scale):
            return None
        if np.all(beta > 0):
            total += int(eps * np.sign(det) * ref)
    return total


def flat_degree(config: Configuration, rng: np.random.Generator, tries: int = 64) -> int:
    """Degree of a flat spherical configuration onto its equator."""
    basis, _ = spaces.complement_basis(config.space, [config.axis])
    for _ in range(tries):
        y = rng.standard_normal(len(basis)) @ basis
        y /= np.linalg.norm(y)
        count = signed_cover_count(config, y)
        if count is not None:
            return count
    raise IndeterminateError("no regular value found")


def _cone_pieces(config: Configuration, apex_label):
    cx = complex_kn(config.n)
    side, idx = apex_label
    apex = config.vertex(side, idx)
    pieces = []
    for f in cx.facets():
        if (side == "a" and f.i_mask >> idx & 1) or (side == "b" and f.j_mask >> idx & 1):
            continue
        pieces.append((f, cx.sign(f)))
    return apex, pieces


def generalized_volume(
    config: Configuration, tol: float | None = None, rng: np.random.Generator | None = None
) -> GeneralizedVolume:
    """Generalized oriented volume by the cone decomposition from one vertex."""
    space = config.space
    n = config.n
    modulus = sphere_volume(n) if space.kind == SPHERICAL else None
    if is_flat(config):
        if space.kind != SPHERICAL:
            return GeneralizedVolume(0.0, None, 0.0)
        deg = flat_degree(config, np.random.default_rng(0) if rng is None else rng)
        return GeneralizedVolume(deg * sphere_volume(n) / 2.0, modulus, 0.0)
    labels = [("a", i) for i in range(n)] + [("b", i) for i in range(n)]
    last_error = None
    for label in labels:
        apex, pieces = _cone_pieces(config, label)
        total, err = 0.0, 0.0
        try:
            for f, eps in pieces:
                verts = config.face_vertices(f)
                simplex = np.vstack([apex, verts])
                if space.kind == EUCLIDEAN:
                    det = np.linalg.det(verts - apex)
                else:
                    det = np.linalg.det(simplex)
                eta = np.sign(eps * config.orientation * det)
                est = simplex_volume(space, simplex, tol)
                total += eta * est.value
                err += est.abs_error
        except DegenerateError as exc:
            last_error = exc
            continue
        return GeneralizedVolume(total, modulus, err)
    raise DegenerateError(f"every apex gives a degenerate decomposition ({last_error})")


def monte_carlo_volume(
    config: Configuration, samples: int, rng: np.random.Generator, box: float = 3.0
) -> tuple[float, float]:
    """Monte Carlo estimate of the integral of the winding number.

    Sphere: uniform points, base point drawn once.  Euclidean: uniform in a
    cube of half-width ``box`` around the origin.  Hyperbolic: uniform in
    the Klein ball with the hyperbolic density.  Returns ``(value, stderr)``.
    """
    space = config.space
    n = space.n
    vals = np.zeros(samples)
    if space.kind == SPHERICAL:
        base = rng.standard_normal(space.dim)
        base /= np.linalg.norm(base)
        for s in range(samples):
            x = rng.standard_normal(space.dim)
            x /= np.linalg.norm(x)
            vals[s] = winding_number(config, x, base, rng)
        vals *= sphere_volume(n)
    elif space.kind == EUCLIDEAN:
        for s in range(samples):
            x = rng.uniform(-box, box, size=n)
            vals[s] = winding_number(config, x, rng=rng)
        vals *= (2 * box) ** n
    else:
        ball = math.pi ** (n / 2) / math.gamma(n / 2 + 1)
        for s in range(samples):
            while True:
                k = rng.uniform(-1, 1, size=n)
                r2 = float(k @ k)
                if r2 < 1.0:
                    break
            density = (1.0 - r2) ** (-(n + 1) / 2.0)
            p = spaces.from_klein(k)
            vals[s] = winding_number(config, p, rng=rng) * density
        vals *= ball
    return float(vals.mean()), float(vals.std(ddof=1) / np.sqrt(samples))


# --------------------------------------------------------------------------
# Schlafli integration and closed forms

def initial_volume(data: SimplestTypeData) -> float:
    """Volume of the flat position P_0: sigma_n/2 iff spherical with all products -1."""
    if data.space.kind == SPHERICAL and np.all(data.products == -1):
        return sphere_volume(data.n) / 2.0
    return 0.0


def schlafli_volume(family: FlexFamily, u) -> GeneralizedVolume:
    """``V(P_0) + eps/(n-1) * sum_F V_F (psi_F(u) - psi_F(0))``."""
    space = family.space
    n = family.n
    if space.kind == EUCLIDEAN:
        raise UnsupportedError("the volume does not enter Schlafli's formula in E^n")
    if n < 3:
        raise UnsupportedError("Schlafli integration needs n >= 3")
    u = as_param(u)
    eps = 1.0 if space.kind == SPHERICAL else -1.0
    cfg = configuration(family, 0.0)
    total = initial_volume(family.data)
    err = 0.0
    for F in faces(n, n - 2):
        vf = face_volume(cfg, F)
        inc = unwrapped_increment(family.data, F, u)
        total += eps / (n - 1) * vf.value * inc
        err += abs(inc) * vf.abs_error / (n - 1)
    modulus = sphere_volume(n) if space.kind == SPHERICAL else None
    return GeneralizedVolume(total, modulus, err)


def _arctan(lam: float, u: float) -> float:
    return math.copysign(math.pi / 2, lam) if math.isinf(u) else math.atan(lam * u)


def closed_form_volume(data: SimplestTypeData, u) -> GeneralizedVolume:
    """Closed-form generalized volume of the family at ``u``."""
    u = as_param(u)
    if data.space.kind != SPHERICAL:
        return GeneralizedVolume(0.0, None, 0.0)
    n = data.n
    sig = sphere_volume(n)
    p = data.products
    s = data.s
    lam = data.lam
    if np.all(p == 1):
        value = s[0] * sig / math.pi * _arctan(lam[0], u)
    elif np.all(p == -1):
        value = sig / 2 + s[-1] * sig / math.pi * _arctan(lam[-1], u)
    else:
        neg = np.flatnonzero(p == -1)
        k = len(neg)
        if np.array_equal(neg, np.arange(k)):
            value = sig / math.pi * (
                s[k - 1] * _arctan(lam[k - 1], u) + s[k] * _arctan(lam[k], u)
            )
        else:
            value = 0.0
    return GeneralizedVolume(value, sig, 0.0)


def empty_x_indices(data: SimplestTypeData) -> list[int]:
    return [k for k in range(data.n) if not X_set(data, k)]


# --------------------------------------------------------------------------
# Face-volume relations

def facet_relation_residual(family: FlexFamily, which: str = "Y+", u=0.0) -> float:
    """Residual of ``sum_{A,B} (-1)^{|B & Y|} V_{A,B}`` against its value."""
    if which not in ("Y+", "Y-"):
        raise InputError("which must be 'Y+' or 'Y-'")
    data = family.data
    target = 1 if which == "Y+" else -1
    Y = {i for i in range(data.n) if data.products[i] == target}
    cfg = configuration(family, u)
    total = 0.0
    for f in complex_kn(data.n).facets():
        sign = -1.0 if len(Y & set(f.J)) % 2 else 1.0
        total += sign * face_volume(cfg, f).value
    rhs = sphere_volume(data.n - 1) if data.space.kind == SPHERICAL and not Y else 0.0
    return abs(total - rhs)


def codim2_relation_residual(family: FlexFamily, k: int, u=0.0) -> float:
    """Residual of the signed sum of volumes of the faces missing index ``k``."""
    data = family.data
    n = data.n
    if n < 3 and not (n == 2 and data.space.kind == SPHERICAL):
        raise UnsupportedError("relation needs n >= 3 (or a spherical quadrangle)")
    X = X_set(data, k)
    cfg = configuration(family, u)
    total = 0.0
    for F in faces(n, n - 2):
        if F.missing(n) != (k,):
            continue
        sign = -1.0 if len(X & set(F.J)) % 2 else 1.0
        total += sign * face_volume(cfg, F).value
    rhs = sphere_volume(n - 2) if data.space.kind == SPHERICAL and not X else 0.0
    return abs(total - rhs)


# --------------------------------------------------------------------------
# Antipodal flips

def antipode_flip(data: SimplestTypeData, vertex: tuple[str, int]) -> SimplestTypeData:
    """Replace the vertex ``('a', i)`` or ``('b', i)`` by its antipode."""
    if data.space.kind != SPHERICAL:
        raise UnsupportedError("antipodes exist only on the sphere")
    side, i = vertex
    if side == "a":
        s = data.s.copy()
        s[i] = -s[i]
        return data.with_signs(s=s)
    if side == "b":
        sp = data.s_prime.copy()
        sp[i] = -sp[i]
        return data.with_signs(s_prime=sp)
    raise InputError("vertex side must be 'a' or 'b'")


def apply_flips(data: SimplestTypeData, flips) -> SimplestTypeData:
    for v in flips:
        data = antipode_flip(data, v)
    return data


def modified_bellows_witness(data: SimplestTypeData) -> list[tuple[str, int]]:
    """Flips of b-vertices making ``s_1 s'_1 = 1`` and ``s_2 s'_2 = -1``."""
    if data.space.kind != SPHERICAL:
        raise UnsupportedError("the witness is defined for spherical data")
    if data.n < 2:
        raise InputError("n must be at least 2")
    flips = []
    if data.products[0] != 1:
        flips.append(("b", 0))
    if data.products[1] != -1:
        flips.append(("b", 1))
    return flips


def schlafli_face_terms(family: FlexFamily):
    """Per-face ``(F, V_F, lambda_F)`` used by the Schlafli route."""
    cfg = configuration(family, 0.0)
    return [
        (F, face_volume(cfg, F).value, lambda_face(family.data, F))
        for F in faces(family.n, family.n - 2)
    ]
