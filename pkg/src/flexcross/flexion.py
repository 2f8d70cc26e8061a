"""Flexible cross-polytopes of the simplest type.

A family is generated by a Gram matrix ``G``, increasing positive rates
``lam`` and two sign rows ``s``, ``s_prime``.  The vertices ``a_i`` stay
fixed while the ``b_i`` move along rational curves in the parameter ``u``;
``u = 0`` and ``u = inf`` are the two flat positions.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
import numpy as np

from . import spaces
from .combinatorics import FaceId, faces
from .errors import (
    DegenerateError,
    InconsistentSignsError,
    InputError,
    InvalidDataError,
    NotTimelikeError,
)
from .spaces import EUCLIDEAN, HYPERBOLIC, SPHERICAL, Frame, Space

INF = float("inf")


def _frozen(x) -> np.ndarray:
    arr = np.array(x, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class SimplestTypeData:
    """Generator ``(G, lambda, s, s')`` of one flexible family."""

    space: Space
    G: np.ndarray
    lam: np.ndarray
    s: np.ndarray
    s_prime: np.ndarray

    def __post_init__(self):
        for name in ("G", "lam", "s", "s_prime"):
            object.__setattr__(self, name, _frozen(getattr(self, name)))
        n = self.space.n
        if self.G.shape != (n, n):
            raise InputError(f"G must be {n}x{n}, got {self.G.shape}")
        for name in ("lam", "s", "s_prime"):
            if getattr(self, name).shape != (n,):
                raise InputError(f"{name} must have length {n}")
        for name in ("s", "s_prime"):
            if not np.all(np.isin(getattr(self, name), (-1.0, 1.0))):
                raise InputError(f"{name} entries must be +1 or -1")

    @property
    def n(self) -> int:
        return self.space.n

    @property
    def products(self) -> np.ndarray:
        """The products ``s_i s'_i``."""
        return (self.s * self.s_prime).astype(int)

    def with_signs(self, s=None, s_prime=None) -> "SimplestTypeData":
        return replace(
            self,
            s=self.s if s is None else s,
            s_prime=self.s_prime if s_prime is None else s_prime,
        )

    def __eq__(self, other):
        if not isinstance(other, SimplestTypeData):
            return NotImplemented
        return (
            self.space == other.space
            and np.array_equal(self.G, other.G)
            and np.array_equal(self.lam, other.lam)
            and np.array_equal(self.s, other.s)
            and np.array_equal(self.s_prime, other.s_prime)
        )

    __hash__ = None


def validate_data(data: SimplestTypeData) -> str | None:
    """First violated condition, or None when the data is admissible."""
    bad = spaces.condition_violation(data.space.kind, data.G)
    if bad is not None:
        return bad
    lam = data.lam
    if not np.all(np.isfinite(lam)) or np.any(lam <= 0):
        return "lambda positive"
    if np.any(np.diff(lam) <= 0):
        return "lambda strictly increasing"
    if data.space.kind != SPHERICAL and len(set(data.products)) == 1:
        return "products s_i s'_i not all equal"
    return None


def h_matrix(G, lam) -> np.ndarray:
    """``h_ij = 2 l_i (l_i g_ij - l_j) / (l_i^2 - l_j^2)`` with unit diagonal."""
    G = np.asarray(G, dtype=float)
    lam = np.asarray(lam, dtype=float)
    li = lam[:, None]
    lj = lam[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        H = 2.0 * li * (li * G - lj) / (li * li - lj * lj)
    np.fill_diagonal(H, 1.0)
    return H


def flex_coefficients(t: float) -> tuple[float, float]:
    """``(2t^2/(t^2+1), 2t/(t^2+1))`` evaluated stably, including ``t = +-inf``."""
    if np.isinf(t):
        return 2.0, 0.0
    if abs(t) > 1.0:
        r = 1.0 / t
        return 2.0 / (1.0 + r * r), 2.0 * r / (1.0 + r * r)
    return 2.0 * t * t / (1.0 + t * t), 2.0 * t / (1.0 + t * t)


def as_param(u) -> float:
    """Normalize a parameter value; both infinities denote the single point inf."""
    if isinstance(u, str):
        token = u.strip().lower()
        if token in ("inf", "+inf", "-inf", "infinity"):
            return INF
        u = float(token)
    u = float(u)
    if np.isnan(u):
        raise InputError("parameter must not be NaN")
    return INF if np.isinf(u) else u


@dataclass(frozen=True)
class EuclideanBase:
    """Base simplex ``[a_1 .. a_n]`` in the hyperplane through 0 orthogonal to m."""

    vertices: np.ndarray
    altitudes: np.ndarray
    coefficients: np.ndarray


@dataclass(frozen=True, eq=False)
class FlexFamily:
    data: SimplestTypeData
    frame: Frame
    H: np.ndarray
    euclidean_base: EuclideanBase | None = None
    orientation: int = 1
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def space(self) -> Space:
        return self.data.space

    @property
    def n(self) -> int:
        return self.data.n


@dataclass(frozen=True, eq=False)
class Configuration:
    """Vertex positions at one parameter value.

    ``orientation`` is the sign ``sigma`` that fixes the ambient orientation:
    a frame ``t_1..t_n`` at ``x`` is positive iff
    ``sigma * det[x, t_1, .., t_n] > 0`` (curved) or
    ``sigma * det[t_1, .., t_n] > 0`` (euclidean).
    """

    space: Space
    a: np.ndarray
    b: np.ndarray
    u: float
    axis: np.ndarray
    orientation: int
    family: FlexFamily | None = None

    @property
    def n(self) -> int:
        return self.space.n

    def vertex(self, side: str, index: int) -> np.ndarray:
        return self.a[index] if side == "a" else self.b[index]

    def face_vertices(self, face: FaceId) -> np.ndarray:
        """Vertex coordinates of ``face`` in index order."""
        rows = [self.vertex(side, i) for side, i in face.vertices()]
        return np.array(rows).reshape(len(rows), self.space.dim)

    def all_vertices(self) -> np.ndarray:
        return np.vstack([self.a, self.b])

    def transformed(self, matrix) -> "Configuration":
        """Image under a linear isometry of determinant +1."""
        M = np.asarray(matrix, dtype=float)
        return replace(self, a=self.a @ M.T, b=self.b @ M.T, axis=M @ self.axis)


def _base_simplex(frame: Frame) -> tuple[np.ndarray, np.ndarray]:
    """Vertices (in coordinates orthogonal to m) and signed altitudes of a
    simplex whose facet normals are the n_i."""
    N = frame.normals[:, 1:]
    n = N.shape[0]
    # outward normals nu_j = sigma_j n_j satisfy sum_j area_j nu_j = 0
    w, Q = np.linalg.eigh(N @ N.T)
    mu = Q[:, 0]
    if np.any(np.abs(mu) < 1e-10):
        raise DegenerateError("normals do not bound a simplex")
    nu = np.sign(mu)[:, None] * N
    verts = np.zeros((n, n - 1))
    for i in range(n):
        rows = [j for j in range(n) if j != i]
        verts[i] = np.linalg.solve(nu[rows], np.ones(n - 1))
    verts -= verts.mean(axis=0)
    verts /= np.linalg.norm(verts[0])
    other = [1 if i == 0 else 0 for i in range(n)]
    alt = np.array([(verts[i] - verts[other[i]]) @ N[i] for i in range(n)])
    return verts, alt


def _euclidean_base(space: Space, frame: Frame, s) -> EuclideanBase:
    n = space.n
    verts, alt = _base_simplex(frame)
    if np.sign(alt[0]) != s[0]:
        verts = -verts
        alt = -alt
    if np.any(np.sign(alt) != s):
        raise InconsistentSignsError(
            "signs s_i are not realizable: interior/exterior pattern of the base "
            f"simplex normals is {np.sign(alt).astype(int).tolist()} up to a global flip"
        )
    full = np.zeros((n, n))
    full[:, 1:] = verts
    return EuclideanBase(full, alt, np.zeros(n))


def build(
    data: SimplestTypeData, frame: Frame | None = None, base_vertices=None
) -> FlexFamily:
    """Construct the family.

    ``frame`` overrides the canonical realization of G.  For euclidean data
    ``base_vertices`` overrides the normalized base simplex; it must have
    the frame normals as facet normals.
    """
    problem = validate_data(data)
    if problem is not None:
        raise InvalidDataError(f"data violates condition: {problem}")
    space = data.space
    if frame is None:
        frame = spaces.realize_gram(space, data.G)
    H = h_matrix(data.G, data.lam)
    base = None
    if space.kind == EUCLIDEAN:
        if base_vertices is None:
            base = _euclidean_base(space, frame, data.s)
        else:
            verts = np.asarray(base_vertices, dtype=float)
            alt = np.array(
                [(verts[i] - verts[1 if i == 0 else 0]) @ frame.normals[i] for i in range(space.n)]
            )
            if np.any(np.sign(alt) != data.s):
                raise InconsistentSignsError("base simplex does not match the signs s_i")
            base = EuclideanBase(verts, alt, np.zeros(space.n))
        denom = H @ (1.0 / base.altitudes)
        if np.any(np.abs(denom) < 1e-12 * np.abs(H).sum(axis=1) / np.abs(base.altitudes).min()):
            raise DegenerateError("vanishing denominator sum_j h_ij / a_j")
        coeff = 1.0 / denom
        if np.any(np.sign(coeff) != data.s_prime):
            raise InconsistentSignsError(
                f"signs of b_i are {np.sign(coeff).astype(int).tolist()}, "
                f"s' = {data.s_prime.astype(int).tolist()}"
            )
        base = EuclideanBase(base.vertices, base.altitudes, coeff)
    else:
        duals = spaces.dual_basis(space, frame)
        if space.kind == HYPERBOLIC:
            # a time reversal keeps G; use it to match the sheet to s_1
            if np.sign(duals[0, 0]) != data.s[0]:
                T = np.ones(space.dim)
                T[0] = -1.0
                frame = Frame(frame.normals * T, frame.axis * T)
                duals = duals * T
            forced = np.sign(duals[:, 0])
            if np.any(forced != data.s):
                raise InconsistentSignsError(
                    "signs s_i disagree with the sheet: forced pattern "
                    f"{forced.astype(int).tolist()} up to a global flip"
                )
        frame = frame.with_duals(duals)
    fam = FlexFamily(data, frame, H, base)
    sigma = _orientation_sign(fam)
    return replace(fam, orientation=sigma)


def _orientation_sign(fam: FlexFamily) -> int:
    """Ambient orientation in which m is the interior normal of the
    positively oriented facet [a_1 .. a_n].

    Exterior normals are the first vector of a positive frame, so the frame
    ``(m, a_2 - a_1, .., a_n - a_1)`` at ``a_1`` must be negative.  Relative
    to the simplex [c_1 .. c_n] of dual vectors this says m is interior
    exactly when ``s_1 ... s_n = 1``.
    """
    a = base_vertices(fam)
    m = fam.frame.axis
    frame = [m] + [a[i] - a[0] for i in range(1, fam.n)]
    if fam.space.curved:
        det = np.linalg.det(np.array([a[0]] + frame))
    else:
        det = np.linalg.det(np.array(frame))
    if abs(det) < 1e-14:
        raise DegenerateError("base simplex is degenerate")
    return -int(np.sign(det))


def base_vertices(fam: FlexFamily) -> np.ndarray:
    """The fixed vertices ``a_i``."""
    if "a" not in fam._cache:
        if fam.space.kind == EUCLIDEAN:
            a = fam.euclidean_base.vertices.copy()
        else:
            a = np.array(
                [
                    spaces.project_to_model(fam.space, c, int(s))
                    for c, s in zip(fam.frame.duals, fam.data.s)
                ]
            )
        a.setflags(write=False)
        fam._cache["a"] = a
    return fam._cache["a"]


def d_vector(family: FlexFamily, i: int, u) -> np.ndarray:
    """``d_i(u) = sum_j h_ij c_j - coef1 n_i + coef2 m``."""
    if family.space.kind == EUCLIDEAN:
        raise InputError("d_vector is defined for spherical and hyperbolic families")
    u = as_param(u)
    fr = family.frame
    lam = family.data.lam[i]
    t = INF if np.isinf(u) else lam * u
    c1, c2 = flex_coefficients(t)
    return family.H[i] @ fr.duals - c1 * fr.normals[i] + c2 * fr.axis


def _moving_vertex(family: FlexFamily, i: int, u: float) -> np.ndarray:
    space = family.space
    if space.kind == EUCLIDEAN:
        base = family.euclidean_base
        lam = family.data.lam[i]
        t = INF if np.isinf(u) else lam * u
        c1, c2 = flex_coefficients(t)
        coeff = base.coefficients[i]
        combo = (family.H[i] / base.altitudes) @ base.vertices
        return coeff * (combo - c1 * family.frame.normals[i] + c2 * family.frame.axis)
    d = d_vector(family, i, u)
    if space.kind == SPHERICAL:
        return spaces.project_to_model(space, d, int(family.data.s_prime[i]))
    q = float(spaces.bilinear_form(space, d, d))
    if q >= -spaces.CLAMP_TOL:
        raise NotTimelikeError(f"d_{i + 1}(u) is not time-like at u = {u}")
    if np.sign(d[0]) != family.data.s_prime[i]:
        raise InconsistentSignsError(
            f"s'_{i + 1} = {int(family.data.s_prime[i])} puts b_{i + 1} on the lower sheet"
        )
    return spaces.project_to_model(space, d)


def configuration(family: FlexFamily, u) -> Configuration:
    u = as_param(u)
    a = base_vertices(family)
    b = np.array([_moving_vertex(family, i, u) for i in range(family.n)])
    return Configuration(
        family.space, a.copy(), b, u, family.frame.axis.copy(), family.orientation, family
    )


def edge_length_table(config: Configuration) -> dict[FaceId, float]:
    out = {}
    for edge in faces(config.n, 1):
        p, q = config.face_vertices(edge)
        out[edge] = spaces.geodesic_distance(config.space, p, q)
    return out


def dual_family(data: SimplestTypeData) -> tuple[SimplestTypeData, np.ndarray]:
    """Data of the same cross-polytope read with ``u -> 1/u``.

    Rates become ``1/lam`` and ``s'`` changes sign; indices are reversed to
    keep the rates increasing.  Returns ``(dual, perm)`` where index ``i``
    of the dual is index ``perm[i]`` of the original.
    """
    perm = np.arange(data.n)[::-1]
    dual = SimplestTypeData(
        data.space,
        data.G[np.ix_(perm, perm)],
        1.0 / data.lam[perm],
        data.s[perm],
        -data.s_prime[perm],
    )
    return dual, perm


def dual_frame(family: FlexFamily, perm) -> Frame:
    """Frame for the dual data that reproduces the original vertices.

    The axis is reversed: with the same axis the dual cross-polytope at
    ``1/u`` is the mirror image of the original in the hyperplane m^perp.
    """
    fr = family.frame
    return Frame(fr.normals[perm], -fr.axis)


def build_dual(family: FlexFamily) -> tuple[FlexFamily, np.ndarray]:
    """Dual family realized on the same vertices (see ``dual_family``)."""
    data, perm = dual_family(family.data)
    base = None
    if family.euclidean_base is not None:
        base = family.euclidean_base.vertices[perm]
    return build(data, dual_frame(family, perm), base), perm


def negate_signs(data: SimplestTypeData) -> SimplestTypeData:
    """Simultaneous sign change of all s_i and s'_i (same cross-polytope up to isometry)."""
    return data.with_signs(-data.s, -data.s_prime)


def forced_signs(space: Space, G) -> np.ndarray | None:
    """Sign row s forced by G, normalized to ``s_1 = +1``.

    Euclidean and hyperbolic families admit one pattern of s up to a global
    flip; spherical families accept any pattern (returns None).
    """
    if space.kind == SPHERICAL:
        return None
    frame = spaces.realize_gram(space, G)
    if space.kind == HYPERBOLIC:
        sig = np.sign(spaces.dual_basis(space, frame)[:, 0])
    else:
        sig = np.sign(_base_simplex(frame)[1])
    return sig * sig[0]


def forced_primes(space: Space, G, lam, s) -> np.ndarray | None:
    """Sign row s' forced by ``(G, lam, s)``; None for the sphere."""
    if space.kind == SPHERICAL:
        return None
    frame = spaces.realize_gram(space, G)
    H = h_matrix(G, lam)
    if space.kind == EUCLIDEAN:
        verts, alt = _base_simplex(frame)
        flip = np.sign(alt[0]) * s[0]
        return np.sign(1.0 / (H @ (1.0 / (alt * flip))))
    c = spaces.dual_basis(space, frame)
    flip = np.sign(c[0, 0]) * s[0]
    return np.sign((H @ c)[:, 0]) * flip
