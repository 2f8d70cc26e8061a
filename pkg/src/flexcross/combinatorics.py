"""The boundary complex K_n of the n-dimensional cross-polytope.

Vertices are ``a_1..a_n`` and ``b_1..b_n``; a face is a set of vertices that
never contains both ``a_i`` and ``b_i``.  Indices are 0-based throughout the
API, so ``FaceId.of({0}, {2})`` names the edge ``[a_1 b_3]``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, product

from .errors import InputError

MAX_N = 32


def _mask(indices) -> int:
    m = 0
    for i in indices:
        i = int(i)
        if not 0 <= i < MAX_N:
            raise InputError(f"index {i} outside supported range [0, {MAX_N})")
        m |= 1 << i
    return m


def _bits(mask: int) -> tuple[int, ...]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


@dataclass(frozen=True, order=True)
class FaceId:
    """Face spanned by ``a_i`` for i in I and ``b_j`` for j in J."""

    i_mask: int
    j_mask: int

    def __post_init__(self):
        if self.i_mask & self.j_mask:
            raise InputError("I and J must be disjoint")
        if self.i_mask < 0 or self.j_mask < 0:
            raise InputError("negative mask")

    @classmethod
    def of(cls, I=(), J=()) -> "FaceId":
        return cls(_mask(I), _mask(J))

    @property
    def I(self) -> tuple[int, ...]:
        return _bits(self.i_mask)

    @property
    def J(self) -> tuple[int, ...]:
        return _bits(self.j_mask)

    @property
    def support(self) -> int:
        return self.i_mask | self.j_mask

    @property
    def dim(self) -> int:
        return bin(self.support).count("1") - 1

    def vertices(self) -> list[tuple[str, int]]:
        """Vertex labels ``('a', i)`` / ``('b', j)`` sorted by index."""
        return [("a", i) if self.i_mask >> i & 1 else ("b", i) for i in _bits(self.support)]

    def missing(self, n: int) -> tuple[int, ...]:
        """Indices of [n] used by neither I nor J."""
        return _bits(((1 << n) - 1) & ~self.support)

    def contains(self, other: "FaceId") -> bool:
        return (other.i_mask & ~self.i_mask) == 0 and (other.j_mask & ~self.j_mask) == 0

    def with_vertex(self, side: str, index: int) -> "FaceId":
        if side == "a":
            return FaceId(self.i_mask | 1 << index, self.j_mask)
        return FaceId(self.i_mask, self.j_mask | 1 << index)

    def label(self) -> str:
        """1-based human-readable label such as ``a1b3``; empty face is ``-``."""
        parts = [f"{side}{i + 1}" for side, i in self.vertices()]
        return "".join(parts) if parts else "-"

    def __repr__(self):
        return f"FaceId(I={set(self.I) or '{}'}, J={set(self.J) or '{}'})"


EMPTY_FACE = FaceId(0, 0)


def faces(n: int, dim: int) -> list[FaceId]:
    """All faces of K_n of the given dimension (``-1`` gives the empty face)."""
    if not 2 <= n <= MAX_N:
        raise InputError(f"n must lie in [2, {MAX_N}]")
    if not -1 <= dim <= n - 1:
        raise InputError(f"dim must lie in [-1, {n - 1}], got {dim}")
    out = []
    for support in combinations(range(n), dim + 1):
        for choice in product((0, 1), repeat=dim + 1):
            I = [i for i, c in zip(support, choice) if c == 0]
            J = [i for i, c in zip(support, choice) if c == 1]
            out.append(FaceId.of(I, J))
    return out


def facet_orientation_sign(n: int, A, B) -> int:
    """Sign of the facet with a-indices A and b-indices B.

    Vertices are listed in index order.  Swapping ``a_k`` for ``b_k`` keeps
    the position of the vertex, so adjacent facets induce opposite
    orientations on their common ridge exactly when the sign flips with
    every swap.  The result is ``(-1)^|B|``; ``complex_kn`` re-checks
    coherence.
    """
    A, B = set(A), set(B)
    if A & B or A | B != set(range(n)):
        raise InputError("A and B must partition [n]")
    return -1 if len(B) % 2 else 1


def induced_sign(facet: FaceId, ridge: FaceId, facet_sign: int) -> int:
    """Orientation induced on ``ridge`` by the facet orientation.

    The boundary of ``[v_0 .. v_{n-1}]`` contains ``(-1)^p [.. omit v_p ..]``.
    """
    if not facet.contains(ridge) or facet.dim != ridge.dim + 1:
        raise InputError("ridge is not a codimension-one face of facet")
    extra = facet.support & ~ridge.support
    position = bin(facet.support & (extra - 1)).count("1")
    return facet_sign * (-1 if position % 2 else 1)


@dataclass(frozen=True)
class ComplexKn:
    """K_n with its coherent orientation."""

    n: int
    orientation: dict

    def facets(self) -> list[FaceId]:
        return list(self.orientation)

    def sign(self, facet: FaceId) -> int:
        return self.orientation[facet]

    def ridge_facets(self, ridge: FaceId) -> tuple[FaceId, FaceId]:
        """The two facets through an (n-2)-face: with ``a_k`` and with ``b_k``."""
        (k,) = ridge.missing(self.n)
        return ridge.with_vertex("a", k), ridge.with_vertex("b", k)

    def check_coherence(self) -> bool:
        for ridge in faces(self.n, self.n - 2):
            f1, f2 = self.ridge_facets(ridge)
            s1 = induced_sign(f1, ridge, self.orientation[f1])
            s2 = induced_sign(f2, ridge, self.orientation[f2])
            if s1 != -s2:
                return False
        return True


@lru_cache(maxsize=None)
def complex_kn(n: int) -> ComplexKn:
    orientation = {f: facet_orientation_sign(n, f.I, f.J) for f in faces(n, n - 1)}
    cx = ComplexKn(n, orientation)
    if not cx.check_coherence():
        raise AssertionError("facet orientation of K_n is not coherent")
    if cx.sign(FaceId.of(range(n), ())) != 1:
        raise AssertionError("[a_1 .. a_n] must be positively oriented")
    return cx


def shared_face(f1: FaceId, f2: FaceId) -> FaceId:
    """Largest common face (possibly empty)."""
    return FaceId(f1.i_mask & f2.i_mask, f1.j_mask & f2.j_mask)
