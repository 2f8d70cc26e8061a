from math import comb

import pytest
from hypothesis import given, strategies as st

from flexcross.combinatorics import (
    EMPTY_FACE,
    FaceId,
    complex_kn,
    faces,
    facet_orientation_sign,
    induced_sign,
    shared_face,
)
from flexcross.errors import InputError


def test_octahedron_counts():
    assert len(faces(3, 2)) == 8
    assert len(faces(3, 1)) == 12
    assert len(faces(3, 0)) == 6


def test_empty_face():
    assert faces(2, -1) == [EMPTY_FACE]
    assert EMPTY_FACE.dim == -1
    assert EMPTY_FACE.label() == "-"


@pytest.mark.parametrize("n", range(2, 7))
@pytest.mark.parametrize("dim", range(0, 4))
def test_face_counts(n, dim):
    if dim > n - 1:
        return
    assert len(faces(n, dim)) == comb(n, dim + 1) * 2 ** (dim + 1)


def test_base_facet_positive():
    assert facet_orientation_sign(3, {0, 1, 2}, set()) == 1


def test_partition_required():
    with pytest.raises(InputError):
        facet_orientation_sign(3, {0, 1}, {1, 2})


@pytest.mark.parametrize("n", range(2, 8))
def test_coherence(n):
    cx = complex_kn(n)
    assert cx.check_coherence()
    for ridge in faces(n, n - 2):
        f1, f2 = cx.ridge_facets(ridge)
        assert induced_sign(f1, ridge, cx.sign(f1)) == -induced_sign(f2, ridge, cx.sign(f2))


def test_quadrangle_cycle():
    # edges a1a2 -> a2b1 -> b1b2 -> b2a1 traversed head to tail
    cx = complex_kn(2)
    cycle = []
    for f in cx.facets():
        verts = f.vertices()
        if cx.sign(f) < 0:
            verts = verts[::-1]
        cycle.append(tuple(verts))
    heads = sorted(v[1] for v in cycle)
    tails = sorted(v[0] for v in cycle)
    assert heads == tails  # every vertex is entered once and left once
    # around the 4-cycle a1 a2 b1 b2 the signs alternate
    order = [FaceId.of([0, 1], []), FaceId.of([1], [0]), FaceId.of([], [0, 1]), FaceId.of([0], [1])]
    assert [cx.sign(f) for f in order] == [1, -1, 1, -1]


class TestSharedFace:
    def test_intersection(self):
        f1 = FaceId.of([0, 1], [])
        f2 = FaceId.of([0], [1])
        assert shared_face(f1, f2) == FaceId.of([0], [])

    def test_disjoint(self):
        assert shared_face(FaceId.of([0, 1, 2], []), FaceId.of([], [0, 1, 2])) == EMPTY_FACE

    @given(st.integers(0, 7), st.integers(0, 7))
    def test_idempotent(self, i, j):
        f = FaceId(i & ~j, j & ~i)
        assert shared_face(f, f) == f


def test_labels_are_one_based():
    assert FaceId.of([0], [2]).label() == "a1b3"
    assert FaceId.of([0], [2]).missing(3) == (1,)


def test_overlapping_masks_rejected():
    with pytest.raises(InputError):
        FaceId.of([0], [0])
