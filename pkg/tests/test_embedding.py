import math

import numpy as np
import pytest

from flexcross import embedding, flexion, measure, samples
from flexcross.errors import InputError, UnsupportedError
from flexcross.flexion import INF, Configuration, configuration
from flexcross.spaces import Space

from .conftest import family_for

E3, S2 = Space("euclidean", 3), Space("spherical", 2)


def octahedron(scale=1.0):
    a = scale * np.eye(3)
    return Configuration(E3, a, -a, 0.0, np.array([0.0, 0.0, 1.0]), 1, None)


class TestPairRelation:
    def test_opposite_facets_disjoint(self):
        rel = embedding.simplex_pair_relation(E3, np.eye(3), -np.eye(3))
        assert rel.tag == embedding.DISJOINT
        # sup-norm separation of the planes x+y+z = +-1 along the diagonal
        assert rel.margin > 0.1

    def test_shared_edge(self):
        e = np.eye(3)
        rel = embedding.simplex_pair_relation(E3, [e[0], e[1], e[2]], [e[0], e[1], -e[2]])
        assert rel.tag == embedding.SHARED_FACE

    def test_crossing_triangles(self):
        t1 = [[0, 0, 0], [2, 0, 0], [0, 2, 0]]
        t2 = [[0.5, 0.5, -1], [0.5, 0.5, 1], [3, 3, 0.2]]
        rel = embedding.simplex_pair_relation(E3, t1, t2)
        assert rel.tag == embedding.IMPROPER
        assert abs(rel.witness[2]) < 1e-9

    def test_coincident_simplices_are_shared(self):
        t = np.eye(3)
        assert embedding.simplex_pair_relation(E3, t, t).tag == embedding.SHARED_FACE

    def test_spherical_arcs(self):
        e = np.eye(3)
        cross = embedding.simplex_pair_relation(S2, [e[0], e[1]], [(e[0] + e[1] + e[2]) / math.sqrt(3), (e[0] + e[1] - e[2]) / math.sqrt(3)])
        assert cross.tag == embedding.IMPROPER
        apart = embedding.simplex_pair_relation(S2, [e[0], e[1]], [-e[0], -e[1]])
        assert apart.tag == embedding.DISJOINT

    def test_degenerate(self):
        with pytest.raises(InputError):
            embedding.simplex_pair_relation(E3, [[0, 0, 0], [1, 0, 0], [2, 0, 0]], np.eye(3))


class TestEmbedded:
    def test_regular_octahedron(self):
        assert embedding.is_embedded(octahedron()).status == embedding.EMBEDDED

    def test_small_u(self, identity_family):
        assert embedding.is_embedded(configuration(identity_family, 1e-3)).status == embedding.EMBEDDED

    def test_infinity_self_intersects(self, identity_family):
        v = embedding.is_embedded(configuration(identity_family, INF))
        assert v.status == embedding.SELF_INTERSECTING
        assert v.witness is not None and len(v.pair) == 2

    def test_flat_euclidean_position(self):
        fam = family_for("euclidean", 3, 0)
        assert embedding.is_embedded(configuration(fam, 0.0)).status == embedding.SELF_INTERSECTING


class TestDegrees:
    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_all_negative_products(self, n):
        d = samples.identity_data(n)
        assert abs(embedding.spherical_degree(configuration(flexion.build(d), 0.0))) == 1

    def test_one_positive_product(self):
        d = samples.identity_data(3, s=[-1, -1, -1], s_prime=[1, -1, 1])
        assert embedding.spherical_degree(configuration(flexion.build(d), 0.0)) == 0

    def test_all_positive_at_infinity(self):
        d = samples.identity_data(3, s=[1, 1, 1], s_prime=[1, 1, 1])
        fam = flexion.build(d)
        assert abs(embedding.spherical_degree(configuration(fam, INF))) == 1

    def test_requires_flat(self, identity_family):
        with pytest.raises(InputError):
            embedding.spherical_degree(configuration(identity_family, 0.5))

    def test_requires_sphere(self):
        with pytest.raises(UnsupportedError):
            embedding.spherical_degree(configuration(family_for("hyperbolic", 3, 0), 0.0))


class TestHemispheres:
    def test_flat_equatorial(self, identity_family):
        c = configuration(identity_family, 0.0)
        assert embedding.hemisphere_position(c, identity_family.frame.axis) == embedding.EQUATORIAL

    def test_base_family_closed(self, identity_family):
        # the base vertices stay on the equator
        m = identity_family.frame.axis
        pos = embedding.hemisphere_position(configuration(identity_family, 0.4), m)
        assert pos in (embedding.CLOSED_POS, embedding.CLOSED_NEG)

    def test_rotated_strict(self, identity_family):
        rf = embedding.rotated_family(identity_family)
        m = identity_family.frame.axis
        assert embedding.hemisphere_position(embedding.rotated_configuration(rf, 0.3), m) == embedding.STRICT_POS
        assert embedding.hemisphere_position(embedding.rotated_configuration(rf, -0.3), m) == embedding.STRICT_NEG

    def test_mixed(self):
        pts = Configuration(S2, np.array([[1.0, 0, 0], [0, 1.0, 0]]), np.array([[0, 0, 1.0], [0, 0, -1.0]]), 0.0, np.array([0, 0, 1.0]), 1)
        assert embedding.hemisphere_position(pts, [0, 0, 1]) == embedding.MIXED


class TestRotation:
    def test_rho(self, identity_family):
        assert embedding.rho(identity_family, 0.0) == pytest.approx(0.0, abs=1e-15)
        assert embedding.rho(identity_family, INF) == pytest.approx(0.0, abs=1e-15)
        assert embedding.rho(identity_family, 0.5) > 0

    def test_rotation_matrix(self):
        R = embedding.rotation_matrix(np.array([1.0, 0, 0]), np.array([0, 0, 1.0]), 0.3)
        np.testing.assert_allclose(R @ R.T, np.eye(3), atol=1e-15)
        assert np.linalg.det(R) == pytest.approx(1.0)
        np.testing.assert_allclose(R @ [0, 1.0, 0], [0, 1, 0], atol=1e-15)

    def test_flat_positions_unchanged(self, identity_family):
        rf = embedding.rotated_family(identity_family)
        for u in (0.0, INF):
            np.testing.assert_array_equal(embedding.rotated_configuration(rf, u).b, configuration(identity_family, u).b)

    @pytest.mark.parametrize("u", [0.01, 0.3, -2.0])
    def test_move_is_bounded(self, identity_family, u):
        rf = embedding.rotated_family(identity_family)
        r = embedding.rotated_configuration(rf, u).all_vertices()
        c = configuration(identity_family, u).all_vertices()
        moves = np.arccos(np.clip(np.sum(r * c, axis=1), -1, 1))
        assert np.max(moves) <= rf.rho(u) / 2 + 1e-10

    def test_pattern_required(self):
        d = samples.identity_data(3, s=[1, -1, -1], s_prime=[-1, 1, 1])
        with pytest.raises(InputError):
            embedding.rotated_family(flexion.build(d))


class TestCertificate:
    @pytest.mark.parametrize("n", [2, 3])
    def test_passes(self, n):
        rf = embedding.rotated_family(flexion.build(samples.identity_data(n)))
        cert = embedding.theorem_1_1_certificate(rf, u_grid=[0.1, 0.01, 1e-3])
        assert cert.passed, cert.failed()
        assert cert.delta > 0
        assert cert.witness is not None


def test_remark_bounds():
    b = embedding.remark_bounds(flexion.build(samples.identity_data(3)))
    assert b["bound"] == pytest.approx(math.asin(1 / math.sqrt(3)), rel=1e-15)
    assert np.all(b["a"] < b["bound"])
    assert np.all(b["b"] < b["bound"])
