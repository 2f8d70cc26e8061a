import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from flexcross import flexion, measure, samples, spaces
from flexcross.combinatorics import FaceId, faces
from flexcross.errors import DegenerateError, UnsupportedError
from flexcross.flexion import INF, Configuration, configuration
from flexcross.measure import GeneralizedVolume, sphere_volume
from flexcross.spaces import Space

from .conftest import family_for

S2, S3 = Space("spherical", 2), Space("spherical", 3)
H2, H3 = Space("hyperbolic", 2), Space("hyperbolic", 3)
E2, E3 = Space("euclidean", 2), Space("euclidean", 3)


class TestSphereVolume:
    def test_values(self):
        assert sphere_volume(0) == 2.0
        assert sphere_volume(1) == pytest.approx(2 * math.pi, rel=1e-15)
        assert sphere_volume(2) == pytest.approx(4 * math.pi, rel=1e-15)
        assert sphere_volume(3) == pytest.approx(2 * math.pi**2, rel=1e-15)

    @pytest.mark.parametrize("n", range(1, 8))
    def test_recursion(self, n):
        # sigma_{n+1} = 2 pi sigma_{n-1} / n
        assert sphere_volume(n + 1) == pytest.approx(2 * math.pi * sphere_volume(n - 1) / n, rel=1e-14)


class TestGeneralizedVolume:
    def test_reduction(self):
        v = GeneralizedVolume(7.5, 2.0)
        assert v.value == pytest.approx(1.5)

    def test_snap_near_modulus(self):
        assert GeneralizedVolume(2.0 - 1e-14, 2.0).value == 0.0

    def test_modular_distance(self):
        assert GeneralizedVolume(0.1, 2.0).distance(1.9) == pytest.approx(0.2)


class TestSimplexVolume:
    def test_octant_triangle(self):
        est = measure.simplex_volume(S2, np.eye(3))
        assert est.value == pytest.approx(math.pi / 2, abs=1e-14)
        assert est.method == measure.EXACT

    def test_right_triangle(self):
        assert measure.simplex_volume(E2, [[0, 0], [1, 0], [0, 1]]).value == pytest.approx(0.5, abs=1e-15)

    def test_orthant_tetrahedron(self):
        est = measure.simplex_volume(S3, np.eye(4))
        assert abs(est.value - math.pi**2 / 8) < max(est.abs_error, 1e-10)

    def test_orthant_quarter(self):
        # the centre of the orthant cones its four facets into congruent pieces
        v = np.full(4, 0.5)
        est = measure.simplex_volume(S3, np.vstack([np.eye(4)[:3], v]))
        assert abs(est.value - math.pi**2 / 32) < max(est.abs_error, 1e-10)

    def test_hyperbolic_triangle_deficit(self):
        # equilateral triangle with side d: cos(angle) from the hyperbolic law of cosines
        d = 1.3
        pts = [spaces.from_klein(np.tanh(d / math.sqrt(3)) * np.array([math.cos(t), math.sin(t)]))
               for t in (0, 2 * math.pi / 3, 4 * math.pi / 3)]
        side = spaces.geodesic_distance(H2, pts[0], pts[1])
        ch = math.cosh(side)
        angle = math.acos((ch * ch - ch) / (math.sinh(side) ** 2))
        assert measure.simplex_volume(H2, pts).value == pytest.approx(math.pi - 3 * angle, abs=1e-12)

    @given(st.integers(0, 2**31 - 1))
    @settings(max_examples=8)
    def test_small_curved_simplices_are_nearly_flat(self, seed):
        rng = np.random.default_rng(seed)
        pts = 0.01 * rng.standard_normal((4, 3))
        eucl = measure.simplex_volume(E3, pts).value
        if eucl < 1e-9:
            return
        hyp = measure.simplex_volume(H3, spaces.from_klein(pts)).value
        sph = measure.simplex_volume(S3, spaces.project_to_model(S3, np.hstack([np.ones((4, 1)), pts]).T.T[0]) if False else
                                     np.array([spaces.project_to_model(S3, np.r_[1.0, p]) for p in pts])).value
        assert hyp == pytest.approx(eucl, rel=5e-3)
        assert sph == pytest.approx(eucl, rel=5e-3)

    def test_degenerate(self):
        with pytest.raises(DegenerateError):
            measure.simplex_volume(S2, [[1, 0, 0], [0, 1, 0], [1 / math.sqrt(2), 1 / math.sqrt(2), 0]])


class TestFaceVolume:
    def test_vertices_have_unit_volume(self, identity_family):
        c = configuration(identity_family, 0.3)
        assert measure.face_volume(c, FaceId.of([0], [])).value == 1.0

    def test_base_facet(self, identity_family):
        c = configuration(identity_family, 0.3)
        F = FaceId.of([0, 1, 2], [])
        assert measure.face_volume(c, F).value == measure.simplex_volume(c.space, c.a).value

    @given(st.integers(0, 2**31 - 1), st.sampled_from(["spherical", "hyperbolic", "euclidean"]))
    @settings(max_examples=5)
    def test_rigid_faces(self, seed, kind):
        fam = family_for(kind, 3, seed)
        c0, c1 = configuration(fam, 0.2), configuration(fam, 3.0)
        for F in faces(3, 2):
            v0 = measure.simplex_volume(fam.space, c0.face_vertices(F)).value
            v1 = measure.simplex_volume(fam.space, c1.face_vertices(F)).value
            assert v0 == pytest.approx(v1, abs=1e-9)


def regular_octahedron(scale=1.0, sigma=1):
    n = 3
    a = scale * np.eye(n)
    return Configuration(E3, a, -a, 0.0, np.array([0.0, 0.0, 1.0]), sigma, None)


class TestWinding:
    def test_far_point(self):
        assert measure.winding_number(regular_octahedron(), [10.0, 3.0, -2.0]) == 0

    def test_centroid(self):
        assert abs(measure.winding_number(regular_octahedron(), [0.01, 0.02, -0.03])) == 1

    def test_orientation_reversal(self):
        x = [0.01, 0.02, -0.03]
        w1 = measure.winding_number(regular_octahedron(sigma=1), x)
        w2 = measure.winding_number(regular_octahedron(sigma=-1), x)
        assert w1 == -w2

    def test_spherical_same_side(self, identity_family):
        c = configuration(identity_family, 1e-3)
        m = identity_family.frame.axis
        base = -m
        x = spaces.project_to_model(c.space, -m + np.array([0, 0.01, 0.02, 0.0]))
        assert measure.winding_number(c, x, base) == 0


class TestGeneralized:
    @pytest.mark.parametrize("kind", ["euclidean", "hyperbolic"])
    def test_flat_positions_zero(self, kind):
        fam = family_for(kind, 3, 4)
        for u in (0.0, INF):
            assert measure.generalized_volume(configuration(fam, u)).value == 0.0

    def test_flat_sphere_half(self, identity_family):
        v = measure.generalized_volume(configuration(identity_family, 0.0))
        assert v.value == pytest.approx(sphere_volume(3) / 2, abs=1e-14)

    def test_monte_carlo(self, identity_family):
        c = configuration(identity_family, 0.5)
        rng = np.random.default_rng(17)
        mean, stderr = measure.monte_carlo_volume(c, 600, rng)
        v = measure.generalized_volume(c)
        assert v.distance(mean) <= 3 * stderr + 1e-9

    @pytest.mark.parametrize("seed", [0, 1])
    def test_euclidean_is_zero(self, seed):
        fam = family_for("euclidean", 3, seed)
        for u in (0.3, -2.0):
            assert abs(measure.generalized_volume(configuration(fam, u)).value) < 1e-12


class TestSchlafliAndClosedForm:
    def test_initial(self, identity_family):
        v = measure.schlafli_volume(identity_family, 0.0)
        assert v.value == pytest.approx(sphere_volume(3) / 2, abs=1e-15)

    def test_euclidean_unsupported(self):
        with pytest.raises(UnsupportedError):
            measure.schlafli_volume(family_for("euclidean", 3, 0), 0.5)

    @pytest.mark.parametrize("u", [0.3, 1.0, -4.0, INF])
    def test_hyperbolic_zero(self, u):
        fam = family_for("hyperbolic", 3, 2)
        assert abs(measure.schlafli_volume(fam, u).value) < 1e-9

    @pytest.mark.parametrize("u", [0.1, 1.0, -3.0])
    def test_all_negative_formula(self, identity_family, u):
        sig = sphere_volume(3)
        want = sig / 2 + identity_family.data.s[-1] * sig / math.pi * math.atan(4 * u)
        got = measure.schlafli_volume(identity_family, u)
        assert got.distance(want) < 1e-10
        assert measure.closed_form_volume(identity_family.data, u).distance(want) < 1e-12

    def test_all_positive_formula(self):
        d = samples.identity_data(3, lam=[1, 2, 4], s=[1, -1, 1], s_prime=[1, -1, 1])
        sig = sphere_volume(3)
        want = sig / math.pi * math.atan(0.7)
        assert measure.closed_form_volume(d, 0.7).distance(want) < 1e-14

    def test_split_pattern_at_infinity(self):
        # products (-1, +1, +1): k = 1, value (sigma/2)(s_1 + s_2)
        d = samples.identity_data(3, lam=[1, 2, 4], s=[1, 1, -1], s_prime=[-1, 1, -1])
        sig = sphere_volume(3)
        assert measure.closed_form_volume(d, INF).distance(sig / 2 * (1 + 1)) < 1e-14

    def test_non_special_pattern_zero(self):
        d = samples.identity_data(3, lam=[1, 2, 4], s=[1, 1, 1], s_prime=[1, -1, 1])
        assert measure.closed_form_volume(d, 0.8).value == 0.0
        assert measure.empty_x_indices(d) == []

    @given(st.integers(0, 2**31 - 1), st.floats(-20, 20))
    @settings(max_examples=10)
    def test_routes_agree(self, seed, u):
        fam = family_for("spherical", 3, seed)
        cf = measure.closed_form_volume(fam.data, u)
        assert cf.distance(measure.schlafli_volume(fam, u)) < 1e-8 * sphere_volume(3)


class TestRelations:
    def test_facet_sum_sphere(self, identity_family):
        # all products -1: Y+ is empty and the facets cover a great sphere
        assert measure.facet_relation_residual(identity_family, "Y+") < 1e-12

    @pytest.mark.parametrize("kind", ["euclidean", "hyperbolic", "spherical"])
    def test_facet_relation(self, kind):
        fam = family_for(kind, 3, 6)
        for which in ("Y+", "Y-"):
            assert measure.facet_relation_residual(fam, which) < 1e-9

    def test_quadrangle_counts(self):
        fam = family_for("spherical", 2, 1)
        for k in range(2):
            assert measure.codim2_relation_residual(fam, k) == 0.0

    @pytest.mark.parametrize("kind", ["euclidean", "hyperbolic"])
    def test_edge_relations(self, kind):
        fam = family_for(kind, 3, 8)
        for k in range(3):
            assert measure.codim2_relation_residual(fam, k) < 1e-9

    def test_no_equal_products_off_sphere(self):
        for kind in ("euclidean", "hyperbolic"):
            for seed in range(5):
                p = family_for(kind, 3, seed).data.products
                assert len(set(p)) == 2


class TestFlips:
    def test_involution(self, identity_data):
        twice = measure.antipode_flip(measure.antipode_flip(identity_data, ("a", 1)), ("a", 1))
        assert twice == identity_data

    def test_commute(self, identity_data):
        d1 = measure.apply_flips(identity_data, [("a", 0), ("b", 2)])
        d2 = measure.apply_flips(identity_data, [("b", 2), ("a", 0)])
        assert d1 == d2

    def test_vertex_becomes_antipodal(self, identity_data):
        f0 = flexion.build(identity_data)
        f1 = flexion.build(measure.antipode_flip(identity_data, ("b", 1)))
        c0, c1 = configuration(f0, 0.6), configuration(f1, 0.6)
        np.testing.assert_allclose(c1.b[1], -c0.b[1], atol=1e-15)
        np.testing.assert_allclose(np.delete(c1.b, 1, 0), np.delete(c0.b, 1, 0), atol=1e-15)
        np.testing.assert_allclose(c1.a, c0.a, atol=1e-15)

    def test_witness(self, identity_data):
        assert measure.modified_bellows_witness(identity_data) == [("b", 0)]
        done = measure.apply_flips(identity_data, [("b", 0)])
        assert measure.modified_bellows_witness(done) == []

    def test_witness_constancy(self, identity_data):
        fam = flexion.build(measure.apply_flips(identity_data, measure.modified_bellows_witness(identity_data)))
        v0 = measure.schlafli_volume(fam, 0.0)
        for u in np.geomspace(0.01, 100, 8):
            for sgn in (1, -1):
                assert measure.schlafli_volume(fam, sgn * u).distance(v0) < 1e-8 * sphere_volume(3)
