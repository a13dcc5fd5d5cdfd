import numpy as np
import pytest

from esdg2d import quadrature as quad
from esdg2d._jacobi import legendre_standard

from conftest import quad_monomial_integral, simpson_oracle, tri_monomial_integral


def monomial_sweep_tri(rule):
    for a in range(rule.exactness + 1):
        for b in range(rule.exactness + 1 - a):
            got = np.sum(rule.weights * rule.points[:, 0] ** a * rule.points[:, 1] ** b)
            want = tri_monomial_integral(a, b)
            assert got == pytest.approx(want, abs=1e-12, rel=1e-12), (a, b)


def monomial_sweep_quad(rule):
    for a in range(rule.exactness + 1):
        for b in range(rule.exactness + 1):
            got = np.sum(rule.weights * rule.points[:, 0] ** a * rule.points[:, 1] ** b)
            want = quad_monomial_integral(a, b)
            assert got == pytest.approx(want, abs=1e-12, rel=1e-12), (a, b)


class TestGauss1D:
    def test_midpoint(self):
        r = quad.gauss_1d(1)
        assert r.points == pytest.approx([0.0])
        assert r.weights == pytest.approx([2.0])

    def test_two_point_exactness(self):
        r = quad.gauss_1d(2)
        assert np.sum(r.weights * r.points**3) == pytest.approx(0.0, abs=1e-15)
        assert np.sum(r.weights * r.points**2) == pytest.approx(2.0 / 3.0)

    def test_five_point_vs_simpson_oracle(self):
        r = quad.gauss_1d(5)
        for p in (8, 9):
            got = np.sum(r.weights * r.points**p)
            want = simpson_oracle(lambda x: x**p, -1.0, 1.0)
            assert abs(got - want) < 1e-13

    def test_invalid(self):
        with pytest.raises(ValueError):
            quad.gauss_1d(0)

    @pytest.mark.parametrize("n", range(1, 9))
    def test_points_are_legendre_roots(self, n):
        r = quad.gauss_1d(n)
        resid = legendre_standard(r.points, n)[:, n]
        assert np.max(np.abs(resid)) < 1e-12

    @pytest.mark.parametrize("n", range(1, 9))
    def test_symmetry_and_exactness(self, n):
        r = quad.gauss_1d(n)
        assert r.points == pytest.approx(-r.points[::-1], abs=1e-14)
        assert r.exactness == 2 * n - 1
        for p in range(r.exactness + 1):
            want = 0.0 if p % 2 else 2.0 / (p + 1)
            assert np.sum(r.weights * r.points**p) == pytest.approx(want, abs=1e-13)


class TestGLL1D:
    def test_trapezoid(self):
        r = quad.gll_1d(2)
        assert r.points == pytest.approx([-1.0, 1.0])
        assert r.weights == pytest.approx([1.0, 1.0])

    def test_three_point(self):
        r = quad.gll_1d(3)
        assert r.points == pytest.approx([-1.0, 0.0, 1.0])
        assert r.weights == pytest.approx([1.0 / 3.0, 4.0 / 3.0, 1.0 / 3.0])

    def test_four_point_misses_degree_six(self):
        r = quad.gll_1d(4)
        assert r.exactness == 5
        got = np.sum(r.weights * r.points**6)
        assert abs(got - 2.0 / 7.0) > 1e-3

    def test_invalid(self):
        with pytest.raises(ValueError):
            quad.gll_1d(1)

    @pytest.mark.parametrize("n", range(2, 9))
    def test_endpoints_and_exactness(self, n):
        r = quad.gll_1d(n)
        assert r.points[0] == -1.0 and r.points[-1] == 1.0
        for p in range(r.exactness + 1):
            want = 0.0 if p % 2 else 2.0 / (p + 1)
            assert np.sum(r.weights * r.points**p) == pytest.approx(want, abs=1e-13)


class TestTriangleRule:
    def test_degree_zero_area(self):
        r = quad.triangle_volume_rule(0)
        assert np.sum(r.weights) == pytest.approx(2.0, abs=1e-13)

    def test_degree_two_monomials(self):
        # exact values from the rational oracle: the first moments are -2/3,
        # the mixed moment xy integrates to zero
        r = quad.triangle_volume_rule(2)
        x, y = r.points[:, 0], r.points[:, 1]
        assert tri_monomial_integral(1, 0) == pytest.approx(-2.0 / 3.0)
        assert np.sum(r.weights * x) == pytest.approx(-2.0 / 3.0, abs=1e-13)
        assert np.sum(r.weights * x * y) == pytest.approx(tri_monomial_integral(1, 1), abs=1e-13)

    def test_degree_twelve_sweep(self):
        monomial_sweep_tri(quad.triangle_volume_rule(12))

    @pytest.mark.parametrize("deg", range(0, 15, 2))
    def test_sweep(self, deg):
        rule = quad.triangle_volume_rule(deg)
        assert np.sum(rule.weights) == pytest.approx(2.0, abs=1e-13)
        monomial_sweep_tri(rule)

    def test_invalid(self):
        with pytest.raises(ValueError):
            quad.triangle_volume_rule(-1)

    def test_composite_preserves_exactness(self):
        base = quad.duffy_rule(2)  # exactness 3
        comp = quad.composite_triangle_rule(base, levels=2)
        assert comp.npoints == 16 * base.npoints
        assert comp.exactness == base.exactness
        monomial_sweep_tri(comp)
        # strictly limited accuracy: some degree-4 monomial must fail
        errs = []
        for a in range(5):
            b = 4 - a
            got = np.sum(comp.weights * comp.points[:, 0] ** a * comp.points[:, 1] ** b)
            errs.append(abs(got - tri_monomial_integral(a, b)))
        assert max(errs) > 1e-6


class TestTensorRule:
    def test_corners(self):
        r = quad.tensor_rule_2d(quad.gll_1d(2))
        assert sorted(map(tuple, r.points.tolist())) == [(-1, -1), (-1, 1), (1, -1), (1, 1)]
        assert r.weights == pytest.approx([1, 1, 1, 1])

    def test_odd_symmetry(self):
        r = quad.tensor_rule_2d(quad.gauss_1d(3))
        got = np.sum(r.weights * r.points[:, 0] ** 5 * r.points[:, 1] ** 5)
        assert got == pytest.approx(0.0, abs=1e-14)

    def test_separable(self):
        r = quad.tensor_rule_2d(quad.gauss_1d(2))
        got = np.sum(r.weights * r.points[:, 0] ** 2 * r.points[:, 1] ** 2)
        assert got == pytest.approx(4.0 / 9.0, abs=1e-14)

    @pytest.mark.parametrize("n", range(1, 9))
    def test_weight_sum_squares(self, n):
        r1 = quad.gauss_1d(n)
        r2 = quad.tensor_rule_2d(r1)
        assert np.sum(r2.weights) == pytest.approx(np.sum(r1.weights) ** 2, abs=1e-12)
        assert np.sum(r2.weights) == pytest.approx(4.0, abs=1e-13)
        monomial_sweep_quad(r2)


class TestFaceRule:
    def test_quad_bottom(self):
        fr = quad.face_rule("quad", 0, quad.gauss_1d(2))
        assert fr.points[:, 1] == pytest.approx([-1.0, -1.0])
        assert np.abs(fr.points[:, 0]) == pytest.approx([1 / np.sqrt(3)] * 2)
        assert fr.normals == pytest.approx(np.array([[0.0, -1.0]] * 2))

    def test_tri_hypotenuse_arc_length(self):
        fr = quad.face_rule("tri", 1, quad.gauss_1d(4))
        assert np.linalg.norm(fr.normals[0]) == pytest.approx(np.sqrt(2.0))
        assert np.sum(fr.arc_weights) == pytest.approx(2.0 * np.sqrt(2.0), abs=1e-13)

    def test_perimeters(self):
        for kind, nfaces, perim in (("quad", 4, 8.0), ("tri", 3, 4.0 + 2.0 * np.sqrt(2.0))):
            total = sum(
                np.sum(quad.face_rule(kind, f, quad.gauss_1d(3)).arc_weights)
                for f in range(nfaces)
            )
            assert total == pytest.approx(perim, abs=1e-13)

    def test_invalid_face(self):
        with pytest.raises(ValueError):
            quad.face_rule("tri", 3, quad.gauss_1d(2))
        with pytest.raises(ValueError):
            quad.face_rule("hex", 0, quad.gauss_1d(2))


def test_weights_positive_enforced():
    with pytest.raises(ValueError):
        quad.QuadratureRule(points=np.array([0.0]), weights=np.array([-1.0]), exactness=0, domain="line")
