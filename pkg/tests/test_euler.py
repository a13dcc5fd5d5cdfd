import numpy as np
import pytest

from esdg2d import euler
from esdg2d.errors import NonphysicalStateError

from conftest import random_physical_states

G = 1.4


class TestEntropyVars:
    def test_rest_state_values(self):
        u = euler.EulerState.from_primitive(1.0, 0.0, 0.0, 1.0).array
        v = euler.entropy_vars(u)
        assert v == pytest.approx([1.4, 0.0, 0.0, -0.4], abs=1e-14)

    def test_roundtrip(self, rng):
        u = random_physical_states(rng, 100)
        back = euler.cons_vars(euler.entropy_vars(u))
        assert np.max(np.abs(back - u) / np.maximum(np.abs(u), 1.0)) < 1e-11

    def test_potential_identity(self, rng):
        # v^T u - U equals (gamma-1) rho, so psi_i = (v^T u - U) u_i
        u = random_physical_states(rng, 50)
        v = euler.entropy_vars(u)
        lhs = np.einsum("...f,...f->...", v, u) - euler.entropy(u)
        assert lhs == pytest.approx((G - 1.0) * u[..., 0], rel=1e-12)

    def test_gradient_of_entropy(self, rng):
        u = random_physical_states(rng, 20)
        v = euler.entropy_vars(u)
        h = 1e-7
        for comp in range(4):
            du = np.zeros(4)
            du[comp] = h
            fd = (euler.entropy(u + du) - euler.entropy(u - du)) / (2 * h)
            assert np.max(np.abs(fd - v[..., comp]) / np.maximum(np.abs(v[..., comp]), 1.0)) < 1e-6

    def test_nonphysical_raises(self):
        u = np.array([-1.0, 0.0, 0.0, 1.0])
        with pytest.raises(NonphysicalStateError):
            euler.entropy_vars(u)
        u = np.array([1.0, 3.0, 0.0, 1.0])  # kinetic energy exceeds total
        with pytest.raises(NonphysicalStateError):
            euler.entropy_vars(u)


class TestConsVars:
    def test_inverse_of_rest_state(self):
        v = np.array([1.4, 0.0, 0.0, -0.4])
        u = euler.cons_vars(v)
        assert u == pytest.approx([1.0, 0.0, 0.0, 2.5], rel=1e-13)

    def test_isentrope_consistency(self, rng):
        # states along p = rho^gamma share s = 0; maps stay consistent there
        rho = rng.uniform(0.5, 2.0, 20)
        u = euler.EulerState.from_primitive(rho, 0.3, -0.1, rho**G).array
        v = euler.entropy_vars(u)
        s = G - v[..., 0] + 0.5 * (v[..., 1] ** 2 + v[..., 2] ** 2) / v[..., 3]
        assert np.max(np.abs(s)) < 1e-12
        assert np.max(np.abs(euler.cons_vars(v) - u)) < 1e-11

    def test_v4_nonnegative_raises(self):
        with pytest.raises(NonphysicalStateError):
            euler.cons_vars(np.array([1.0, 0.0, 0.0, 0.0]))
        with pytest.raises(NonphysicalStateError):
            euler.cons_vars(np.array([1.0, 0.0, 0.0, 0.1]))


class TestEntropyPotential:
    def test_zero_velocity(self):
        u = euler.EulerState.from_primitive(2.0, 0.0, 0.0, 3.0).array
        assert euler.entropy_potential(u, 0) == pytest.approx(0.0)
        assert euler.entropy_potential(u, 1) == pytest.approx(0.0)

    def test_rest_entropy_zero(self):
        u = euler.EulerState.from_primitive(1.0, 0.0, 0.0, 1.0).array
        assert euler.entropy(u) == pytest.approx(0.0, abs=1e-14)

    def test_conservation_condition(self, rng):
        uL = random_physical_states(rng, 1000)
        uR = random_physical_states(rng, 1000)
        vL, vR = euler.entropy_vars(uL), euler.entropy_vars(uR)
        fx, fy = euler.flux_ec_both(uL, uR)
        for i, f in enumerate((fx, fy)):
            lhs = np.einsum("...f,...f->...", vL - vR, f)
            rhs = euler.entropy_potential(uL, i) - euler.entropy_potential(uR, i)
            assert np.max(np.abs(lhs - rhs)) < 1e-10


class TestLogMean:
    def test_equal_arguments_exact(self):
        for a in (0.3, 1.0, 7.5):
            assert euler.log_mean(a, a) == a

    def test_closed_form(self):
        assert euler.log_mean(1.0, np.e) == pytest.approx(np.e - 1.0, rel=1e-14)

    def test_near_equal_series(self):
        got = float(euler.log_mean(1.0, 1.0 + 1e-12))
        assert abs(got - (1.0 + 5e-13)) < 1e-13

    def test_nonpositive_raises(self):
        with pytest.raises(ValueError):
            euler.log_mean(-1.0, 2.0)
        with pytest.raises(ValueError):
            euler.log_mean(1.0, 0.0)

    def test_matches_definition_away_from_switch(self, rng):
        a = rng.uniform(0.1, 5.0, 200)
        b = rng.uniform(0.1, 5.0, 200)
        got = euler.log_mean(a, b)
        want = (a - b) / (np.log(a) - np.log(b))
        assert got == pytest.approx(want, rel=1e-12)


class TestFluxEC:
    def test_consistency(self, rng):
        u = random_physical_states(rng, 200)
        fx, fy = euler.flux_ec_both(u, u)
        px, py = euler.physical_flux(u)
        assert np.max(np.abs(fx - px)) < 1e-12
        assert np.max(np.abs(fy - py)) < 1e-12

    def test_symmetry(self, rng):
        uL = random_physical_states(rng, 200)
        uR = random_physical_states(rng, 200)
        fxa, fya = euler.flux_ec_both(uL, uR)
        fxb, fyb = euler.flux_ec_both(uR, uL)
        assert np.max(np.abs(fxa - fxb)) < 1e-13
        assert np.max(np.abs(fya - fyb)) < 1e-13

    def test_directional_wrapper(self, rng):
        uL = random_physical_states(rng, 5)
        uR = random_physical_states(rng, 5)
        fx, fy = euler.flux_ec_both(uL, uR)
        assert euler.flux_ec(uL, uR, 0) == pytest.approx(fx)
        assert euler.flux_ec(uL, uR, 1) == pytest.approx(fy)


class TestDissipation:
    def test_zero_jump(self, rng):
        u = random_physical_states(rng, 10)
        n = np.tile([1.0, 0.0], (10, 1))
        assert np.max(np.abs(euler.flux_dissipation(u, u, n))) == 0.0

    def test_wavespeed_at_rest(self):
        u = euler.EulerState.from_primitive(1.0, 0.0, 0.0, 1.0).array
        lam = euler.max_wavespeed(u, np.array([0.0, 1.0]))
        assert lam == pytest.approx(np.sqrt(1.4), rel=1e-14)

    def test_entropy_variable_monotonicity(self, rng):
        # (v_L - v_R) . (u_L - u_R) >= 0 underlies the dissipation sign
        uL = random_physical_states(rng, 500)
        uR = random_physical_states(rng, 500)
        vL, vR = euler.entropy_vars(uL), euler.entropy_vars(uR)
        dots = np.einsum("...f,...f->...", vL - vR, uL - uR)
        assert np.min(dots) > -1e-12


class TestVortex:
    def test_far_field(self):
        u = euler.vortex_solution(500.0, 300.0, 0.0)
        assert u == pytest.approx([1.0, 1.0, 0.0, 1.0 / 0.4 + 0.5], rel=1e-12)

    def test_center_density(self):
        u = euler.vortex_solution(5.0, 0.0, 0.0)
        beta = 5.0
        rho_c = (1.0 - (G - 1.0) * beta**2 * np.exp(2.0) / (16.0 * G * np.pi**2)) ** (1.0 / (G - 1.0))
        assert u[0] == pytest.approx(rho_c, rel=1e-13)
        assert u[1] == pytest.approx(rho_c, rel=1e-13)  # u = 1 at the center

    def test_translation(self, rng):
        x = rng.uniform(0, 10, 40)
        y = rng.uniform(-5, 5, 40)
        a = euler.vortex_solution(x, y, 2.5)
        b = euler.vortex_solution(x - 2.5, y, 0.0)
        assert np.max(np.abs(a - b)) < 1e-14

    def test_periodic_wrap(self):
        u_wrapped = euler.vortex_solution(0.5, 0.3, 5.0, wrap=(10.0, 10.0))
        u_direct = euler.vortex_solution(10.5, 0.3, 5.0)
        assert u_wrapped == pytest.approx(u_direct, rel=1e-12)


def test_state_wrapper():
    s = euler.EulerState.from_primitive(2.0, 1.0, -1.0, 0.5)
    assert s.rho == pytest.approx(2.0)
    assert s.rhou == pytest.approx(2.0)
    assert s.rhov == pytest.approx(-2.0)
    assert s.E == pytest.approx(0.5 / 0.4 + 0.5 * 2.0 * 2.0)
    with pytest.raises(ValueError):
        euler.EulerState(np.zeros(3))
