import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stokes_rabi.errors import InfiniteCoupling, InvalidInput
from stokes_rabi.polynomials import QuarticCoeffs, lagrange_invariants, solve_quartic
from stokes_rabi.rabi_map import (
    Infeasible,
    RabiParams,
    SpecialConfig,
    SpecialMode,
    coeffs_from_params,
    cylinder_point,
    cylinder_residual,
    garnier_coeffs,
    invariants_from_params,
    mirror_params,
    params_from_coeffs,
    special_config_solve,
)

nonzero_gsq = st.floats(0.1, 10).flatmap(lambda m: st.sampled_from([m, -m]))
rabi_params = st.builds(RabiParams, st.floats(0, 16), st.floats(-6, 6), nonzero_gsq)


def sorted_zeros(c):
    return sorted(solve_quartic(c).values(), key=lambda z: (round(z.real, 7), round(z.imag, 7)))


def expanded_residual(c: QuarticCoeffs) -> float:
    # the cylinder equation multiplied out term by term
    a, X, Y, Z = c.as_tuple()
    return Y * Y + 2 * a * Y + a * a - a * a * X - a * a * Z - a * a - 0.75 * a**4


class TestCoefficients:
    def test_hand_substitution(self):
        c = coeffs_from_params(RabiParams(0.0, 0.0, 1.0))
        assert c.as_tuple() == pytest.approx((1.0, 0.75, -2.5, -0.25))

    @pytest.mark.parametrize("delta_sq, energy", [(0.3, -2.0), (5.0, 1.5), (0.0, 4.0)])
    def test_unit_coupling_gives_unit_c3(self, delta_sq, energy):
        assert coeffs_from_params(RabiParams(delta_sq, energy, 1.0)).c3 == 1.0

    def test_c0_vanishes_on_its_locus(self):
        assert coeffs_from_params(RabiParams(7 / 4, 1.0, 0.37)).c0 == pytest.approx(0.0, abs=1e-15)

    def test_zero_coupling_refused(self):
        with pytest.raises(InfiniteCoupling):
            RabiParams(1.0, 1.0, 0.0)
        with pytest.raises(InvalidInput):
            RabiParams(float("nan"), 1.0, 1.0)

    def test_from_delta_keeps_square(self):
        p = RabiParams.from_delta(-1.5, 0.2, 2.0)
        assert p.delta_sq == 2.25 and p.delta == 1.5


class TestInvariantsFromParams:
    def test_pinned_values(self):
        inv = invariants_from_params(RabiParams(0.0, 0.0, 1.0))
        assert inv.Pc == pytest.approx(3.0)
        assert inv.Qc == pytest.approx(24.0)

    @settings(max_examples=300, deadline=None)
    @given(rabi_params)
    def test_matches_coefficient_form(self, p):
        phys = invariants_from_params(p).as_dict()
        coef = lagrange_invariants(coeffs_from_params(p)).as_dict()
        c = coeffs_from_params(p)
        for name, w in (("D0", 12), ("Pc", 2), ("Qc", 4), ("R0", 3), ("S0", 4)):
            assert phys[name] == pytest.approx(coef[name], rel=1e-9, abs=1e-12 * c.scale() ** w)


class TestInverseMap:
    def test_round_trip_pinned(self):
        back = params_from_coeffs(coeffs_from_params(RabiParams(0.0, 0.0, 1.0)))
        assert (back.delta_sq, back.energy, back.g_sq) == pytest.approx((0, 0, 1), abs=1e-10)

    @settings(max_examples=300, deadline=None)
    @given(rabi_params)
    def test_round_trip(self, p):
        back = params_from_coeffs(coeffs_from_params(p))
        assert back
        assert back.delta_sq == pytest.approx(p.delta_sq, rel=1e-9, abs=1e-9)
        assert back.energy == pytest.approx(p.energy, rel=1e-9, abs=1e-9)
        assert back.g_sq == pytest.approx(p.g_sq, rel=1e-9)

    def test_c3_zero_infeasible(self):
        out = params_from_coeffs(QuarticCoeffs(0.0, 1.0, 2.0, 3.0))
        assert isinstance(out, Infeasible) and not out

    def test_off_cylinder(self):
        p = RabiParams(0.5, 0.3, 0.5)
        c = coeffs_from_params(p)
        bumped = QuarticCoeffs(c.c3, c.c2, c.c1, c.c0 + 1.0)
        assert cylinder_residual(bumped) == pytest.approx(-c.c3**2)
        out = params_from_coeffs(bumped)
        assert not out and "cylinder" in out.reason

    def test_negative_shift_infeasible(self):
        # on the cylinder but with a^2 Delta^2 < 0
        c = coeffs_from_params(RabiParams(1.0, 0.3, 0.5))
        a = c.c3
        shifted = QuarticCoeffs(a, c.c2 - 2.0 * a * a, c.c1, c.c0 + 2.0 * a * a)
        assert abs(cylinder_residual(shifted)) < 1e-9
        assert not params_from_coeffs(shifted)


class TestCylinder:
    @settings(max_examples=300, deadline=None)
    @given(rabi_params)
    def test_membership(self, p):
        c = coeffs_from_params(p)
        assert abs(cylinder_residual(c)) < 1e-10 * (1 + c.c3**4)
        point = cylinder_point(c)
        rx, rz = point.relation_residuals()
        assert abs(rx) < 1e-9 * (1 + abs(point.X)) and abs(rz) < 1e-9 * (1 + abs(point.Z))
        assert point.c == pytest.approx(c.c3**2 * p.delta_sq, abs=1e-9 * (1 + point.c))

    def test_all_zero(self):
        assert cylinder_residual(QuarticCoeffs(0, 0, 0, 0)) == 0.0

    @settings(max_examples=200, deadline=None)
    @given(st.tuples(*[st.floats(-5, 5)] * 4))
    def test_expanded_form(self, values):
        c = QuarticCoeffs(*values)
        assert cylinder_residual(c) == pytest.approx(expanded_residual(c), rel=1e-10, abs=1e-10)


class TestMirror:
    def test_pinned(self):
        p = mirror_params(RabiParams(0.0, 0.0, 1.0))
        assert (p.delta_sq, p.energy, p.g_sq) == (0.0, -1.0, -1.0)
        a, b = coeffs_from_params(RabiParams(0.0, 0.0, 1.0)), coeffs_from_params(p)
        assert (b.c3, b.c2, b.c1, b.c0) == pytest.approx((-a.c3, a.c2, -a.c1, a.c0))

    def test_energy_fixed_point(self):
        assert mirror_params(RabiParams(2.0, -0.5, 3.0)).energy == -0.5

    @settings(max_examples=100, deadline=None)
    @given(rabi_params)
    def test_zeros_negate(self, p):
        mine = sorted_zeros(coeffs_from_params(p))
        theirs = sorted_zeros(coeffs_from_params(mirror_params(p)))
        negated = sorted((-z for z in theirs), key=lambda z: (round(z.real, 7), round(z.imag, 7)))
        assert np.allclose(mine, negated, atol=1e-9 * (1 + max(abs(z) for z in mine)))
        twice = mirror_params(mirror_params(p))
        assert np.allclose(sorted_zeros(coeffs_from_params(twice)), mine, atol=1e-9)


class TestGarnier:
    def test_pinned(self):
        m = garnier_coeffs(RabiParams(0.0, 0.0, 1.0))
        assert m.t == -4.0 and m.a3 == 10.0 and m.theta == 1.0
        assert m.rescaling_error < 1e-9

    @settings(max_examples=50, deadline=None)
    @given(rabi_params)
    def test_rescaling_identity(self, p):
        assert garnier_coeffs(p).rescaling_error < 1e-9


def zeros_of(sol):
    return solve_quartic(coeffs_from_params(sol.params)).values()


class TestSpecialConfigs:
    def test_vertical_line(self):
        sol = special_config_solve(SpecialConfig(SpecialMode.VerticalLine, alpha=1.0, beta1=3.0))
        assert sol.geometry["beta2"] == pytest.approx(1.0)
        p = sol.params
        assert (p.g_sq, p.energy, p.delta_sq) == pytest.approx((-0.25, 1.5, 2.25))
        for z in zeros_of(sol):
            assert z.real == pytest.approx(1.0, abs=1e-8)
        assert sol.geometry["beta2"] != 3.0

    def test_circle(self):
        sol = special_config_solve(SpecialConfig(SpecialMode.CircleCentered, r=1.0, theta1=0.0))
        assert sol.geometry["theta2"] == pytest.approx(math.pi - math.acos(1 / 3))
        assert sol.geometry["theta2"] == pytest.approx(1.910633, abs=1e-6)
        p = sol.params
        assert (1 / p.g_sq, p.energy, p.delta_sq) == pytest.approx((-4 / 3, 7 / 4, 4.0))

    def test_circle_needs_nonzero_cosine(self):
        assert not special_config_solve(SpecialConfig(SpecialMode.CircleCentered, r=1.0, theta1=math.pi / 2))

    def test_symmetric_pair(self):
        sol = special_config_solve(SpecialConfig(SpecialMode.SymRealPairComplexPair, alpha=1.2, delta=1.0))
        p = sol.params
        assert sol.geometry["beta_sq"] == pytest.approx(4.37818, abs=1e-5)
        assert (1 / p.g_sq, p.energy, p.delta_sq) == pytest.approx((-2.0, -0.22, 1.51455), abs=1e-5)
        zs = sorted(zeros_of(sol), key=lambda z: (z.imag, z.real))
        want = sorted(sol.zeros, key=lambda z: (z.imag, z.real))
        assert np.allclose(zs, want, atol=1e-8)

    def test_symmetric_quadruple_round_trip(self):
        sol = special_config_solve(SpecialConfig(SpecialMode.SymRealQuadruple, alpha=0.5, delta=0.3))
        assert sol
        assert np.allclose(sorted(z.real for z in zeros_of(sol)), sorted(z.real for z in sol.zeros), atol=1e-8)

    def test_symmetric_pair_condition_violated(self):
        out = special_config_solve(SpecialConfig(SpecialMode.SymRealPairComplexPair, alpha=1.2, delta=0.1))
        assert not out and "(a)" in out.reason

    @pytest.mark.parametrize("alpha, beta", [(0.5, 1.0), (2.0, 0.3), (-1.0, 4.0)])
    def test_horizontal_lines_infeasible(self, alpha, beta):
        out = special_config_solve(SpecialConfig(SpecialMode.HorizontalLines, alpha=alpha, beta=beta))
        assert not out
        assert out.witness["delta_sq"] == pytest.approx(-((4 * alpha) ** 2) / (4 * beta * beta))
        assert out.witness["delta_sq"] < 0

    @settings(max_examples=100, deadline=None)
    @given(st.floats(1e-3, math.pi / 2 - 1e-3))
    def test_two_rays_infeasible(self, theta):
        out = special_config_solve(SpecialConfig(SpecialMode.TwoRays, theta=theta))
        t = math.cos(theta)
        assert not out
        assert out.witness["discriminant"] == pytest.approx(16 * t * t * (t * t - 1))
        assert out.witness["discriminant"] < 0
