import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stokes_rabi.errors import ClassificationAmbiguous, InvalidInput
from stokes_rabi.polynomials import (
    QuarticCoeffs,
    RootPattern,
    classify_roots,
    lagrange_invariants,
    solve_quartic,
    vieta_coeffs,
)
from stokes_rabi.rabi_map import RabiParams, coeffs_from_params

coefficient = st.floats(-20, 20, allow_nan=False, allow_infinity=False)
quartics = st.builds(QuarticCoeffs, coefficient, coefficient, coefficient, coefficient)


def companion_roots(c: QuarticCoeffs) -> np.ndarray:
    return np.roots([1.0, *c.as_tuple()])


def product_discriminant(c: QuarticCoeffs) -> float:
    r = companion_roots(c)
    return float(np.real(np.prod([(a - b) ** 2 for a, b in itertools.combinations(r, 2)])))


def match(found, expected, tol):
    found, expected = list(found), list(expected)
    for z in expected:
        i = min(range(len(found)), key=lambda k: abs(found[k] - z))
        assert abs(found[i] - z) < tol, (found, expected)
        found.pop(i)


class TestSolveQuartic:
    def test_fourth_roots_of_unity(self):
        match(solve_quartic(QuarticCoeffs(0, 0, 0, -1)).values(), [1, -1, 1j, -1j], 1e-12)

    def test_factored_biquadratic(self):
        rs = solve_quartic(QuarticCoeffs(0, -5, 0, 4))
        match(rs.values(), [-2, -1, 1, 2], 1e-12)
        assert rs.real_count == 4
        assert rs.real_zeros() == pytest.approx([-2, -1, 1, 2], abs=1e-12)

    def test_against_companion_matrix(self):
        c = coeffs_from_params(RabiParams(0.0, 0.0, 1.0))
        match(solve_quartic(c).values(), companion_roots(c), 1e-9)

    def test_quadruple_zero(self):
        rs = solve_quartic(QuarticCoeffs(-8, 24, -32, 16))
        assert rs.multiplicities == [4]
        assert rs.distinct[0] == pytest.approx(2, abs=1e-9)

    def test_two_double_complex(self):
        # (z^2 + 1)^2
        rs = solve_quartic(QuarticCoeffs(0, 2, 0, 1))
        assert sorted(rs.multiplicities) == [2, 2]
        match(rs.distinct, [1j, -1j], 1e-9)

    def test_rejects_non_finite(self):
        with pytest.raises(InvalidInput):
            QuarticCoeffs(float("nan"), 0, 0, 0)
        with pytest.raises(InvalidInput):
            solve_quartic((0, float("inf"), 0, 0))

    @settings(max_examples=200, deadline=None)
    @given(quartics)
    def test_vieta_and_conjugate_closure(self, c):
        rs = solve_quartic(c)
        values = rs.values()
        back = vieta_coeffs(values)
        scale = c.scale()
        for got, want, w in zip(back, c.as_tuple(), (1, 2, 3, 4)):
            assert abs(got - want) <= 1e-10 * scale**w
        conj = sorted(np.conj(values), key=lambda z: (round(z.real, 9), round(z.imag, 9)))
        own = sorted(values, key=lambda z: (round(z.real, 9), round(z.imag, 9)))
        assert np.allclose(conj, own, atol=1e-9 * scale)


class TestInvariants:
    def test_biquadratic_values(self):
        inv = lagrange_invariants(QuarticCoeffs(0, -5, 0, 4))
        assert inv.D0 == pytest.approx(5184)
        assert inv.D0 == pytest.approx(product_discriminant(QuarticCoeffs(0, -5, 0, 4)))
        assert (inv.Pc, inv.Qc, inv.R0) == pytest.approx((-40, -144, 0))

    def test_zero_polynomial(self):
        assert lagrange_invariants(QuarticCoeffs(0, 0, 0, 0)).as_dict() == dict.fromkeys(
            ("D0", "Pc", "Qc", "R0", "S0"), 0.0
        )

    def test_z4_plus_1(self):
        inv = lagrange_invariants(QuarticCoeffs(0, 0, 0, 1))
        assert (inv.D0, inv.Pc, inv.Qc) == pytest.approx((256, 0, 64))

    @settings(max_examples=200, deadline=None)
    @given(quartics)
    def test_discriminant_is_root_product(self, c):
        want = product_discriminant(c)
        assert lagrange_invariants(c).D0 == pytest.approx(want, rel=1e-6, abs=1e-6 * c.scale() ** 12)


class TestClassify:
    @pytest.mark.parametrize(
        "coeffs, pattern",
        [
            ((0, -5, 0, 4), RootPattern.FourReal),
            ((0, 0, 0, 1), RootPattern.FourComplex),
            ((0, 0, 0, -1), RootPattern.TwoRealTwoComplex),
            ((0, 2, 0, 1), RootPattern.TwoDoubleComplex),
            ((0, -2, 0, 1), RootPattern.TwoDoubleReal),
            ((-8, 24, -32, 16), RootPattern.QuadrupleReal),
            ((-2, -1, 2, 0), RootPattern.FourReal),
            ((0, -1, 0, 0), RootPattern.DoubleRealPlusTwoSimpleReal),
            ((0, 1, 0, 0), RootPattern.DoubleRealPlusComplexPair),
            ((-2, 0, 2, -1), RootPattern.TripleRealPlusSimpleReal),
        ],
    )
    def test_patterns(self, coeffs, pattern):
        c = QuarticCoeffs(*coeffs)
        rc = classify_roots(lagrange_invariants(c), c)
        assert rc.pattern is pattern
        assert rc.real_count == solve_quartic(c).real_count

    def test_multiple_patterns_are_flagged(self):
        c = QuarticCoeffs(0, -2, 0, 1)
        assert classify_roots(lagrange_invariants(c), c).near_degenerate

    def test_pole_collision_flag(self):
        c = QuarticCoeffs(0, 0, 0, -1)
        rc = classify_roots(lagrange_invariants(c), c)
        assert rc.pole_collision == {-1: True, 1: True}
        assert rc.depressed

    def test_ambiguous_signs_raise(self):
        # D0 = 0 with signs that fit none of the multiple-zero rules
        from stokes_rabi.polynomials import LagrangeInvariants

        with pytest.raises(ClassificationAmbiguous) as info:
            classify_roots(LagrangeInvariants(0.0, 0.0, -1.0, 0.0, 1.0), QuarticCoeffs(0, 0, 0, 0.5))
        assert info.value.candidates

    def test_agrees_with_root_count(self):
        rng = np.random.default_rng(3)
        checked = 0
        for _ in range(2000):
            c = QuarticCoeffs(*rng.uniform(-5, 5, 4))
            inv = lagrange_invariants(c)
            if abs(inv.D0) < 1e-6 * c.scale() ** 12:
                continue
            real = int(np.sum(np.abs(companion_roots(c).imag) < 1e-9))
            assert classify_roots(inv, c).real_count == real
            checked += 1
        assert checked > 1900
