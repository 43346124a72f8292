"""Tests for the orthogonal-polynomial evaluators.

Oracles: mpmath.jacobi / mpmath.laguerre for spot values, a hand-derived
real three-term recurrence for Romanovski, central finite differences for
the propagated derivatives, and classical identities (endpoint value,
parameter-shift derivative, symmetry).
"""

import math

import mpmath
import numpy as np
import pytest
from numpy.polynomial.legendre import leggauss
from numpy.testing import assert_allclose

from curvedqm.errors import ComplexLeakError, DegenerateParameterError
from curvedqm.specfun import (
    JacobiParams,
    _romanovski_from_complex_jacobi,
    jacobi_eval,
    laguerre_eval,
    romanovski_eval,
)

mpmath.mp.dps = 40


def romanovski_recurrence(n, p1, p2, x):
    """Independent real-arithmetic route: three-term recurrence for R_n.

    Derived by substituting z = ix into the Jacobi recurrence for the
    conjugate index pair (c+id, c-id), c = p2-1, d = p1/2; the i powers
    cancel and leave real coefficients with a sign flip on the R_{k-2}
    term.  Returns (value, d1, d2) with derivatives propagated through
    the recurrence.
    """
    c = p2 - 1.0
    d = 0.5 * p1
    r_prev, dr_prev, ddr_prev = 1.0, 0.0, 0.0
    if n == 0:
        return r_prev, dr_prev, ddr_prev
    r, dr, ddr = (c + 1.0) * x + d, c + 1.0, 0.0
    for k in range(2, n + 1):
        den = 2.0 * k * (k + 2.0 * c) * (2.0 * k + 2.0 * c - 2.0)
        slope = (2.0 * k + 2.0 * c - 1.0) * (2.0 * k + 2.0 * c) * (2.0 * k + 2.0 * c - 2.0) / den
        const = (2.0 * k + 2.0 * c - 1.0) * 4.0 * c * d / den
        prev = 2.0 * ((k + c - 1.0) ** 2 + d * d) * (2.0 * k + 2.0 * c) / den
        r_new = (slope * x + const) * r + prev * r_prev
        dr_new = slope * r + (slope * x + const) * dr + prev * dr_prev
        ddr_new = 2.0 * slope * dr + (slope * x + const) * ddr + prev * ddr_prev
        r, r_prev = r_new, r
        dr, dr_prev = dr_new, dr
        ddr, ddr_prev = ddr_new, ddr
    return r, dr, ddr


class TestJacobi:
    def test_degree_zero_is_one(self):
        """P_0 = 1 with vanishing derivatives for any index pair."""
        v = jacobi_eval(0, JacobiParams(-3.7, 2.2), 0.7)
        assert v.value == 1.0 and v.d1 == 0.0 and v.d2 == 0.0

    def test_degree_one_closed_form(self):
        """P_1 = (alpha+beta+2)z/2 + (alpha-beta)/2."""
        v = jacobi_eval(1, (1.0, 1.0), 0.5)
        assert_allclose(v.value, 1.0, rtol=1e-15)
        rng = np.random.default_rng(1)
        for _ in range(10):
            a, b, z = rng.uniform(-4, 4, size=3)
            v = jacobi_eval(1, (a, b), z)
            assert_allclose(v.value, 0.5 * (a + b + 2) * z + 0.5 * (a - b), rtol=1e-14)
            assert v.d2 == 0.0

    def test_endpoint_value_nonclassical(self):
        """P_3^(-2.5,0.5)(1) = (alpha+1)(alpha+2)(alpha+3)/3! = 0.0625."""
        v = jacobi_eval(3, (-2.5, 0.5), 1.0)
        assert_allclose(v.value, 0.0625, rtol=1e-13)

    def test_endpoint_identity_random_indices(self):
        """P_n(1) equals binomial(n+alpha, n) for random real indices."""
        rng = np.random.default_rng(2)
        for _ in range(20):
            a, b = rng.uniform(-3, 3, size=2)
            for n in range(9):
                expect = 1.0
                for j in range(1, n + 1):
                    expect *= (a + j) / j
                v = jacobi_eval(n, (a, b), 1.0)
                assert_allclose(v.value, expect, rtol=1e-12, atol=1e-14)

    def test_degenerate_recurrence_step_is_bridged(self):
        """Index pairs with alpha+beta = -2 still evaluate (the polynomial exists)."""
        z = 0.37
        v = jacobi_eval(2, (-1.0, -1.0), z)
        assert_allclose(v.value, (z * z - 1) / 4, rtol=1e-14)
        assert_allclose(v.d1, z / 2, rtol=1e-14)
        assert_allclose(v.d2, 0.5, rtol=1e-14)
        got = jacobi_eval(5, (-2.5, 0.5), 1.7)
        want = float(mpmath.jacobi(5, -2.5, 0.5, 1.7))
        assert_allclose(got.value, want, rtol=1e-12)

    def test_against_mpmath(self):
        """Spot values match mpmath.jacobi for classical and negative indices."""
        cases = [
            (4, 0.5, 0.5, 0.3),
            (5, -2.5, 0.5, 1.7),
            (6, 1.5, -3.5, -0.4),
            (3, -0.5, -0.5, 2.0),
            (7, 2.0, 3.0, 0.9),
        ]
        for n, a, b, z in cases:
            got = jacobi_eval(n, (a, b), z).value
            want = float(mpmath.jacobi(n, a, b, z))
            assert_allclose(got, want, rtol=1e-12, atol=1e-13)

    def test_symmetry_in_sign_of_argument(self):
        """P_n^(a,b)(-z) = (-1)^n P_n^(b,a)(z)."""
        rng = np.random.default_rng(3)
        for _ in range(25):
            a, b = rng.uniform(-3, 3, size=2)
            z = rng.uniform(-2, 2)
            for n in range(7):
                lhs = jacobi_eval(n, (a, b), -z).value
                rhs = (-1.0) ** n * jacobi_eval(n, (b, a), z).value
                assert_allclose(lhs, rhs, rtol=1e-12, atol=1e-13)

    def test_derivative_parameter_shift_identity(self):
        """d/dz P_n^(a,b) = (n+a+b+1)/2 P_{n-1}^(a+1,b+1)."""
        rng = np.random.default_rng(4)
        for _ in range(15):
            a, b = rng.uniform(-2, 2, size=2)
            z = rng.uniform(-3, 3)
            for n in range(1, 7):
                d1 = jacobi_eval(n, (a, b), z).d1
                shifted = jacobi_eval(n - 1, (a + 1, b + 1), z).value
                assert_allclose(d1, 0.5 * (n + a + b + 1) * shifted, rtol=1e-11, atol=1e-12)

    def test_second_derivative_against_mpmath(self):
        """d2 matches high-precision differentiation of mpmath.jacobi."""
        cases = [(4, 0.5, 0.5, 0.3), (5, -2.5, 0.5, 1.7), (6, 1.5, -3.5, -0.4)]
        for n, a, b, z in cases:
            got = jacobi_eval(n, (a, b), z).d2
            want = float(mpmath.diff(lambda t: mpmath.jacobi(n, a, b, t), z, 2))
            assert_allclose(got, want, rtol=1e-11, atol=1e-12)

    def test_derivatives_match_finite_differences(self):
        """d1 and d2 agree with central differences at random interior points."""
        rng = np.random.default_rng(5)
        h1, h2 = 1e-5, 1e-4
        for _ in range(50):
            a, b = rng.uniform(-2.8, 2.8, size=2)
            z = rng.uniform(-0.9, 0.9)
            n = int(rng.integers(1, 8))
            v = jacobi_eval(n, (a, b), z)
            vp = jacobi_eval(n, (a, b), z + h1).value
            vm = jacobi_eval(n, (a, b), z - h1).value
            assert_allclose(v.d1, (vp - vm) / (2 * h1), rtol=1e-6, atol=1e-7)
            vp = jacobi_eval(n, (a, b), z + h2).value
            vm = jacobi_eval(n, (a, b), z - h2).value
            assert_allclose(v.d2, (vp - 2 * v.value + vm) / h2**2, rtol=1e-5, atol=1e-5)

    def test_classical_orthogonality_quadrature(self):
        """Gauss-Legendre integral of P_n P_m w over (-1,1) vanishes for n != m.

        Half-integer exponents are mapped through z = -cos(pi x) first, which
        turns the endpoint weight factors into integer powers of sin/cos so the
        200-node rule resolves them; integer pairs are also checked directly.
        """
        x, wx = leggauss(200)
        x = 0.5 * (x + 1.0)
        wx = 0.5 * wx
        nodes = -np.cos(np.pi * x)
        jac = np.pi * np.sin(np.pi * x)
        for a, b in [(0.0, 0.0), (0.5, 1.5), (2.0, 1.0), (1.5, 0.5), (3.0, 0.0)]:
            w = (1 - nodes) ** a * (1 + nodes) ** b * jac
            for n in range(4):
                pn = jacobi_eval(n, (a, b), nodes).value
                for m in range(n + 1, 5):
                    pm = jacobi_eval(m, (a, b), nodes).value
                    val = np.sum(wx * w * pn * pm)
                    assert abs(val) < 1e-10
        znodes, zweights = leggauss(200)
        for a, b in [(0.0, 0.0), (1.0, 2.0), (3.0, 1.0)]:
            w = (1 - znodes) ** a * (1 + znodes) ** b
            p1 = jacobi_eval(1, (a, b), znodes).value
            p3 = jacobi_eval(3, (a, b), znodes).value
            assert abs(np.sum(zweights * w * p1 * p3)) < 1e-10

    def test_vectorized_matches_scalar(self):
        """Array argument evaluates elementwise."""
        z = np.linspace(-0.8, 0.8, 7)
        vec = jacobi_eval(4, (0.3, -1.2), z)
        for i, zi in enumerate(z):
            s = jacobi_eval(4, (0.3, -1.2), zi)
            assert vec.value[i] == s.value and vec.d1[i] == s.d1

    def test_negative_degree_rejected(self):
        with pytest.raises(ValueError, match="degree"):
            jacobi_eval(-1, (0.0, 0.0), 0.0)


class TestLaguerre:
    def test_degree_zero_is_one(self):
        v = laguerre_eval(0, -2.0, 3.0)
        assert v.value == 1.0 and v.d1 == 0.0 and v.d2 == 0.0

    def test_degree_one(self):
        """L_1^(alpha)(t) = alpha + 1 - t."""
        assert_allclose(laguerre_eval(1, 0.5, 2.0).value, -0.5, rtol=1e-15)

    def test_degree_two_negative_alpha(self):
        """L_2^(-3)(1) = t^2/2 - (alpha+2)t + (alpha+1)(alpha+2)/2 = 2.5."""
        assert_allclose(laguerre_eval(2, -3.0, 1.0).value, 2.5, rtol=1e-14)

    def test_against_mpmath(self):
        cases = [(3, 0.5, 1.2), (5, -2.5, 0.7), (4, -4.0, 3.3), (6, 1.0, 2.0)]
        for n, a, t in cases:
            got = laguerre_eval(n, a, t).value
            want = float(mpmath.laguerre(n, a, t))
            assert_allclose(got, want, rtol=1e-12, atol=1e-13)

    def test_derivative_identity(self):
        """d/dt L_n^(a) = -L_{n-1}^(a+1), valid for arbitrary real a."""
        rng = np.random.default_rng(6)
        for _ in range(20):
            a = rng.uniform(-3, 3)
            t = rng.uniform(0.1, 6)
            n = int(rng.integers(1, 8))
            d1 = laguerre_eval(n, a, t).d1
            assert_allclose(d1, -laguerre_eval(n - 1, a + 1, t).value, rtol=1e-12, atol=1e-13)

    def test_derivatives_match_finite_differences(self):
        rng = np.random.default_rng(7)
        h1, h2 = 1e-5, 1e-4
        for _ in range(50):
            a = rng.uniform(-3, 3)
            t = rng.uniform(0.2, 5)
            n = int(rng.integers(1, 8))
            v = laguerre_eval(n, a, t)
            vp = laguerre_eval(n, a, t + h1).value
            vm = laguerre_eval(n, a, t - h1).value
            assert_allclose(v.d1, (vp - vm) / (2 * h1), rtol=1e-6, atol=1e-7)
            vp = laguerre_eval(n, a, t + h2).value
            vm = laguerre_eval(n, a, t - h2).value
            assert_allclose(v.d2, (vp - 2 * v.value + vm) / h2**2, rtol=1e-5, atol=1e-5)


class TestJacobiLaguerreLimit:
    def test_limit_relation_monotone(self):
        """P_n^(a,b)(1 - 2x/b) approaches L_n^(a)(x) as b grows."""
        for n in range(6):
            for x in np.linspace(0.5, 4.5, 5):
                devs = []
                for big in (1e2, 1e3, 1e4):
                    p = jacobi_eval(n, (0.75, big), 1 - 2 * x / big).value
                    l = laguerre_eval(n, 0.75, x).value
                    devs.append(abs(p - l))
                if n == 0:
                    assert devs == [0.0, 0.0, 0.0]
                    continue
                assert devs[0] > devs[1] > devs[2]
                assert devs[2] < 5e-2 * max(1.0, abs(laguerre_eval(n, 0.75, x).value))


class TestJacobiTransformation:
    def test_degree_inverting_identity(self):
        """P_n^(a,b)(z) = (-1)^n ((z-1)/2)^n P_n^(-2n-a-b-1, b)((z+3)/(z-1))."""
        rng = np.random.default_rng(8)
        for _ in range(20):
            a, b = rng.uniform(-2, 2, size=2)
            z = rng.uniform(1.1, 10.0)
            for n in range(7):
                try:
                    lhs = jacobi_eval(n, (a, b), z).value
                    rhs = (-1.0) ** n * ((z - 1) / 2) ** n * jacobi_eval(
                        n, (-2 * n - a - b - 1, b), (z + 3) / (z - 1)
                    ).value
                except DegenerateParameterError:
                    continue
                assert_allclose(lhs, rhs, rtol=1e-10, atol=1e-12)


class TestRomanovski:
    def test_degree_zero_is_one(self):
        v = romanovski_eval(0, -1.2, -0.5, 3.0)
        assert v.value == 1.0

    def test_degree_one_linear(self):
        """R_1 = (p2)x + p1/2 in the pinned normalization; d2 vanishes."""
        rng = np.random.default_rng(9)
        for _ in range(10):
            p1, p2 = rng.uniform(-4, 4, size=2)
            x = rng.uniform(-3, 3)
            v = romanovski_eval(1, p1, p2, x)
            assert_allclose(v.value, p2 * x + 0.5 * p1, rtol=1e-13, atol=1e-14)
            assert v.d2 == 0.0

    def test_dual_route_agreement(self):
        """Complex-Jacobi route equals the real recurrence route."""
        cases = [
            (2, -1.2, -0.5, 2.0),
            (3, 4.0, -2.0, 0.7),
            (5, -3.3, -1.55, -1.4),
            (4, 2.5, -4.0, 5.0),
            (6, 0.8, -2.25, 0.05),
        ]
        for n, p1, p2, x in cases:
            got = romanovski_eval(n, p1, p2, x)
            want = romanovski_recurrence(n, p1, p2, x)
            assert_allclose([got.value, got.d1, got.d2], list(want), rtol=1e-10, atol=1e-12)

    def test_dual_route_agreement_random(self):
        rng = np.random.default_rng(10)
        for _ in range(40):
            p1 = rng.uniform(-5, 5)
            p2 = rng.uniform(-5, -0.2)
            x = rng.uniform(-4, 4)
            n = int(rng.integers(0, 8))
            got = romanovski_eval(n, p1, p2, x)
            want = romanovski_recurrence(n, p1, p2, x)
            assert_allclose([got.value, got.d1, got.d2], list(want), rtol=1e-9, atol=1e-11)

    def test_derivatives_match_finite_differences(self):
        rng = np.random.default_rng(11)
        h1, h2 = 1e-5, 1e-4
        for _ in range(30):
            p1 = rng.uniform(-4, 4)
            p2 = rng.uniform(-4, -0.3)
            x = rng.uniform(-2, 2)
            n = int(rng.integers(1, 7))
            v = romanovski_eval(n, p1, p2, x)
            vp = romanovski_eval(n, p1, p2, x + h1).value
            vm = romanovski_eval(n, p1, p2, x - h1).value
            assert_allclose(v.d1, (vp - vm) / (2 * h1), rtol=1e-6, atol=1e-7)
            vp = romanovski_eval(n, p1, p2, x + h2).value
            vm = romanovski_eval(n, p1, p2, x - h2).value
            assert_allclose(v.d2, (vp - 2 * v.value + vm) / h2**2, rtol=2e-4, atol=1e-5)

    def test_complex_leak_detected(self):
        """Non-conjugate index pairs leave a real imaginary residue."""
        with pytest.raises(ComplexLeakError, match="imaginary residue"):
            _romanovski_from_complex_jacobi(3, complex(-2.0, 1.0), complex(-2.0, 0.5), 1.3)

    def test_degenerate_complex_pair_raises(self):
        """p2 = -1.5 puts a zero denominator at recurrence step 5."""
        with pytest.raises(DegenerateParameterError, match="degree 5"):
            romanovski_eval(5, 2.0, -1.5, 0.8)
