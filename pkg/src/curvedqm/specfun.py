"""Orthogonal polynomials: Jacobi, generalized Laguerre, Romanovski.

All evaluators accept arbitrary real index parameters, including the
negative non-classical values the rational extensions need, and return
value, first and second derivative with respect to the argument.
Derivatives are propagated through the three-term recurrence itself,
not taken by finite differences.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import ComplexLeakError, DegenerateParameterError

# relative imaginary leakage allowed when a complex-index evaluation
# is required to be real
IMAG_LEAK_TOL = 1e-10


class JacobiParams(NamedTuple):
    alpha: float
    beta: float


class ComplexJacobiParams(NamedTuple):
    alpha: complex
    beta: complex


class PolyValue(NamedTuple):
    value: float
    d1: float
    d2: float


def _as_array(z):
    arr = np.asarray(z, dtype=complex) if np.iscomplexobj(z) else np.asarray(z, dtype=float)
    return arr, arr.ndim == 0


def _pack(scalar, v, d1, d2):
    if scalar:
        return PolyValue(v[()], d1[()], d2[()])
    return PolyValue(v, d1, d2)


def _binom(x, j):
    """Generalized binomial coefficient C(x, j) for real x, integer j >= 0."""
    out = 1.0
    for i in range(1, j + 1):
        out *= (x - i + 1) / i
    return out


def _jacobi_explicit(k, alpha, beta, z):
    """P_k^(alpha,beta) and derivatives from the terminating binomial sum.

    Valid for every real index pair, including the ones where the
    three-term recurrence denominator vanishes.
    """
    zm = 0.5 * (z - 1.0)
    zp = 0.5 * (z + 1.0)
    zm_pow = [np.ones_like(z)]
    zp_pow = [np.ones_like(z)]
    for _ in range(k):
        zm_pow.append(zm_pow[-1] * zm)
        zp_pow.append(zp_pow[-1] * zp)
    v = np.zeros_like(z)
    d1 = np.zeros_like(z)
    d2 = np.zeros_like(z)
    for j in range(k + 1):
        c = _binom(k + alpha, k - j) * _binom(k + beta, j)
        if c == 0.0:
            continue
        i = k - j
        v += c * zm_pow[j] * zp_pow[i]
        if j >= 1:
            d1 += c * 0.5 * j * zm_pow[j - 1] * zp_pow[i]
        if i >= 1:
            d1 += c * 0.5 * i * zm_pow[j] * zp_pow[i - 1]
        if j >= 2:
            d2 += c * 0.25 * j * (j - 1) * zm_pow[j - 2] * zp_pow[i]
        if j >= 1 and i >= 1:
            d2 += c * 0.5 * j * i * zm_pow[j - 1] * zp_pow[i - 1]
        if i >= 2:
            d2 += c * 0.25 * i * (i - 1) * zm_pow[j] * zp_pow[i - 2]
    return v, d1, d2


def _jacobi_recurrence(n, alpha, beta, z):
    """Evaluate P_n^(alpha,beta) and derivatives by forward recurrence.

    For real indices, a step whose recurrence denominator is exactly zero
    (alpha+beta a small negative integer; the polynomial itself is still
    well defined) is bridged with the explicit binomial sum and the
    recurrence then continues.  Complex index pairs fail loudly instead:
    the in-scope conjugate pairs never hit a zero denominator.
    """
    zero = np.zeros_like(z)
    p_prev, dp_prev, ddp_prev = np.ones_like(z), zero.copy(), zero.copy()
    if n == 0:
        return p_prev, dp_prev, ddp_prev
    s = alpha + beta
    p = 0.5 * (s + 2.0) * z + 0.5 * (alpha - beta)
    dp = np.full_like(z, 0.5 * (s + 2.0))
    ddp = zero.copy()
    for k in range(2, n + 1):
        c1 = 2.0 * k * (k + s) * (2.0 * k + s - 2.0)
        if c1 == 0:
            if np.iscomplexobj(z):
                raise DegenerateParameterError(
                    f"jacobi recurrence denominator zero at degree {k} "
                    f"for alpha={alpha}, beta={beta}"
                )
            p_new, dp_new, ddp_new = _jacobi_explicit(k, alpha, beta, z)
        else:
            c2 = (2.0 * k + s - 1.0) * (2.0 * k + s) * (2.0 * k + s - 2.0)
            c3 = (2.0 * k + s - 1.0) * (alpha * alpha - beta * beta)
            c4 = 2.0 * (k + alpha - 1.0) * (k + beta - 1.0) * (2.0 * k + s)
            a_lin, b_const, c_prev = c2 / c1, c3 / c1, c4 / c1
            p_new = (a_lin * z + b_const) * p - c_prev * p_prev
            dp_new = a_lin * p + (a_lin * z + b_const) * dp - c_prev * dp_prev
            ddp_new = 2.0 * a_lin * dp + (a_lin * z + b_const) * ddp - c_prev * ddp_prev
        p_prev, dp_prev, ddp_prev = p, dp, ddp
        p, dp, ddp = p_new, dp_new, ddp_new
    return p, dp, ddp


def jacobi_eval(n, params, z) -> PolyValue:
    """P_n^(alpha,beta)(z) with d/dz and d2/dz2 for arbitrary real indices."""
    if n < 0 or n != int(n):
        raise ValueError(f"degree must be a nonnegative integer, got {n}")
    alpha, beta = params
    arr, scalar = _as_array(z)
    v, d1, d2 = _jacobi_recurrence(int(n), float(alpha), float(beta), arr)
    return _pack(scalar, v, d1, d2)


def laguerre_eval(n, alpha, t) -> PolyValue:
    """L_n^(alpha)(t) with d/dt and d2/dt2 for arbitrary real alpha."""
    if n < 0 or n != int(n):
        raise ValueError(f"degree must be a nonnegative integer, got {n}")
    n = int(n)
    arr, scalar = _as_array(t)
    zero = np.zeros_like(arr)
    p_prev, dp_prev, ddp_prev = np.ones_like(arr), zero.copy(), zero.copy()
    if n == 0:
        return _pack(scalar, p_prev, dp_prev, ddp_prev)
    p = 1.0 + alpha - arr
    dp = np.full_like(arr, -1.0)
    ddp = zero.copy()
    for k in range(2, n + 1):
        b = (2.0 * k - 1.0 + alpha - arr) / k
        c = (k - 1.0 + alpha) / k
        p_new = b * p - c * p_prev
        dp_new = b * dp - p / k - c * dp_prev
        ddp_new = b * ddp - 2.0 * dp / k - c * ddp_prev
        p_prev, dp_prev, ddp_prev = p, dp, ddp
        p, dp, ddp = p_new, dp_new, ddp_new
    return _pack(scalar, p, dp, ddp)


def _romanovski_from_complex_jacobi(n, alpha, beta, x) -> PolyValue:
    """i^(-n) P_n^(alpha,beta)(ix), which must come out real."""
    arr, scalar = _as_array(x)
    v, d1, d2 = _jacobi_recurrence(int(n), complex(alpha), complex(beta), 1j * arr.astype(complex))
    phase = (-1j) ** (n % 4)
    rv = phase * v
    rd1 = phase * 1j * d1
    rd2 = phase * (1j * 1j) * d2
    for w in (rv, rd1, rd2):
        scale = max(np.max(np.abs(w)), 1.0)
        leak = np.max(np.abs(w.imag))
        if leak > IMAG_LEAK_TOL * scale:
            raise ComplexLeakError(
                f"imaginary residue {leak:.3e} exceeds {IMAG_LEAK_TOL:.1e} x scale "
                f"{scale:.3e} for degree {n}, alpha={alpha}, beta={beta}"
            )
    return _pack(scalar, rv.real, rd1.real, rd2.real)


def romanovski_eval(n, p1, p2, x) -> PolyValue:
    """R_n^(p1,p2)(x): real-index form of the complex-index Jacobi polynomial.

    Normalization is pinned to the complex-Jacobi route: R_n(x) = i^(-n)
    P_n^(c+id, c-id)(ix) with c = p2 - 1 and d = p1/2, whose leading
    coefficient is real.
    """
    if n < 0 or n != int(n):
        raise ValueError(f"degree must be a nonnegative integer, got {n}")
    c = p2 - 1.0
    d = 0.5 * p1
    return _romanovski_from_complex_jacobi(int(n), complex(c, d), complex(c, -d), x)
