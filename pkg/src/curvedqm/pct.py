"""Point canonical transformation to flat one-dimensional potentials.

The substitution u = xi * v (xi = sqrt(|lam|), v the arclength variable)
with phi proportional to sqrt(f) psi maps each curved radial problem onto
a textbook flat potential on an interval or half line:

    curved oscillator, lam < 0  ->  trigonometric Poschl-Teller ("pt1")
    curved oscillator, lam > 0  ->  hyperbolic Poschl-Teller ("pt2")
    curved Coulomb,    lam < 0  ->  trigonometric Rosen-Morse ("rm1")
    curved Coulomb,    lam > 0  ->  Eckart ("eckart")

Potentials and energies map affinely: V = xi^2 U + zeta, E = xi^2 eps +
zeta.  At lam = 0 the substitution is the identity and carries no scale,
so map_system refuses flat-space input.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import AdmissibilityError, DomainError
from .model import NLHO, NLKC
from .specfun import jacobi_eval, romanovski_eval

FAMILIES = ("pt1", "pt2", "rm1", "eckart")


@dataclass(frozen=True)
class FlatPotentialSpec:
    """One flat target potential: family key, strength parameters A and B,
    and the open u-interval it lives on (math.inf for half lines)."""

    family: str
    A: float
    B: float
    u_domain: tuple

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")


@dataclass(frozen=True)
class FlatSpectrumEntry:
    n_r: int
    eps: float


@dataclass(frozen=True)
class PctMap:
    """Complete transformation record: scale xi, shift eta (always 0 for
    these families), energy offset zeta, the coordinate maps, and the flat
    target potential."""

    xi: float
    eta: float
    zeta: float
    u_of_r: object
    r_of_u: object
    target: FlatPotentialSpec


def u_of_r(lam, r):
    """Flat coordinate u as a function of r; bijective only for lam != 0."""
    if lam == 0.0:
        raise ValueError("flat-space system: the change of variable is "
                         "degenerate at lam = 0")
    xi = math.sqrt(abs(lam))
    r = np.asarray(r, dtype=float)
    out = np.arcsin(xi * r) if lam < 0 else np.arcsinh(xi * r)
    return float(out) if out.ndim == 0 else out


def r_of_u(lam, u):
    if lam == 0.0:
        raise ValueError("flat-space system: the change of variable is "
                         "degenerate at lam = 0")
    xi = math.sqrt(abs(lam))
    u = np.asarray(u, dtype=float)
    out = (np.sin(u) if lam < 0 else np.sinh(u)) / xi
    return float(out) if out.ndim == 0 else out


def map_system(spec):
    """Transformation record for one curved system."""
    lam = spec.lam
    if lam == 0.0:
        raise ValueError("flat-space system: the change of variable is "
                         "degenerate at lam = 0")
    xi = math.sqrt(abs(lam))
    a = spec.a
    if spec.kind == NLHO:
        if lam < 0:
            B = spec.beta / abs(lam)
            target = FlatPotentialSpec("pt1", a, B, (0.0, math.pi / 2))
            zeta = -spec.beta * (spec.beta - abs(lam)) / abs(lam)
        else:
            B = spec.beta / lam
            target = FlatPotentialSpec("pt2", a, B, (0.0, math.inf))
            zeta = spec.beta * (spec.beta + lam) / lam
    else:
        if lam < 0:
            B = -spec.Q / (2.0 * xi)
            target = FlatPotentialSpec("rm1", a, B, (0.0, math.pi))
        else:
            B = spec.Q / (2.0 * xi)
            target = FlatPotentialSpec("eckart", a, B, (0.0, math.inf))
        zeta = 0.0
    return PctMap(xi, 0.0, zeta,
                  lambda r: u_of_r(lam, r), lambda u: r_of_u(lam, u), target)


def _check_u(fp, u):
    lo, hi = fp.u_domain
    u = np.asarray(u, dtype=float)
    if np.any(u <= lo) or np.any(u >= hi):
        raise DomainError(f"u outside the open interval ({lo}, {hi})")
    return u


def flat_potential_U(fp, u):
    """Flat potential value(s) at u."""
    u = _check_u(fp, u)
    A, B = fp.A, fp.B
    if fp.family == "pt1":
        out = A * (A - 1) / np.sin(u) ** 2 + B * (B - 1) / np.cos(u) ** 2
    elif fp.family == "pt2":
        out = A * (A - 1) / np.sinh(u) ** 2 - B * (B + 1) / np.cosh(u) ** 2
    elif fp.family == "rm1":
        out = A * (A - 1) / np.sin(u) ** 2 + 2.0 * B / np.tan(u)
    else:
        out = A * (A - 1) / np.sinh(u) ** 2 - 2.0 * B / np.tanh(u)
    return float(out) if out.ndim == 0 else out


def _flat_max_levels(fp):
    """Number of bound levels, or None for an infinite tower."""
    A, B = fp.A, fp.B
    if fp.family == "pt2":
        bound = 0.5 * (B - A)
    elif fp.family == "eckart":
        bound = math.sqrt(B) - A if B > 0 else 0.0
    else:
        return None
    return max(math.ceil(bound) - 1, -1) + 1


def flat_eps(fp, n_r):
    """Flat eigenvalue eps at level n_r."""
    m = _flat_max_levels(fp)
    if n_r < 0 or (m is not None and n_r >= m):
        raise AdmissibilityError(f"level {n_r} not admissible for "
                                 f"{fp.family}")
    A, B = fp.A, fp.B
    if fp.family == "pt1":
        return (A + B + 2 * n_r) ** 2
    if fp.family == "pt2":
        return -((A - B + 2 * n_r) ** 2)
    s = A + n_r
    if fp.family == "rm1":
        return s * s - B * B / (s * s)
    return -(s * s) - B * B / (s * s)


def flat_spectrum(fp, max_count=None):
    """Bound levels in order; infinite towers are cut at max_count
    (default 10), finite ones end at their admissibility bound."""
    m = _flat_max_levels(fp)
    if m is None:
        count = 10 if max_count is None else max_count
    else:
        count = m if max_count is None else min(m, max_count)
    return [FlatSpectrumEntry(n, flat_eps(fp, n)) for n in range(count)]


def flat_endpoint_exponents(fp):
    """(sig_l, kap_l, sig_r, kap_r) describing the eigenfunction's
    endpoint behavior, in the form the regularized flat discretization
    takes: u^sig e^(kap u) at the left end and the mirrored pair at the
    right (zeros meaning a plain decaying tail to truncate)."""
    A, B = fp.A, fp.B
    if fp.family == "pt1":
        return A, 0.0, B, 0.0
    if fp.family == "pt2":
        return A, 0.0, 0.0, 0.0
    if fp.family == "rm1":
        return A, B / A, A, -B / A
    return A, -B / A, 0.0, 0.0


def flat_wavefunction(fp, n_r, u):
    """Flat eigenfunction at level n_r (unnormalized)."""
    m = _flat_max_levels(fp)
    if n_r < 0 or (m is not None and n_r >= m):
        raise AdmissibilityError(f"level {n_r} not admissible for "
                                 f"{fp.family}")
    u = _check_u(fp, u)
    A, B = fp.A, fp.B
    if fp.family == "pt1":
        poly = jacobi_eval(n_r, (A - 0.5, B - 0.5), np.cos(2 * u)).value
        out = np.sin(u) ** A * np.cos(u) ** B * poly
    elif fp.family == "pt2":
        poly = jacobi_eval(n_r, (A - 0.5, -B - 0.5), np.cosh(2 * u)).value
        out = np.sinh(u) ** A * np.cosh(u) ** (-B) * poly
    elif fp.family == "rm1":
        s = A + n_r
        poly = romanovski_eval(n_r, -2.0 * B / s, -s + 1.0,
                               1.0 / np.tan(u)).value
        out = np.sin(u) ** s * np.exp(B * u / s) * poly
    else:
        s = A + n_r
        delta = B / s
        poly = jacobi_eval(n_r, (-s + delta, -s - delta),
                           1.0 / np.tanh(u)).value
        out = np.sinh(u) ** s * np.exp(-B * u / s) * poly
    out = np.asarray(out, dtype=float)
    return float(out) if out.ndim == 0 else out
