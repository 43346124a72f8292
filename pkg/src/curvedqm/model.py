"""Curved-space oscillator (NLHO) and Kepler-Coulomb (NLKC) systems.

Defines the deforming function f(r) = sqrt(1 + lam*r^2), the two radial
potentials, their closed-form bound-state spectra and unnormalized
wavefunctions, in units hbar = 1, 2m = 1.  Energies use the deformed
convention E; the original convention is E_script = E + lam*(d-1)^2/4.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import AdmissibilityError, DomainError
from .specfun import jacobi_eval, laguerre_eval, romanovski_eval

NLHO = "nlho"
NLKC = "nlkc"


@dataclass(frozen=True)
class SystemSpec:
    """Parameter set: kind, curvature lam, dimension d, angular momentum l,
    and the coupling (oscillator strength beta or Coulomb strength Q)."""

    kind: str
    lam: float
    d: int
    l: int
    coupling: float

    def __post_init__(self):
        if self.kind not in (NLHO, NLKC):
            raise ValueError(f"kind must be {NLHO!r} or {NLKC!r}, got {self.kind!r}")
        if not (isinstance(self.d, (int, np.integer)) and self.d >= 2):
            raise ValueError(f"dimension must be an integer >= 2, got {self.d}")
        if not (isinstance(self.l, (int, np.integer)) and self.l >= 0):
            raise ValueError(f"angular momentum must be an integer >= 0, got {self.l}")
        if not math.isfinite(self.lam):
            raise ValueError("curvature parameter must be finite")
        if not (math.isfinite(self.coupling) and self.coupling > 0):
            raise ValueError(f"coupling must be > 0, got {self.coupling}")

    @classmethod
    def nlho(cls, lam, d, l, beta):
        return cls(NLHO, lam, d, l, beta)

    @classmethod
    def nlkc(cls, lam, d, l, Q):
        return cls(NLKC, lam, d, l, Q)

    @property
    def a(self):
        """Effective angular parameter a = l + (d-1)/2."""
        return self.l + 0.5 * (self.d - 1)

    @property
    def beta(self):
        if self.kind != NLHO:
            raise AttributeError("beta is only defined for the oscillator")
        return self.coupling

    @property
    def Q(self):
        if self.kind != NLKC:
            raise AttributeError("Q is only defined for the Coulomb system")
        return self.coupling

    @property
    def domain(self):
        return radial_domain(self.lam)


@dataclass(frozen=True)
class RadialDomain:
    """Open radial interval (r_min, r_max)."""

    r_min: float
    r_max: float

    def contains(self, r):
        r = np.asarray(r, dtype=float)
        return bool(np.all((r > self.r_min) & (r < self.r_max)))


def radial_domain(lam):
    """(0, inf) for lam >= 0, (0, 1/sqrt(|lam|)) for lam < 0."""
    r_max = math.inf if lam >= 0 else 1.0 / math.sqrt(-lam)
    return RadialDomain(0.0, r_max)


@dataclass(frozen=True)
class SpectrumEntry:
    n_r: int
    E: float
    E_script: float
    admissible: bool = True


@dataclass(frozen=True)
class GridFunction:
    """Sampled real function on a strictly increasing node array."""

    space: str  # "r" or "u"
    nodes: np.ndarray
    values: np.ndarray
    meta: dict | None = None

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if nodes.ndim != 1 or nodes.size < 2 or nodes.shape != values.shape:
            raise ValueError("nodes and values must be 1-d arrays of equal length >= 2")
        if not np.all(np.diff(nodes) > 0):
            raise ValueError("nodes must be strictly increasing")
        if not np.all(np.isfinite(values)):
            raise ValueError("values must be finite")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "values", values)


def deforming_f(lam, r):
    """f(r) = sqrt(1 + lam*r^2)."""
    r = np.asarray(r, dtype=float)
    if not radial_domain(lam).contains(r):
        raise DomainError(f"r outside the open radial domain for lam={lam}")
    out = np.sqrt(1.0 + lam * r * r)
    return float(out) if out.ndim == 0 else out


def potential_V(spec: SystemSpec, r):
    """Radial potential: oscillator a(a-1)/r^2 + beta(beta+lam) r^2/f^2,
    Coulomb a(a-1)/r^2 - (Q/r) f."""
    r = np.asarray(r, dtype=float)
    if not spec.domain.contains(r):
        raise DomainError(f"r outside the open radial domain for lam={spec.lam}")
    a = spec.a
    f2 = 1.0 + spec.lam * r * r
    if spec.kind == NLHO:
        b = spec.beta
        out = a * (a - 1.0) / (r * r) + b * (b + spec.lam) * r * r / f2
    else:
        out = a * (a - 1.0) / (r * r) - (spec.Q / r) * np.sqrt(f2)
    return float(out) if out.ndim == 0 else out


def energy(spec: SystemSpec, n_r):
    """Closed-form bound-state energy E_{n_r} in the deformed convention."""
    a = spec.a
    if spec.kind == NLHO:
        return spec.beta * (4.0 * n_r + 2.0 * a + 1.0) - spec.lam * (2.0 * n_r + a) ** 2
    n = n_r + a
    return -spec.Q**2 / (4.0 * n * n) - spec.lam * n * n


def max_levels(spec: SystemSpec):
    """Number of admissible n_r values; None when the tower is infinite."""
    if spec.lam <= 0:
        return None
    if spec.kind == NLHO:
        bound = spec.beta / (2.0 * spec.lam) - 0.5 * spec.a
    else:
        bound = math.sqrt(spec.Q / (2.0 * math.sqrt(spec.lam))) - spec.a
    return max(math.ceil(bound) - 1, -1) + 1


def spectrum(spec: SystemSpec, count=None):
    """Admissible SpectrumEntry list, strictly increasing in E.

    For lam > 0 the tower is finite and count only truncates it; for
    lam <= 0 it is infinite and count (default 10) caps the output.
    """
    cap = max_levels(spec)
    if cap is None:
        cap = 10 if count is None else count
    elif count is not None:
        cap = min(cap, count)
    shift = 0.25 * spec.lam * (spec.d - 1.0) ** 2
    return [SpectrumEntry(n_r, energy(spec, n_r), energy(spec, n_r) + shift) for n_r in range(cap)]


def is_admissible(spec: SystemSpec, n_r):
    if n_r < 0 or n_r != int(n_r):
        return False
    cap = max_levels(spec)
    return cap is None or n_r < cap


def wavefunction_psi(spec: SystemSpec, n_r, r):
    """Unnormalized closed-form wavefunction psi_{n_r}(r) (flat measure dr)."""
    if not is_admissible(spec, n_r):
        raise AdmissibilityError(f"n_r={n_r} is not an admissible level for {spec}")
    n_r = int(n_r)
    r = np.asarray(r, dtype=float)
    if not spec.domain.contains(r):
        raise DomainError(f"r outside the open radial domain for lam={spec.lam}")
    a, lam = spec.a, spec.lam
    f = np.sqrt(1.0 + lam * r * r)
    if spec.kind == NLHO:
        b = spec.beta
        if lam == 0.0:
            out = r**a * np.exp(-0.5 * b * r * r) * laguerre_eval(n_r, a - 0.5, b * r * r).value
        else:
            expo = -b / lam - 0.5
            out = r**a * np.power(f, expo)
            out = out * jacobi_eval(n_r, (a - 0.5, expo), 1.0 + 2.0 * lam * r * r).value
    else:
        Q = spec.Q
        n = n_r + a
        if lam == 0.0:
            t = Q * r / n
            out = r**a * np.exp(-0.5 * t) * laguerre_eval(n_r, 2.0 * a - 1.0, t).value
        elif lam > 0.0:
            sl = math.sqrt(lam)
            delta = Q / (2.0 * n * sl)
            # f - sl*r underflows for large r; it equals 1/(f + sl*r)
            decay = np.power(f + sl * r, -delta)
            out = r**n / np.sqrt(f) * decay
            out = out * jacobi_eval(n_r, (-n + delta, -n - delta), f / (sl * r)).value
        else:
            xi = math.sqrt(-lam)
            theta = np.arcsin(xi * r)
            out = r**n / np.sqrt(f) * np.exp(-Q * theta / (2.0 * n * xi))
            out = out * romanovski_eval(n_r, Q / (n * xi), -n + 1.0, f / (xi * r)).value
    return float(out) if out.ndim == 0 else out


def _potential_sphere_u(spec: SystemSpec, u):
    """Coulomb lam < 0 potential on the full arc u in (0, pi).

    The r-space formula carries f = sqrt(1 - (xi r)^2) = |cos(xi v)|, which
    is only the first-half restriction: on the far half the attractive term
    changes sign, i.e. f continues as the signed cos(u).
    """
    if spec.kind != NLKC or spec.lam >= 0:
        raise ValueError("full-arc form only applies to the Coulomb system with lam < 0")
    u = np.asarray(u, dtype=float)
    if not np.all((u > 0) & (u < math.pi)):
        raise DomainError("u must lie in the open arc (0, pi)")
    xi = math.sqrt(-spec.lam)
    a = spec.a
    r = np.sin(u) / xi
    out = a * (a - 1.0) / (r * r) - (spec.Q / r) * np.cos(u)
    return float(out) if out.ndim == 0 else out


def _phi_sphere_u(spec: SystemSpec, n_r, u):
    """Coulomb lam < 0 eigenfunction in the arc variable u over the full (0, pi).

    This is sqrt(f)*psi continued past the equator u = pi/2: the factor
    (sin u)^n exp(-Q u/(2 n xi)) R_{n_r}(cot u) is real-analytic on the
    whole arc, while the r-space form only parameterizes the first half.
    """
    if spec.kind != NLKC or spec.lam >= 0:
        raise ValueError("full-arc form only applies to the Coulomb system with lam < 0")
    if not is_admissible(spec, n_r):
        raise AdmissibilityError(f"n_r={n_r} is not an admissible level for {spec}")
    u = np.asarray(u, dtype=float)
    if not np.all((u > 0) & (u < math.pi)):
        raise DomainError("u must lie in the open arc (0, pi)")
    xi = math.sqrt(-spec.lam)
    n = int(n_r) + spec.a
    out = (np.sin(u) / xi) ** n * np.exp(-spec.Q * u / (2.0 * n * xi))
    out = out * romanovski_eval(int(n_r), spec.Q / (n * xi), -n + 1.0, 1.0 / np.tan(u)).value
    return float(out) if out.ndim == 0 else out


def measure_weight(spec: SystemSpec, r, funcs="psi"):
    """Integration weight: 1 for psi-functions, f^(-1) r^(d-1) for the
    original radial R-functions."""
    r = np.asarray(r, dtype=float)
    if funcs == "psi":
        out = np.ones_like(r)
    elif funcs == "R":
        out = r ** (spec.d - 1.0) / np.sqrt(1.0 + spec.lam * r * r)
    else:
        raise ValueError(f"funcs must be 'psi' or 'R', got {funcs!r}")
    return float(out) if out.ndim == 0 else out
