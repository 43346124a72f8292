"""Zero-curvature limits of the rational extensions.

As lam -> 0 the Jacobi-polynomial denominators of the curved extensions go
over into Laguerre polynomials of t = beta*r^2 (oscillator) or
t = Q*r/|m - a| (Coulomb), and every curved quantity acquires a flat
counterpart: a rational potential correction, an extended wavefunction
tower, and for the Coulomb type II case a standard-SUSY shape-invariance
relation tying (l, m) to (l+1, m+1).  A Coulomb type I extension has no
flat counterpart: its admissibility window closes as lam -> 0, so the
constructor rejects it.  convergence_study sweeps a curved extension down
a curvature sequence and tabulates how fast its potential and ground
wavefunction approach the flat ones.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import AdmissibilityError, CurvedQMError, UnsupportedExtensionError
from .model import NLHO, NLKC, SystemSpec
from .rational import (EXT_TYPES, ExtensionSpec, extended_system,
                       extended_wavefunction, v_rat)
from .specfun import PolyValue, laguerre_eval


@dataclass(frozen=True)
class FlatExtendedSystem:
    """A rational extension of the flat oscillator or Coulomb system.

    kind is "nlho" or "nlkc"; coupling is the oscillator frequency beta or
    the Coulomb strength Q.  Construction validates the admissibility
    windows of the flat family and scans the denominator for interior
    zeros.
    """

    kind: str
    d: int
    l: int
    coupling: float
    ext_type: str
    m: int

    def __post_init__(self):
        if self.kind not in (NLHO, NLKC):
            raise ValueError(f"kind must be {NLHO!r} or {NLKC!r}, got {self.kind!r}")
        if isinstance(self.d, bool) or not isinstance(self.d, (int, np.integer)):
            raise ValueError("d must be an integer >= 2")
        if self.d < 2:
            raise ValueError("d must be an integer >= 2")
        if isinstance(self.l, bool) or not isinstance(self.l, (int, np.integer)):
            raise ValueError("l must be an integer >= 0")
        if self.l < 0:
            raise ValueError("l must be an integer >= 0")
        if not self.coupling > 0:
            raise ValueError(f"coupling must be positive, got {self.coupling:g}")
        if self.ext_type not in EXT_TYPES:
            raise ValueError(f"ext_type must be one of {EXT_TYPES}, got {self.ext_type!r}")
        if isinstance(self.m, bool) or not isinstance(self.m, (int, np.integer)):
            raise ValueError("m must be an integer >= 1")
        if self.m < 1:
            raise ValueError("m must be an integer >= 1")
        m, a = self.m, self.a
        if self.kind == NLHO:
            if self.ext_type in ("II", "III") and not m < a + 0.5:
                raise AdmissibilityError(
                    f"type {self.ext_type} extension needs m < a + 1/2: "
                    f"m = {m}, a = {a:g}")
            if self.ext_type == "III" and m % 2 != 0:
                raise AdmissibilityError(f"type III extension needs m even: m = {m}")
        else:
            if self.ext_type == "I":
                raise UnsupportedExtensionError(
                    "type I Coulomb extensions have no flat-space counterpart")
            if self.ext_type == "II":
                if not a < m:
                    raise AdmissibilityError(
                        f"flat type II extension needs a < m: a = {a:g}, m = {m}")
                if not m < 2 * a + 1:
                    raise AdmissibilityError(
                        f"flat type II extension needs m < 2a + 1: m = {m}, a = {a:g}")
            else:
                if not m < a:
                    raise AdmissibilityError(
                        f"flat type III extension needs m < a: m = {m}, a = {a:g}")
                if m % 2 != 0:
                    raise AdmissibilityError(f"type III extension needs m even: m = {m}")
        _check_flat_nonvanishing(self)

    @property
    def a(self) -> float:
        return self.l + 0.5 * (self.d - 1)


def _q_sign(ext_type: str) -> float:
    """Sign of the argument the denominator Laguerre polynomial is taken at."""
    return 1.0 if ext_type == "II" else -1.0


def _q_alpha(kind: str, ext_type: str, a: float) -> float:
    if kind == NLHO:
        return a - 1.5 if ext_type == "I" else -a - 0.5
    return -2.0 * a - 1.0


def t_of_r(sys: FlatExtendedSystem, r):
    """Map the radius to the polynomial variable t of the flat extension."""
    r = np.asarray(r, dtype=float) if np.ndim(r) else r
    if sys.kind == NLHO:
        return sys.coupling * r * r
    return sys.coupling * r / abs(sys.m - sys.a)


def dt_dr(sys: FlatExtendedSystem, r):
    if sys.kind == NLHO:
        return 2.0 * sys.coupling * np.asarray(r, dtype=float)
    return sys.coupling / abs(sys.m - sys.a)


def flat_q(sys: FlatExtendedSystem, t) -> PolyValue:
    """Denominator polynomial q_m at t, with derivatives taken in t."""
    sgn = _q_sign(sys.ext_type)
    q = laguerre_eval(sys.m, _q_alpha(sys.kind, sys.ext_type, sys.a), sgn * np.asarray(t, dtype=float))
    return PolyValue(q.value, sgn * q.d1, q.d2)


def _check_flat_nonvanishing(sys: FlatExtendedSystem) -> None:
    """Reject a denominator with a zero on the physical half-line t > 0."""
    alpha = _q_alpha(sys.kind, sys.ext_type, sys.a)
    t_max = 4.0 * sys.m + 2.0 * abs(alpha) + 20.0
    t = np.concatenate([np.geomspace(1e-10, 1.0, 400), np.linspace(1.0, t_max, 4000)])
    vals = flat_q(sys, t).value
    scale = np.maximum(1.0, t) ** sys.m
    rel = np.abs(vals) / scale
    if np.any(np.diff(np.sign(vals)) != 0) or rel.min() <= 1e-12 * max(1.0, rel.max()):
        raise AdmissibilityError(
            "denominator polynomial vanishes on the physical half-line")


def gamma_flat(sys: FlatExtendedSystem) -> float:
    """Additive constant pairing the flat extension with its shifted base."""
    if sys.kind == NLKC:
        return 0.0
    return 2.0 * sys.coupling if sys.ext_type == "II" else -2.0 * sys.coupling


def flat_v_rat(sys: FlatExtendedSystem, r):
    """Rational correction of the flat extended potential (constant left out)."""
    t = t_of_r(sys, r)
    q = flat_q(sys, t)
    _guard_flat(q.value, t, sys.m)
    lq1 = q.d1 / q.value
    lq2 = q.d2 / q.value - lq1 * lq1
    if sys.kind == NLHO:
        return -4.0 * sys.coupling * (lq1 + 2.0 * t * lq2)
    return -2.0 * (sys.coupling / (sys.m - sys.a)) ** 2 * lq2


def _guard_flat(values, t, degree) -> None:
    vals = np.atleast_1d(np.abs(np.asarray(values, dtype=float)))
    scale = np.maximum(1.0, np.atleast_1d(np.abs(t))) ** degree
    rel = vals / scale
    if rel.min() <= 1e-12 * max(1.0, rel.max()):
        raise CurvedQMError(
            "denominator polynomial vanished on the evaluation points")


def flat_potential_base(sys: FlatExtendedSystem, r):
    """Unextended flat radial potential at the system's own labels."""
    r = np.asarray(r, dtype=float) if np.ndim(r) else r
    a = sys.a
    centrifugal = a * (a - 1.0) / (r * r)
    if sys.kind == NLHO:
        return centrifugal + sys.coupling ** 2 * r * r
    return centrifugal - sys.coupling / r


def flat_extended_potential(sys: FlatExtendedSystem, r):
    """Flat extended potential; the constant gamma_flat is left out."""
    return flat_potential_base(sys, r) + flat_v_rat(sys, r)


def _flat_levels_valid(sys: FlatExtendedSystem, n_r) -> None:
    if isinstance(n_r, bool) or not isinstance(n_r, (int, np.integer)):
        raise ValueError("n_r must be an integer")
    if n_r >= 0:
        return
    if sys.ext_type == "III" and n_r == -sys.m - 1:
        return
    raise AdmissibilityError(
        f"n_r = {n_r} is not a level of the flat extension")


def flat_extended_energy(sys: FlatExtendedSystem, n_r) -> float:
    """Energy of the flat extended level n_r (type III includes -m-1)."""
    _flat_levels_valid(sys, n_r)
    a = sys.a
    if sys.kind == NLHO:
        bump = 4.0 if sys.ext_type == "III" else 0.0
        return sys.coupling * (4.0 * n_r + 2.0 * a + 1.0 + bump)
    return -sys.coupling ** 2 / (4.0 * (n_r + a + 1.0) ** 2)


def flat_extended_wavefunction(sys: FlatExtendedSystem, n_r, r):
    """Radial wavefunction of the flat extension, up to normalization."""
    _flat_levels_valid(sys, n_r)
    r = np.asarray(r, dtype=float)
    a, m = sys.a, sys.m
    t = t_of_r(sys, r)
    q = flat_q(sys, t).value
    _guard_flat(q, t, m)
    if sys.kind == NLHO:
        envelope = r ** a * np.exp(-0.5 * t)
        if n_r == -m - 1:
            return envelope / q
        if sys.ext_type == "I":
            lag = laguerre_eval(n_r - 1, a - 0.5, t).value if n_r >= 1 else 0.0
            top = q * (laguerre_eval(n_r, a - 1.5, t).value + lag) \
                + laguerre_eval(m - 1, a - 0.5, -t).value * laguerre_eval(n_r, a - 1.5, t).value
        else:
            lag = t * laguerre_eval(n_r - 1, a + 1.5, t).value if n_r >= 1 else 0.0
            companion = t * laguerre_eval(m - 1, -a + 0.5, _q_sign(sys.ext_type) * t).value \
                * laguerre_eval(n_r, a + 0.5, t).value
            if sys.ext_type == "II":
                top = q * (-(a + 0.5) * laguerre_eval(n_r, a + 0.5, t).value + lag) - companion
            else:
                top = q * ((t - a - 0.5) * laguerre_eval(n_r, a + 0.5, t).value + lag) + companion
        return envelope * top / q
    n1 = n_r + a + 1.0
    envelope = r ** a * np.exp(-0.5 * sys.coupling * r / n1)
    if n_r == -m - 1:
        return envelope / q
    u = sys.coupling * r / n1
    head = (sys.coupling * r / n1) ** 2 * q \
        * (laguerre_eval(n_r - 1, 2.0 * a + 3.0, u).value if n_r >= 1 else 0.0)
    sgn = _q_sign(sys.ext_type)
    companion = laguerre_eval(m + 1, -2.0 * a - 3.0, sgn * t).value
    top = head + (m + 1.0) * (2.0 * a - m + 1.0) * companion * laguerre_eval(n_r, 2.0 * a + 1.0, u).value
    return envelope * top / q


def flat_enlarged_si_gap(sys: FlatExtendedSystem, r):
    """Defect of the standard-SUSY partnership between the flat Coulomb
    type II extension at (l, m) and the one at (l+1, m+1); identically zero
    when the partnership holds."""
    if sys.kind != NLKC or sys.ext_type != "II":
        raise UnsupportedExtensionError(
            "the flat enlarged shape invariance is established for "
            "type II Coulomb extensions only")
    r = np.asarray(r, dtype=float)
    a, m, Q = sys.a, sys.m, sys.coupling
    target = FlatExtendedSystem(NLKC, sys.d, sys.l + 1, Q, "II", m + 1)
    t = t_of_r(sys, r)
    scale = dt_dr(sys, r)
    q1 = flat_q(sys, t)
    q2 = flat_q(target, t)
    for q in (q1, q2):
        _guard_flat(q.value, t, m + 1)
    l1 = q1.d1 / q1.value
    l2 = q2.d1 / q2.value
    dw = a / (r * r) - scale ** 2 * ((q2.d2 / q2.value - l2 * l2) - (q1.d2 / q1.value - l1 * l1))
    return flat_extended_potential(sys, r) + 2.0 * dw - flat_extended_potential(target, r)


def flat_counterpart(ext: ExtensionSpec) -> FlatExtendedSystem:
    """Flat system a curved extension approaches as its curvature vanishes."""
    p = ext.parent
    return FlatExtendedSystem(p.kind, p.d, p.l, p.coupling, ext.ext_type, ext.m)


@dataclass(frozen=True)
class ConvergenceReport:
    """Tabulated approach of a curved extension to its flat counterpart.

    rows holds dicts {lam, dev_potential, dev_wavefunction}; truncated is
    set when admissibility was lost partway down the curvature sequence;
    the monotone flags state whether each deviation shrank strictly from
    row to row.
    """

    flat: FlatExtendedSystem
    rows: tuple
    truncated: bool
    monotone_potential: bool
    monotone_wavefunction: bool


def convergence_study(ext: ExtensionSpec, lambda_seq, r_probe) -> ConvergenceReport:
    """Sweep the curvature toward zero and measure the distance to flat.

    dev_potential is max over the probe radii of
    |V_rat(lam) + gamma(lam) - flat_v_rat - gamma_flat|; dev_wavefunction
    is the projective distance between the curved and flat lowest
    eigenfunctions sampled on the probe.
    """
    p = ext.parent
    seq = [float(x) for x in lambda_seq]
    if not seq:
        raise ValueError("lambda_seq must not be empty")
    want_neg = p.kind == NLHO
    for lam in seq:
        if want_neg and not lam < 0:
            raise ValueError("oscillator sequences must keep lam < 0")
        if not want_neg and not lam > 0:
            raise ValueError("Coulomb sequences must keep lam > 0")
    mags = [abs(x) for x in seq]
    if any(b >= a for a, b in zip(mags, mags[1:])):
        raise ValueError("lambda_seq must decrease strictly in magnitude")
    r = np.asarray(r_probe, dtype=float)
    if r.size == 0 or np.any(r <= 0):
        raise ValueError("r_probe must hold positive radii")
    if want_neg and not r.max() < 1.0 / math.sqrt(mags[0]):
        raise ValueError(
            "r_probe must stay inside the curved domain of the widest lam")

    flat = flat_counterpart(ext)
    level = -ext.m - 1 if ext.ext_type == "III" else 0
    base_pot = flat_v_rat(flat, r) + gamma_flat(flat)
    base_wf = flat_extended_wavefunction(flat, level, r)
    base_wf = base_wf / np.linalg.norm(base_wf)

    rows, truncated = [], False
    for lam in seq:
        try:
            make = SystemSpec.nlho if p.kind == NLHO else SystemSpec.nlkc
            cur = ExtensionSpec(make(lam, p.d, p.l, p.coupling), ext.ext_type, ext.m)
        except AdmissibilityError:
            truncated = True
            break
        dev_pot = float(np.max(np.abs(
            v_rat(cur, r) + extended_system(cur).gamma - base_pot)))
        wf = extended_wavefunction(cur, level, r)
        wf = wf / np.linalg.norm(wf)
        dev_wf = float(min(np.linalg.norm(wf - base_wf), np.linalg.norm(wf + base_wf)))
        rows.append({"lam": lam, "dev_potential": dev_pot, "dev_wavefunction": dev_wf})

    def monotone(key):
        vals = [row[key] for row in rows]
        return all(b < a for a, b in zip(vals, vals[1:]))

    return ConvergenceReport(flat=flat, rows=tuple(rows), truncated=truncated,
                             monotone_potential=monotone("dev_potential"),
                             monotone_wavefunction=monotone("dev_wavefunction"))
