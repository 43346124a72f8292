"""Self-check engine behind the verify subcommand.

Runs a built-in matrix of systems and extensions through every closed-form
identity the package implements and reports one measured-versus-tolerance
record per check.  Records are plain dicts sorted by (check, case) so a
report is byte-stable across runs and across thread counts.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import numerics as nx
from . import pct
from .concordance import concordance_gaps
from .dsusy import dsi_chain, dsi_defect, energy_from_chain, superpotential
from .limits import FlatExtendedSystem, convergence_study, flat_enlarged_si_gap
from .model import (NLHO, NLKC, SystemSpec, energy, max_levels, potential_V,
                    wavefunction_psi)
from .rational import (ExtensionSpec, denominator_poly, extended_potential,
                       extended_spectrum, extended_superpotential,
                       extended_system, extended_wavefunction,
                       extension_dsi_gap, extension_edsi_gap, q_polynomial)
from .specfun import jacobi_eval

GROUPS = ("factorization", "dsi", "spectra", "wavefunctions", "orthogonality",
          "nodes", "pct", "extensions", "edsi", "limits", "concordance")

BASE_SYSTEMS = (
    ("ho-ball-d3-l0", SystemSpec.nlho(-1.0, 3, 0, 3.0)),
    ("ho-ball-d5-l1", SystemSpec.nlho(-0.1, 5, 1, 2.0)),
    ("ho-sphere-d3-l1", SystemSpec.nlho(1.0, 3, 1, 20.0)),
    ("ho-sphere-d2-l0", SystemSpec.nlho(0.1, 2, 0, 5.0)),
    ("kc-sphere-d3-l0", SystemSpec.nlkc(1.0, 3, 0, 20.0)),
    ("kc-sphere-d2-l1", SystemSpec.nlkc(0.1, 2, 1, 7.0)),
    ("kc-ball-d3-l0", SystemSpec.nlkc(-1.0, 3, 0, 2.0)),
    ("kc-ball-d5-l2", SystemSpec.nlkc(-0.1, 5, 2, 3.0)),
)

PCT_SYSTEMS = (
    ("pt1", SystemSpec.nlho(-1.0, 3, 0, 3.0)),
    ("pt2", SystemSpec.nlho(1.0, 3, 1, 20.0)),
    ("rm1", SystemSpec.nlkc(-1.0, 3, 0, 2.0)),
    ("eckart", SystemSpec.nlkc(1.0, 3, 0, 20.0)),
)

EXTENSIONS = (
    ("ho-I-m1", ExtensionSpec(SystemSpec.nlho(-1.0, 3, 1, 3.0), "I", 1)),
    ("ho-I-m2", ExtensionSpec(SystemSpec.nlho(-1.0, 3, 1, 3.0), "I", 2)),
    ("ho-I-m2-gen", ExtensionSpec(SystemSpec.nlho(-1.0, 3, 2, 3.0), "I", 2)),
    ("ho-II-m2", ExtensionSpec(SystemSpec.nlho(-1.0, 5, 1, 2.0), "II", 2)),
    ("ho-II-m2-gen", ExtensionSpec(SystemSpec.nlho(-1.0, 5, 1, 3.0), "II", 2)),
    ("ho-III-m2", ExtensionSpec(SystemSpec.nlho(-1.0, 5, 1, 3.0), "III", 2)),
    ("kc-I-m4", ExtensionSpec(SystemSpec.nlkc(1.0, 3, 3, 41.0), "I", 4)),
    ("kc-II-m2", ExtensionSpec(SystemSpec.nlkc(1.0, 2, 1, 46.08), "II", 2)),
    ("kc-III-m2", ExtensionSpec(SystemSpec.nlkc(1.0, 3, 2, 40.0), "III", 2)),
)

SWEEPS = (
    ("osc-I", ExtensionSpec(SystemSpec.nlho(-1e-1, 3, 0, 40.0), "I", 1),
     (-1e-1, -1e-2, -1e-3), (0.05, 3.0 / math.sqrt(40.0), 40)),
    ("osc-II", ExtensionSpec(SystemSpec.nlho(-1e-1, 3, 0, 20.0), "II", 1),
     (-1e-1, -1e-2, -1e-3),
     (0.03 / math.sqrt(20.0 / 3.0), 3.0 / math.sqrt(20.0 / 3.0), 60)),
    ("osc-III", ExtensionSpec(SystemSpec.nlho(-1e-1, 5, 1, 30.0), "III", 2),
     (-1e-1, -1e-2, -1e-3),
     (0.03 / math.sqrt(30.0 / 7.0), 3.0 / math.sqrt(30.0 / 7.0), 60)),
    ("kc-II", ExtensionSpec(SystemSpec.nlkc(1e-1, 2, 1, 60.0), "II", 2),
     (1e-1, 1e-2, 1e-3), (0.1 * 6.25 / 60.0, 30.0 * 6.25 / 60.0, 60)),
    ("kc-III", ExtensionSpec(SystemSpec.nlkc(1e-1, 5, 2, 80.0), "III", 2),
     (1e-1, 1e-2, 1e-3), (0.5 / 80.0, 150.0 / 80.0, 50)),
)

ENLARGED_SI = (
    ("kc-II-m3", FlatExtendedSystem(NLKC, 3, 1, 12.0, "II", 3), (0.3, 9.0, 60)),
    ("kc-II-m2", FlatExtendedSystem(NLKC, 2, 1, 60.0, "II", 2), (0.05, 2.0, 60)),
)


def _rec(check, case, measured, tolerance):
    measured = float(measured)
    return {"check": check, "case": case, "measured": measured,
            "tolerance": float(tolerance), "pass": bool(measured <= tolerance)}


def _probe(spec, n=60):
    hi = 0.93 / math.sqrt(-spec.lam) if spec.lam < 0 else 4.0
    return np.linspace(0.05, hi, n)


def _deforming(lam, r):
    return np.sqrt(1.0 + lam * r * r)


def _count_nodes(values):
    values = np.asarray(values, dtype=float)
    scale = np.max(np.abs(values))
    kept = values[np.abs(values) > 1e-9 * scale]
    return int(np.sum(np.sign(kept[:-1]) != np.sign(kept[1:])))


def _levels_of(ext, cap=4):
    sp = extended_spectrum(ext, cap) if ext.parent.lam < 0 else extended_spectrum(ext)
    return [entry.n_r for entry in sp]


def _ext_probe(ext):
    if ext.parent.lam < 0:
        top = 0.96 / math.sqrt(-ext.parent.lam)
        return np.linspace(0.04 / math.sqrt(-ext.parent.lam), top, 47)
    return np.linspace(0.05, 8.0, 60)


# --- per-case check implementations ------------------------------------

def _chk_factorization(name, spec):
    r = _probe(spec)
    sup = superpotential(spec)
    f = _deforming(spec.lam, r)
    lhs = sup.w(r) ** 2 - f * sup.dw(r) + sup.epsilon0
    v = potential_V(spec, r)
    measured = np.max(np.abs(lhs - v)) / max(1.0, np.max(np.abs(v)))
    return [_rec("factorization", name, measured, 1e-10)]


def _chk_dsi(name, spec):
    chain = dsi_chain(spec, 7)
    r = _probe(spec)
    drift = 0.0
    for step in range(min(2, len(chain.eps_list) - 1)):
        defect = dsi_defect(spec, r, step=step)
        scale = max(1.0, abs(chain.eps_list[step + 1]))
        drift = max(drift, np.max(np.abs(defect)) / scale)
    top = len(chain.eps_list) - 1
    levels = max_levels(spec)
    if levels is not None:
        top = min(top, levels - 1)
    worst = 0.0
    for n_r in range(0, min(top, 6) + 1):
        want = energy(spec, n_r)
        got = energy_from_chain(chain, n_r)
        worst = max(worst, abs(got - want) / max(1.0, abs(want)))
    return [_rec("dsi-constancy", name, drift, 1e-9),
            _rec("dsi-partial-sums", name, worst, 1e-12)]


def _chk_spectrum(name, spec):
    rich, _, _ = nx.richardson_levels(spec, 3, base_n=1000)
    want = np.array([energy(spec, n_r) for n_r in range(3)])
    measured = np.max(np.abs(rich - want) / np.maximum(1.0, np.abs(want)))
    return [_rec("spectrum", name, measured, 1e-6)]


def _chk_wavefunctions(name, spec):
    v_cap = None if spec.lam < 0 else nx.suggest_v_cap(spec, 3)
    op = nx.discretize_regularized(spec, n=4000, v_cap=v_cap)
    r = nx.r_of_v(spec.lam, op.nodes)
    root_f = np.sqrt(_deforming(spec.lam, r))
    worst = 0.0
    for n_r in range(3):
        phi = root_f * wavefunction_psi(spec, n_r, r)
        worst = max(worst, nx.eigenfunction_residual(op, phi, energy(spec, n_r)))
    return [_rec("wavefunction-residual", name, worst, 1e-6)]


def _chk_orthogonality(name, spec):
    levels = (0, 1, 2)
    if spec.lam < 0:
        hi = 1.0 / math.sqrt(-spec.lam)

        def pair(i, j):
            def fn(r):
                return wavefunction_psi(spec, i, r) * wavefunction_psi(spec, j, r)
            return nx.quad_integrate(fn, 0.0, hi, subst="cos").value
    else:
        v_max = nx.suggest_v_cap(spec, 3) + 8.0

        def pair(i, j):
            def fn(v):
                r = nx.r_of_v(spec.lam, v)
                f = _deforming(spec.lam, r)
                return f * wavefunction_psi(spec, i, r) * wavefunction_psi(spec, j, r)
            return nx.quad_integrate(fn, 0.0, v_max, nodes=(200, 400),
                                     subst="sq").value

    norms = {i: pair(i, i) for i in levels}
    worst = 0.0
    for pos, i in enumerate(levels):
        for j in levels[pos + 1:]:
            worst = max(worst, abs(pair(i, j)) / math.sqrt(norms[i] * norms[j]))
    return [_rec("orthogonality", name, worst, 1e-8)]


def _chk_nodes(name, spec):
    if spec.lam < 0:
        r = np.linspace(1e-3, (1.0 - 1e-3) / math.sqrt(-spec.lam), 4001)
    else:
        r = np.geomspace(1e-3, 60.0, 4001)
    worst = 0
    for n_r in range(3):
        count = _count_nodes(wavefunction_psi(spec, n_r, r))
        worst = max(worst, abs(count - n_r))
    return [_rec("node-count", name, worst, 0.0)]


def _chk_pct(name, spec):
    mapping = pct.map_system(spec)
    hi = 0.93 * spec.domain.r_max if spec.lam < 0 else 4.0
    r = np.linspace(0.05, hi, 60)
    lhs = potential_V(spec, r)
    rhs = mapping.xi ** 2 * pct.flat_potential_U(mapping.target,
                                                 mapping.u_of_r(r)) + mapping.zeta
    pot = np.max(np.abs(lhs - rhs)) / max(1.0, np.max(np.abs(lhs)))

    levels = max_levels(spec)
    count = 6 if levels is None else min(levels, 6)
    spect = 0.0
    for n_r in range(count):
        want = energy(spec, n_r)
        got = mapping.xi ** 2 * pct.flat_eps(mapping.target, n_r) + mapping.zeta
        spect = max(spect, abs(got - want) / max(1.0, abs(want)))

    r = np.linspace(0.1, 0.9 * spec.domain.r_max if spec.lam < 0 else 3.0, 50)
    root_f = np.sqrt(_deforming(spec.lam, r))
    drift = 0.0
    for n_r in range(min(count, 3)):
        phi = pct.flat_wavefunction(mapping.target, n_r, mapping.u_of_r(r))
        ratio = phi / (root_f * wavefunction_psi(spec, n_r, r))
        drift = max(drift, np.max(np.abs(ratio - ratio.mean())) / abs(ratio.mean()))

    return [_rec("pct-potential", name, pot, 1e-10),
            _rec("pct-spectrum", name, spect, 1e-10),
            _rec("pct-transport", name, drift, 1e-9)]


def _chk_ext_spectrum(name, ext):
    want = np.array([entry.E for entry in extended_spectrum(ext, 3)])
    rich, _, _ = nx.richardson_levels(ext, len(want), base_n=1000)
    measured = np.max(np.abs(rich[:len(want)] - want) / np.maximum(1.0, np.abs(want)))
    return [_rec("ext-spectrum", name, measured, 1e-6)]


def _chk_ext_residual(name, ext):
    levels = _levels_of(ext, cap=3)
    lam = ext.parent.lam
    v_cap = None if lam < 0 else nx.suggest_v_cap(ext, max(len(levels), 2))
    op = nx.discretize_regularized(ext, n=4000, v_cap=v_cap)
    r = nx.r_of_v(lam, op.nodes)
    root_f = np.sqrt(_deforming(lam, r))
    energies = {entry.n_r: entry.E for entry in extended_spectrum(ext, 3)}
    worst = 0.0
    for n_r in levels:
        phi = root_f * extended_wavefunction(ext, n_r, r)
        worst = max(worst, nx.eigenfunction_residual(op, phi, energies[n_r]))
    return [_rec("ext-residual", name, worst, 1e-6)]


def _chk_ext_ratio(name, ext):
    parent = ext.parent
    a, big_b, m = parent.a, parent.beta / abs(parent.lam), ext.m
    z = np.linspace(-0.95, 0.95, 21)
    got = q_polynomial(ext, 0).eval(z).value
    if ext.ext_type == "I":
        want = (big_b + 0.5 - m) * jacobi_eval(m, (a - 0.5, -big_b - 1.5), z).value
    else:
        want = (m - a - 0.5) * jacobi_eval(m, (-a - 1.5, big_b - 0.5), z).value
    measured = np.max(np.abs(got - want)) / max(1.0, np.max(np.abs(want)))
    return [_rec("ext-ratio", name, measured, 1e-10)]


def _chk_ext_orthogonality(name, ext):
    levels = _levels_of(ext)
    if ext.parent.kind == NLHO:
        parent = ext.parent
        a, big_b = parent.a, parent.beta / abs(parent.lam)
        poly = denominator_poly(ext)
        qs = {n_r: q_polynomial(ext, n_r) for n_r in levels}

        def pair(i, j):
            def fn(z):
                weight = ((1 - z) ** (a - 0.5) * (1 + z) ** (big_b - 0.5)
                          / poly.eval(z).value ** 2)
                return weight * qs[i].eval(z).value * qs[j].eval(z).value
            return nx.quad_integrate(fn, -1.0, 1.0, nodes=(200, 400)).value
    else:
        lam = ext.parent.lam
        v_max = nx.suggest_v_cap(ext, max(len(levels), 2)) + 8.0

        def pair(i, j):
            def fn(v):
                r = nx.r_of_v(lam, v)
                f = _deforming(lam, r)
                return (f * extended_wavefunction(ext, i, r)
                        * extended_wavefunction(ext, j, r))
            return nx.quad_integrate(fn, 0.0, v_max, nodes=(200, 400),
                                     subst="sq").value

    norms = {i: pair(i, i) for i in levels}
    worst = 0.0
    for pos, i in enumerate(levels):
        for j in levels[pos + 1:]:
            worst = max(worst, abs(pair(i, j)) / math.sqrt(norms[i] * norms[j]))
    return [_rec("ext-orthogonality", name, worst, 1e-8)]


def _chk_ext_dsi(name, ext):
    gap = extension_dsi_gap(ext, _ext_probe(ext))
    return [_rec("ext-dsi", name, np.max(np.abs(gap)), 1e-8)]


def _chk_ext_edsi(name, ext):
    gap = extension_edsi_gap(ext, _ext_probe(ext))
    return [_rec("ext-edsi", name, np.max(np.abs(gap)), 1e-8)]


def _chk_sweep(name, ext, seq, probe_args):
    report = convergence_study(ext, seq, np.linspace(*probe_args))
    shape_ok = (not report.truncated and len(report.rows) == len(seq)
                and report.monotone_potential and report.monotone_wavefunction)
    terminal = report.rows[-1]["dev_wavefunction"] if report.rows else 1.0
    return [_rec("limit-monotone", name, 0.0 if shape_ok else 1.0, 0.0),
            _rec("limit-terminal", name, terminal, 1e-4)]


def _chk_enlarged_si(name, flat, probe_args):
    gap = flat_enlarged_si_gap(flat, np.linspace(*probe_args))
    return [_rec("limit-enlarged-si", name, np.max(np.abs(gap)), 1e-8)]


def _chk_concordance():
    return [_rec("concordance", "registry", len(concordance_gaps()), 0.0)]


def _tasks_for(groups, extensions):
    tasks = []
    per_system = {"factorization": _chk_factorization, "dsi": _chk_dsi,
                  "spectra": _chk_spectrum, "wavefunctions": _chk_wavefunctions,
                  "orthogonality": _chk_orthogonality, "nodes": _chk_nodes}
    for group, fn in per_system.items():
        if group in groups:
            for name, spec in BASE_SYSTEMS:
                tasks.append(lambda fn=fn, name=name, spec=spec: fn(name, spec))
    if "pct" in groups:
        for name, spec in PCT_SYSTEMS:
            tasks.append(lambda name=name, spec=spec: _chk_pct(name, spec))
    if "extensions" in groups:
        for name, ext in extensions:
            tasks.append(lambda name=name, ext=ext: _chk_ext_spectrum(name, ext))
            tasks.append(lambda name=name, ext=ext: _chk_ext_residual(name, ext))
            tasks.append(lambda name=name, ext=ext: _chk_ext_orthogonality(name, ext))
            if ext.parent.kind == NLHO and ext.ext_type in ("I", "II") and ext.m >= 2:
                tasks.append(lambda name=name, ext=ext: _chk_ext_ratio(name, ext))
    if "edsi" in groups:
        for name, ext in extensions:
            if ext.ext_type == "III":
                continue
            if ext.parent.kind == NLHO:
                tasks.append(lambda name=name, ext=ext: _chk_ext_dsi(name, ext))
            else:
                tasks.append(lambda name=name, ext=ext: _chk_ext_edsi(name, ext))
    if "limits" in groups:
        for name, ext, seq, probe_args in SWEEPS:
            tasks.append(lambda name=name, ext=ext, seq=seq, p=probe_args:
                         _chk_sweep(name, ext, seq, p))
        for name, flat, probe_args in ENLARGED_SI:
            tasks.append(lambda name=name, flat=flat, p=probe_args:
                         _chk_enlarged_si(name, flat, p))
    if "concordance" in groups:
        tasks.append(_chk_concordance)
    return tasks


def default_threads():
    """Worker count from CURVEDQM_THREADS, defaulting to 1."""
    raw = os.environ.get("CURVEDQM_THREADS", "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def run_checks(groups=None, user_ext=None, threads=None):
    """Run the selected check groups and return sorted records."""
    chosen = tuple(GROUPS if groups is None else groups)
    unknown = sorted(set(chosen) - set(GROUPS))
    if unknown:
        raise ValueError(f"unknown check group(s): {', '.join(unknown)}")
    extensions = EXTENSIONS if user_ext is None else (("user", user_ext),)
    tasks = _tasks_for(set(chosen), extensions)
    threads = default_threads() if threads is None else max(1, int(threads))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            chunks = list(pool.map(lambda task: task(), tasks))
    else:
        chunks = [task() for task in tasks]
    records = [record for chunk in chunks for record in chunk]
    records.sort(key=lambda record: (record["check"], record["case"]))
    return records
