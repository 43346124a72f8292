"""Deformed factorization, partner potentials, and shape-invariance chains.

The first-order operators (-/+ sqrt(f) d/dr sqrt(f) + W) factor the radial
Hamiltonian as H = A+ A- + epsilon0 with V = W^2 - f W' + epsilon0 exactly.
The partner V1 = W^2 + f W' + epsilon0 is again a potential of the same
family at shifted parameters, which iterates into a chain whose
factorization energies telescope to the closed-form spectrum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .model import NLHO, NLKC, SystemSpec


@dataclass(frozen=True)
class Superpotential:
    """Factorization data for one system: W, its r-derivative, and the
    factorization energy epsilon0 (the ground level)."""

    w: object
    dw: object
    epsilon0: float
    system: SystemSpec


@dataclass(frozen=True)
class DsiChain:
    """Parameter flow of repeated factorization.

    mu_list[i] is the system at chain depth i, eps_list[i] the energy the
    i-th factorization contributes; partial sums of eps_list give the
    spectrum of mu_list[0].  status is "ok", or "truncated" when the
    parameter flow left the admissible coupling range early.
    """

    mu_list: list = field(default_factory=list)
    eps_list: list = field(default_factory=list)
    status: str = "ok"

    @property
    def depth(self):
        return len(self.eps_list) - 1


def superpotential(spec):
    """Superpotential of the lowest factorization step."""
    a = spec.a
    lam = spec.lam
    if spec.kind == NLHO:
        beta = spec.beta

        def w(r):
            f = np.sqrt(1.0 + lam * r * r)
            return -a * f / r + beta * r / f

        def dw(r):
            f = np.sqrt(1.0 + lam * r * r)
            return a / (f * r * r) + beta / f**3

        eps0 = beta * (2 * a + 1) - lam * a * a
    else:
        Q = spec.Q

        def w(r):
            f = np.sqrt(1.0 + lam * r * r)
            return -a * f / r + Q / (2.0 * a)

        def dw(r):
            f = np.sqrt(1.0 + lam * r * r)
            return a / (f * r * r)

        eps0 = -Q * Q / (4.0 * a * a) - lam * a * a
    return Superpotential(w, dw, eps0, spec)


def factorized_potential(spec, r):
    """V rebuilt from the factorization, W^2 - f W' + epsilon0.

    Agrees with the direct potential to roundoff; kept separate so the
    two routes can be compared."""
    sp = superpotential(spec)
    r = np.asarray(r, dtype=float)
    f = np.sqrt(1.0 + spec.lam * r * r)
    out = sp.w(r) ** 2 - f * sp.dw(r) + sp.epsilon0
    return float(out) if out.ndim == 0 else out


def partner_potential(spec, r):
    """SUSY partner V1 = W^2 + f W' + epsilon0."""
    sp = superpotential(spec)
    r = np.asarray(r, dtype=float)
    f = np.sqrt(1.0 + spec.lam * r * r)
    out = sp.w(r) ** 2 + f * sp.dw(r) + sp.epsilon0
    return float(out) if out.ndim == 0 else out


def _next_spec(spec):
    """Parameter shift one factorization step down the chain."""
    if spec.kind == NLHO:
        beta_next = spec.beta - spec.lam
        if beta_next <= 0.0:
            return None
        return SystemSpec.nlho(spec.lam, spec.d, spec.l + 1, beta_next)
    return SystemSpec.nlkc(spec.lam, spec.d, spec.l + 1, spec.Q)


def dsi_chain(spec, depth):
    """Chain of depth factorization steps starting from spec.

    eps_list[0] is the ground energy of spec; eps_list[i] for i >= 1 the
    level spacing contributed by the i-th step, so that
    sum(eps_list[: n + 1]) equals the n-th level of spec."""
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    mu = [spec]
    eps = [superpotential(spec).epsilon0]
    a, lam = spec.a, spec.lam
    status = "ok"
    for i in range(1, depth + 1):
        nxt = _next_spec(mu[-1])
        if nxt is None:
            status = "truncated"
            break
        if spec.kind == NLHO:
            eps.append(4.0 * spec.beta - 4.0 * lam * (a + 2 * i - 1))
        else:
            Q = spec.Q
            eps.append(Q * Q / (4.0 * (a + i - 1) ** 2)
                       - Q * Q / (4.0 * (a + i) ** 2)
                       - lam * (2 * a + 2 * i - 1))
        mu.append(nxt)
    return DsiChain(mu, eps, status)


def energy_from_chain(chain, n_r):
    """n_r-th level of the chain's base system as a telescoping sum."""
    if n_r < 0:
        raise ValueError("n_r must be nonnegative")
    if n_r >= len(chain.eps_list):
        raise ValueError(
            f"chain holds {len(chain.eps_list) - 1} steps, level {n_r} "
            "needs a deeper chain")
    return float(math.fsum(chain.eps_list[: n_r + 1]))


def dsi_defect(spec, r, step=0):
    """Shape-invariance defect on a probe grid.

    The partner of chain member `step` minus the direct potential of
    member step + 1, minus the level spacing the step contributes:
    vanishes identically when the family is shape invariant."""
    chain = dsi_chain(spec, step + 1)
    if chain.depth < step + 1:
        raise ValueError("chain truncates before the requested step")
    r = np.asarray(r, dtype=float)
    sp0 = superpotential(chain.mu_list[step])
    sp1 = superpotential(chain.mu_list[step + 1])
    f = np.sqrt(1.0 + spec.lam * r * r)
    upper = sp0.w(r) ** 2 + f * sp0.dw(r)
    lower = sp1.w(r) ** 2 - f * sp1.dw(r)
    out = upper - lower - chain.eps_list[step + 1]
    return float(out) if out.ndim == 0 else out
