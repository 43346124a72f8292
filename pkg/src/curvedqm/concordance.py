"""Formula-to-code concordance.

A generated table mapping every closed-form identity the package
implements to the operation realizing it and the test verifying it.  The
registry is code, not prose: generation fails loudly if a row's operation
does not resolve or its test does not exist, so coverage drift is caught
mechanically.
"""

from __future__ import annotations

import ast
import importlib
from pathlib import Path
from typing import NamedTuple

from .errors import CurvedQMError


class ConcordanceRow(NamedTuple):
    """One implemented formula: where it lives and where it is verified."""

    section: str
    key: str
    formula: str
    operation: str
    test: str


KIN = "curved kinematics and closed-form solutions"
FAC = "deformed factorization and shape invariance"
PCT = "transformations to constant-mass form"
SPF = "special-function toolbox"
EXT = "rational extensions"
FLO = "flat oscillator limits"
FLC = "flat Coulomb limits"

REGISTRY: tuple[ConcordanceRow, ...] = (
    # --- curved kinematics and closed-form solutions -------------------
    ConcordanceRow(
        KIN, "deforming-function",
        "f(r) = sqrt(1 + lam r^2)",
        "curvedqm.model.deforming_f",
        "tests/test_model.py::TestDomain::test_deforming_f_values"),
    ConcordanceRow(
        KIN, "radial-domain",
        "domain is the ball r < 1/sqrt(-lam) for lam < 0, the half line otherwise",
        "curvedqm.model.radial_domain",
        "tests/test_model.py::TestDomain::test_negative_lam_caps_radius"),
    ConcordanceRow(
        KIN, "deformed-hamiltonian",
        "H = -sqrt(f) (d/dr) f (d/dr) sqrt(f) + V(r)",
        "curvedqm.numerics.discretize_deformed",
        "tests/test_numerics.py::TestDiscretizeDeformed::test_curved_case_documented_accuracy"),
    ConcordanceRow(
        KIN, "effective-angular-strength",
        "a = l + (d - 1)/2",
        "curvedqm.model.SystemSpec",
        "tests/test_model.py::TestSpecValidation::test_a_parameter"),
    ConcordanceRow(
        KIN, "energy-convention-shift",
        "E = E_script - lam (d - 1)^2 / 4",
        "curvedqm.model.spectrum",
        "tests/test_model.py::TestSpectrum::test_convention_shift"),
    ConcordanceRow(
        KIN, "oscillator-potential",
        "V = a(a - 1)/r^2 + beta(beta + lam) r^2 / f^2",
        "curvedqm.model.potential_V",
        "tests/test_model.py::TestPotential::test_against_exact_rational_arithmetic"),
    ConcordanceRow(
        KIN, "oscillator-spectrum",
        "E_n = beta(4 n_r + 2a + 1) - lam(2 n_r + a)^2",
        "curvedqm.model.energy",
        "tests/test_model.py::TestSpectrum::test_oscillator_frozen_energies"),
    ConcordanceRow(
        KIN, "oscillator-wavefunction",
        "psi_n proportional to r^a times a curvature envelope times a "
        "degree-n Jacobi row in z(r)",
        "curvedqm.model.wavefunction_psi",
        "tests/test_model.py::TestWavefunctionIsEigenfunction::test_ode_residual_in_arclength_variable"),
    ConcordanceRow(
        KIN, "coulomb-potential",
        "V = a(a - 1)/r^2 - (Q/r) f",
        "curvedqm.model.potential_V",
        "tests/test_model.py::TestPotential::test_coulomb_tail_signs"),
    ConcordanceRow(
        KIN, "coulomb-spectrum",
        "E_n = -Q^2/(4 n^2) - lam n^2 with n = n_r + a",
        "curvedqm.model.energy",
        "tests/test_model.py::TestSpectrum::test_coulomb_positive_lam_frozen"),
    ConcordanceRow(
        KIN, "coulomb-wavefunction",
        "psi_n proportional to r^a times an exponential-type envelope times "
        "a polynomial row (real-output complex-index route for lam > 0)",
        "curvedqm.model.wavefunction_psi",
        "tests/test_model.py::TestWavefunctionShape::test_coulomb_node_count_frozen_case"),
    ConcordanceRow(
        KIN, "tower-termination",
        "lam > 0 towers end strictly at the admissibility bound",
        "curvedqm.model.max_levels",
        "tests/test_model.py::TestSpectrum::test_bound_is_strict"),
    # --- deformed factorization and shape invariance --------------------
    ConcordanceRow(
        FAC, "deformed-ladder-operators",
        "A+- = -+ f d/dr + W acting on the radial line",
        "curvedqm.numerics.apply_ladder",
        "tests/test_dsusy.py::TestLadderAction::test_lowering_annihilates_ground_states"),
    ConcordanceRow(
        FAC, "factorization-identity",
        "V = W^2 - f W' + eps0",
        "curvedqm.dsusy.factorized_potential",
        "tests/test_dsusy.py::TestFactorization::test_reproduces_potential_pointwise"),
    ConcordanceRow(
        FAC, "partner-potential",
        "V1 = W^2 + f W' + eps0",
        "curvedqm.dsusy.partner_potential",
        "tests/test_dsusy.py::TestPartner::test_oscillator_partner_is_shifted_system"),
    ConcordanceRow(
        FAC, "ground-energy-is-factorization-energy",
        "eps0 equals the lowest closed-form level",
        "curvedqm.dsusy.superpotential",
        "tests/test_dsusy.py::TestFactorization::test_epsilon0_is_ground_energy"),
    ConcordanceRow(
        FAC, "ground-annihilation",
        "A- psi_0 = 0",
        "curvedqm.numerics.apply_ladder",
        "tests/test_numerics.py::TestApplyLadder::test_lowering_annihilates_ground_state"),
    ConcordanceRow(
        FAC, "oscillator-superpotential",
        "W = -a f / r + beta r / f",
        "curvedqm.dsusy.superpotential",
        "tests/test_dsusy.py::TestFactorization::test_reproduces_potential_pointwise"),
    ConcordanceRow(
        FAC, "coulomb-superpotential",
        "W = -a f / r + Q / (2a)",
        "curvedqm.dsusy.superpotential",
        "tests/test_dsusy.py::TestFactorization::test_reproduces_potential_pointwise"),
    ConcordanceRow(
        FAC, "oscillator-ground-energy",
        "eps0 = beta(2a + 1) - lam a^2",
        "curvedqm.dsusy.superpotential",
        "tests/test_dsusy.py::TestFactorization::test_epsilon0_is_ground_energy"),
    ConcordanceRow(
        FAC, "coulomb-ground-energy",
        "eps0 = -Q^2/(4 a^2) - lam a^2",
        "curvedqm.dsusy.superpotential",
        "tests/test_dsusy.py::TestFactorization::test_epsilon0_is_ground_energy"),
    ConcordanceRow(
        FAC, "shape-invariance-relation",
        "partner(mu) = base(mu1) + R(mu1) with mu1 the shifted labels",
        "curvedqm.dsusy.dsi_defect",
        "tests/test_dsusy.py::TestChain::test_defect_vanishes_along_chain"),
    ConcordanceRow(
        FAC, "oscillator-parameter-flow",
        "each step shifts l -> l + 1 and beta -> beta - lam",
        "curvedqm.dsusy.dsi_chain",
        "tests/test_dsusy.py::TestChain::test_parameter_flow"),
    ConcordanceRow(
        FAC, "coulomb-parameter-flow",
        "each step shifts l -> l + 1 with Q fixed",
        "curvedqm.dsusy.dsi_chain",
        "tests/test_dsusy.py::TestChain::test_parameter_flow"),
    ConcordanceRow(
        FAC, "oscillator-level-spacing",
        "R_i = 4 beta - 4 lam (a + 2i - 1)",
        "curvedqm.dsusy.dsi_chain",
        "tests/test_dsusy.py::TestChain::test_partial_sums_reproduce_spectrum"),
    ConcordanceRow(
        FAC, "coulomb-level-spacing",
        "R_i = (Q^2/4)(1/(a+i-1)^2 - 1/(a+i)^2) - lam(2a + 2i - 1)",
        "curvedqm.dsusy.dsi_chain",
        "tests/test_dsusy.py::TestChain::test_partial_sums_reproduce_spectrum"),
    ConcordanceRow(
        FAC, "energy-telescoping",
        "E_n = sum of the first n + 1 chain energies",
        "curvedqm.dsusy.energy_from_chain",
        "tests/test_dsusy.py::TestChain::test_partial_sums_reproduce_spectrum"),
    ConcordanceRow(
        FAC, "intertwining-action",
        "lowering an excited base state lands on the partner tower",
        "curvedqm.numerics.apply_ladder",
        "tests/test_dsusy.py::TestLadderAction::test_lowering_maps_excited_state_to_partner_ground"),
    ConcordanceRow(
        FAC, "partner-spectrum-shift",
        "the partner tower is the base tower with the ground level removed",
        "curvedqm.dsusy.partner_potential",
        "tests/test_dsusy.py::TestLadderAction::test_lowering_maps_excited_state_to_partner_ground"),
    ConcordanceRow(
        FAC, "chain-truncation",
        "lam > 0 oscillator chains stop when the shifted coupling leaves the window",
        "curvedqm.dsusy.dsi_chain",
        "tests/test_dsusy.py::TestChain::test_oscillator_chain_truncates_when_coupling_runs_out"),
    # --- transformations to constant-mass form --------------------------
    ConcordanceRow(
        PCT, "flat-coordinate",
        "u = arcsin(xi r) for lam < 0, arcsinh(xi r) for lam > 0, xi = sqrt(|lam|)",
        "curvedqm.pct.u_of_r",
        "tests/test_pct.py::TestMapSystem::test_coordinate_round_trip"),
    ConcordanceRow(
        PCT, "wavefunction-transport",
        "phi(u) proportional to sqrt(f) psi(r(u))",
        "curvedqm.pct.flat_wavefunction",
        "tests/test_pct.py::TestMapSystem::test_wavefunction_transport_ratio_constant"),
    ConcordanceRow(
        PCT, "potential-transport",
        "V(r) = xi^2 U(u(r)) + zeta pointwise",
        "curvedqm.pct.flat_potential_U",
        "tests/test_pct.py::TestMapSystem::test_potential_maps_affinely"),
    ConcordanceRow(
        PCT, "energy-transport",
        "E_n = xi^2 eps_n + zeta entrywise",
        "curvedqm.pct.flat_eps",
        "tests/test_pct.py::TestMapSystem::test_spectrum_maps_affinely"),
    ConcordanceRow(
        PCT, "level-count-preservation",
        "the transformation preserves the number of bound levels",
        "curvedqm.pct.flat_spectrum",
        "tests/test_pct.py::TestMapSystem::test_level_counts_agree"),
    ConcordanceRow(
        PCT, "flat-degeneracy",
        "the change of variable is degenerate at lam = 0 and rejected",
        "curvedqm.pct.map_system",
        "tests/test_pct.py::TestMapSystem::test_flat_space_is_degenerate"),
    ConcordanceRow(
        PCT, "table-oscillator-targets",
        "ball oscillator maps to the trigonometric two-wall potential "
        "A(A-1)/sin^2 + B(B-1)/cos^2; sphere oscillator to the hyperbolic "
        "well A(A-1)/sinh^2 - B(B+1)/cosh^2",
        "curvedqm.pct.map_system",
        "tests/test_pct.py::TestMapSystem::test_family_assignment_and_parameters"),
    ConcordanceRow(
        PCT, "table-coulomb-targets",
        "hyperbolic Coulomb maps to A(A-1)/sin^2 + 2B cot; sphere Coulomb "
        "to A(A-1)/sinh^2 - 2B coth",
        "curvedqm.pct.map_system",
        "tests/test_pct.py::TestMapSystem::test_family_assignment_and_parameters"),
    ConcordanceRow(
        PCT, "table-flat-spectra",
        "eps towers (A+B+2n)^2, -(A-B+2n)^2, s^2 - B^2/s^2, -s^2 - B^2/s^2 "
        "with s = A + n",
        "curvedqm.pct.flat_eps",
        "tests/test_pct.py::TestFlatFamilies::test_spectra_closed_forms"),
    # --- special-function toolbox ---------------------------------------
    ConcordanceRow(
        SPF, "jacobi-recurrence",
        "three-term recurrence for P_n at general real index pairs with "
        "first and second derivatives",
        "curvedqm.specfun.jacobi_eval",
        "tests/test_specfun.py::TestJacobi::test_against_mpmath"),
    ConcordanceRow(
        SPF, "jacobi-degenerate-bridge",
        "recurrence steps degenerate at negative-integer index sums are "
        "bridged by the explicit expansion",
        "curvedqm.specfun.jacobi_eval",
        "tests/test_specfun.py::TestJacobi::test_degenerate_recurrence_step_is_bridged"),
    ConcordanceRow(
        SPF, "laguerre-evaluation",
        "L_n^(alpha) with derivatives at general real alpha",
        "curvedqm.specfun.laguerre_eval",
        "tests/test_specfun.py::TestLaguerre::test_against_mpmath"),
    ConcordanceRow(
        SPF, "romanovski-route",
        "complex-index Jacobi rows combined to real output for the "
        "lam > 0 Coulomb eigenfunctions",
        "curvedqm.specfun.romanovski_eval",
        "tests/test_specfun.py::TestRomanovski::test_dual_route_agreement"),
    ConcordanceRow(
        SPF, "degree-inverting-identity",
        "index negation maps a Jacobi row to a scaled row of shifted degree",
        "curvedqm.specfun.jacobi_eval",
        "tests/test_specfun.py::TestJacobiTransformation::test_degree_inverting_identity"),
    # --- rational extensions --------------------------------------------
    ConcordanceRow(
        EXT, "seed-solutions",
        "non-normalizable solutions of the base equation below the ground "
        "level, one per extension type",
        "curvedqm.rational.seed_function",
        "tests/test_rational.py::TestSeeds::test_seed_solves_base_equation"),
    ConcordanceRow(
        EXT, "seed-energies",
        "closed-form seed energies per family and type",
        "curvedqm.rational.seed_energy",
        "tests/test_rational.py::TestSeeds::test_seed_energies_are_pinned"),
    ConcordanceRow(
        EXT, "oscillator-window-type-one",
        "type I needs m < B + 1/2 with B = beta/|lam|",
        "curvedqm.rational.ExtensionSpec",
        "tests/test_rational.py::TestConstruction::test_rejects_degree_too_large_for_coupling"),
    ConcordanceRow(
        EXT, "oscillator-window-type-two-three",
        "types II/III need m < a + 1/2; type III needs m even",
        "curvedqm.rational.ExtensionSpec",
        "tests/test_rational.py::TestConstruction::test_rejects_degree_too_large_for_angular_label"),
    ConcordanceRow(
        EXT, "coulomb-window-type-one",
        "type I needs a > 2 and (a-1)^2 < s < (a-1)(a-1+m), s = Q/(2 sqrt(lam))",
        "curvedqm.rational.ExtensionSpec",
        "tests/test_rational.py::TestConstruction::test_rejects_coulomb_type_one_coupling_window"),
    ConcordanceRow(
        EXT, "coulomb-window-type-two",
        "type II needs (m-1)/2 < a < m and s > (a+1)^2",
        "curvedqm.rational.ExtensionSpec",
        "tests/test_rational.py::TestConstruction::test_rejects_coulomb_type_two_with_large_angular_label"),
    ConcordanceRow(
        EXT, "coulomb-window-type-three",
        "type III needs a > m, m even, and s > (a+1)^2",
        "curvedqm.rational.ExtensionSpec",
        "tests/test_rational.py::TestConstruction::test_rejects_odd_degree_for_type_three"),
    ConcordanceRow(
        EXT, "denominator-polynomials",
        "degree-m Jacobi rows in z(r) with type-dependent index pairs",
        "curvedqm.rational.denominator_poly",
        "tests/test_rational.py::TestConstruction::test_oscillator_degree1_denominator_is_pinned_affine"),
    ConcordanceRow(
        EXT, "denominator-nonvanishing",
        "admissible denominators keep one sign on the physical interval",
        "curvedqm.rational.ExtensionSpec",
        "tests/test_rational.py::TestConstruction::test_denominator_has_no_interior_sign_change"),
    ConcordanceRow(
        EXT, "degenerate-collapse",
        "at B = a + 1 the degree-2 denominator reduces to a constant and "
        "the correction vanishes",
        "curvedqm.rational.v_rat",
        "tests/test_rational.py::TestRationalTerm::test_collapsed_rows_reduce_to_the_base_potential"),
    ConcordanceRow(
        EXT, "rational-correction",
        "v_rat built from the first and second log-derivatives of the "
        "denominator row against the deformed metric",
        "curvedqm.rational.v_rat",
        "tests/test_rational.py::TestRationalTerm::test_matches_binomial_oracle"),
    ConcordanceRow(
        EXT, "extended-potential",
        "V_ext = shifted base potential + v_rat, additive constant kept out",
        "curvedqm.rational.extended_potential",
        "tests/test_rational.py::TestRationalTerm::test_extended_potential_leaves_constant_out"),
    ConcordanceRow(
        EXT, "shifted-partner-labels",
        "(l', coupling') of the base system the extension pairs with",
        "curvedqm.rational.extended_system",
        "tests/test_rational.py::TestConstruction::test_shifted_labels_and_constant"),
    ConcordanceRow(
        EXT, "pairing-constant-oscillator",
        "gamma = -2 beta for types I/III and 2(beta - |lam|) for type II",
        "curvedqm.rational.extended_system",
        "tests/test_rational.py::TestConstruction::test_shifted_labels_and_constant"),
    ConcordanceRow(
        EXT, "pairing-constant-coulomb",
        "gamma = 0 for all Coulomb extensions",
        "curvedqm.rational.extended_system",
        "tests/test_rational.py::TestConstruction::test_shifted_labels_and_constant"),
    ConcordanceRow(
        EXT, "correction-boundedness",
        "v_rat stays bounded at both endpoints of the domain",
        "curvedqm.rational.v_rat",
        "tests/test_rational.py::TestRationalTerm::test_correction_is_bounded_at_both_endpoints"),
    ConcordanceRow(
        EXT, "coulomb-correction-decay",
        "v_rat -> 0 as r -> infinity on the half line",
        "curvedqm.rational.v_rat",
        "tests/test_rational.py::TestRationalTerm::test_coulomb_correction_decays_at_infinity"),
    ConcordanceRow(
        EXT, "isospectrality-types-one-two",
        "types I/II extended spectra equal the parent tower",
        "curvedqm.rational.extended_spectrum",
        "tests/test_rational.py::TestSpectra::test_isospectral_types_reproduce_base_tower"),
    ConcordanceRow(
        EXT, "type-three-extra-level",
        "type III adds exactly one level at n_r = -m-1 strictly below the tower",
        "curvedqm.rational.extended_spectrum",
        "tests/test_rational.py::TestSpectra::test_extra_level_sits_strictly_below"),
    ConcordanceRow(
        EXT, "oscillator-type-three-tower",
        "the type III tower carries a +4 bump in the beta coefficient",
        "curvedqm.rational.extended_spectrum",
        "tests/test_rational.py::TestSpectra::test_type_three_oscillator_tower_is_pinned"),
    ConcordanceRow(
        EXT, "coulomb-type-one-tower",
        "the type I tower equals the tower of the lowered angular base",
        "curvedqm.rational.extended_spectrum",
        "tests/test_rational.py::TestSpectra::test_type_one_tower_matches_lowered_angular_base"),
    ConcordanceRow(
        EXT, "coulomb-extension-towers",
        "frozen Coulomb towers per extension type",
        "curvedqm.rational.extended_spectrum",
        "tests/test_rational.py::TestSpectra::test_coulomb_towers_are_pinned"),
    ConcordanceRow(
        EXT, "extension-energy-convention",
        "E_script - E = lam (d - 1)^2 / 4 carried through extensions",
        "curvedqm.rational.extended_spectrum",
        "tests/test_rational.py::TestSpectra::test_energy_shift_between_conventions"),
    ConcordanceRow(
        EXT, "extended-wavefunction-assembly",
        "psi_ext = envelope x numerator / q with the numerator assembled "
        "from two adjacent base rows",
        "curvedqm.rational.extended_wavefunction",
        "tests/test_rational.py::TestWavefunctions::test_closed_forms_satisfy_discrete_equation"),
    ConcordanceRow(
        EXT, "numerator-polynomials",
        "numerators of closed-form degree m + n_r (+1 for type III)",
        "curvedqm.rational.q_polynomial",
        "tests/test_rational.py::TestWavefunctions::test_oscillator_numerator_degrees_are_closed_form"),
    ConcordanceRow(
        EXT, "ratio-collapse-type-one",
        "the type I ground numerator collapses to (B + 1/2 - m) times a "
        "single Jacobi row",
        "curvedqm.rational.q_polynomial",
        "tests/test_rational.py::TestWavefunctions::test_ground_numerator_collapses_to_single_row"),
    ConcordanceRow(
        EXT, "ratio-collapse-type-two",
        "the type II ground numerator collapses to (m - a - 1/2) times a "
        "single Jacobi row",
        "curvedqm.rational.q_polynomial",
        "tests/test_rational.py::TestWavefunctions::test_ground_numerator_collapses_to_single_row"),
    ConcordanceRow(
        EXT, "extra-state-envelope",
        "the type III extra state is envelope / q with a constant numerator",
        "curvedqm.rational.extended_wavefunction",
        "tests/test_rational.py::TestWavefunctions::test_oscillator_numerator_degrees_are_closed_form"),
    ConcordanceRow(
        EXT, "numerator-orthogonality",
        "the numerator family is orthogonal under the parent weight over q^2",
        "curvedqm.rational.q_polynomial",
        "tests/test_rational.py::TestWavefunctions::test_oscillator_numerators_are_orthogonal_family"),
    ConcordanceRow(
        EXT, "coulomb-orthogonality",
        "extended Coulomb bound states are orthogonal in r",
        "curvedqm.rational.extended_wavefunction",
        "tests/test_rational.py::TestWavefunctions::test_coulomb_wavefunctions_are_orthogonal_in_r"),
    ConcordanceRow(
        EXT, "node-structure",
        "the k-th extended level carries exactly k nodes; the extra state "
        "is nodeless",
        "curvedqm.rational.extended_wavefunction",
        "tests/test_rational.py::TestWavefunctions::test_levels_have_oscillation_theorem_node_counts"),
    ConcordanceRow(
        EXT, "level-domain",
        "labels outside the extended tower are rejected",
        "curvedqm.rational.extended_wavefunction",
        "tests/test_rational.py::TestWavefunctions::test_out_of_range_levels_raise"),
    ConcordanceRow(
        EXT, "extended-superpotential",
        "first-order factorization data of the extended potential "
        "(types I/II)",
        "curvedqm.rational.extended_superpotential",
        "tests/test_rational.py::TestSuperpotentials::test_extended_factorization"),
    ConcordanceRow(
        EXT, "extended-factorization-identity",
        "W^2 - f W' + eps0 = V_ext + gamma pointwise",
        "curvedqm.rational.extended_superpotential",
        "tests/test_rational.py::TestSuperpotentials::test_extended_factorization"),
    ConcordanceRow(
        EXT, "extended-ground-energy",
        "the extended factorization energy is the lowest extended level",
        "curvedqm.rational.extended_superpotential",
        "tests/test_rational.py::TestSuperpotentials::test_extended_ground_energy_is_lowest_level"),
    ConcordanceRow(
        EXT, "type-three-no-first-order-partner",
        "type III admits no single-step factorization",
        "curvedqm.rational.extended_superpotential",
        "tests/test_rational.py::TestSuperpotentials::test_type_three_has_no_single_step_partner"),
    ConcordanceRow(
        EXT, "seed-superpotential",
        "each seed defines a factorization of the shifted base system",
        "curvedqm.rational.seed_superpotential",
        "tests/test_rational.py::TestSuperpotentials::test_seed_factorizes_shifted_base"),
    ConcordanceRow(
        EXT, "extension-shape-invariance",
        "the oscillator extended partner pairs with the same-type extension "
        "at shifted labels",
        "curvedqm.rational.extension_dsi_gap",
        "tests/test_rational.py::TestSuperpotentials::test_oscillator_shape_invariance_defect_vanishes"),
    ConcordanceRow(
        EXT, "enlarged-shape-invariance",
        "the Coulomb partnership shifts the denominator degree m -> m -+ 1 "
        "together with l -> l + 1",
        "curvedqm.rational.extension_edsi_gap",
        "tests/test_rational.py::TestSuperpotentials::test_coulomb_enlarged_shape_invariance_defect_vanishes"),
    ConcordanceRow(
        EXT, "enlarged-chain-endpoint",
        "the enlarged chain reaches the plain base system at degree zero",
        "curvedqm.rational.extension_edsi_gap",
        "tests/test_rational.py::TestSuperpotentials::test_enlarged_shape_invariance_reaches_degree_zero"),
    ConcordanceRow(
        EXT, "discretized-extension-spectra",
        "the discretized extended operator reproduces the closed-form tower",
        "curvedqm.numerics.richardson_levels",
        "tests/test_rational.py::TestSpectra::test_discretized_operator_reproduces_tower"),
    ConcordanceRow(
        EXT, "extension-gap-family-guards",
        "the gap functions reject the wrong family",
        "curvedqm.rational.extension_dsi_gap",
        "tests/test_rational.py::TestSuperpotentials::test_gap_functions_reject_wrong_family"),
    # --- flat oscillator limits -----------------------------------------
    ConcordanceRow(
        FLO, "jacobi-to-laguerre",
        "P_n at diverging second index approaches L_n in the rescaled "
        "argument, monotonically along the curvature sequence",
        "curvedqm.specfun.jacobi_eval",
        "tests/test_specfun.py::TestJacobiLaguerreLimit::test_limit_relation_monotone"),
    ConcordanceRow(
        FLO, "flat-oscillator-denominators",
        "q_m = L_m^(a-3/2)(-t) (I), L_m^(-a-1/2)(t) (II), "
        "L_m^(-a-1/2)(-t) (III), t = beta r^2",
        "curvedqm.limits.flat_q",
        "tests/test_limits.py::TestFlatPotential::test_matches_binomial_laguerre_oracle"),
    ConcordanceRow(
        FLO, "flat-oscillator-correction",
        "v = -4 beta (qdot/q + 2t (qddot/q - (qdot/q)^2))",
        "curvedqm.limits.flat_v_rat",
        "tests/test_limits.py::TestFlatPotential::test_hand_pinned_degree_one_correction"),
    ConcordanceRow(
        FLO, "flat-oscillator-windows",
        "types II/III need m < a + 1/2; type III needs m even",
        "curvedqm.limits.FlatExtendedSystem",
        "tests/test_limits.py::TestConstruction::test_oscillator_window_rejects_large_m"),
    ConcordanceRow(
        FLO, "flat-oscillator-constant",
        "gamma = -2 beta for types I/III and +2 beta for type II",
        "curvedqm.limits.gamma_flat",
        "tests/test_limits.py::TestFlatPotential::test_constant_pins"),
    ConcordanceRow(
        FLO, "flat-oscillator-towers",
        "E = beta(4 n_r + 2a + 1), +4 beta for type III, extra level at "
        "n_r = -m-1",
        "curvedqm.limits.flat_extended_energy",
        "tests/test_limits.py::TestSpectrum::test_energy_pins"),
    ConcordanceRow(
        FLO, "flat-oscillator-wavefunctions",
        "numerators assembled from adjacent Laguerre rows over q",
        "curvedqm.limits.flat_extended_wavefunction",
        "tests/test_limits.py::TestWavefunctions::test_eigen_equation_residual"),
    ConcordanceRow(
        FLO, "oscillator-curvature-sweep",
        "deviations from the flat extension shrink first order in lam",
        "curvedqm.limits.convergence_study",
        "tests/test_limits.py::TestConvergence::test_first_order_approach_to_flat"),
    # --- flat Coulomb limits --------------------------------------------
    ConcordanceRow(
        FLC, "coulomb-flat-variable",
        "t = Q r / |m - a|",
        "curvedqm.limits.t_of_r",
        "tests/test_limits.py::TestFlatPotential::test_matches_binomial_laguerre_oracle"),
    ConcordanceRow(
        FLC, "coulomb-type-one-nonexistence",
        "the type I window closes as lam -> 0: no flat counterpart exists",
        "curvedqm.limits.FlatExtendedSystem",
        "tests/test_limits.py::TestConstruction::test_coulomb_type_one_has_no_flat_counterpart"),
    ConcordanceRow(
        FLC, "flat-coulomb-denominators",
        "q_m = L_m^(-2a-1)(t) (II) and L_m^(-2a-1)(-t) (III)",
        "curvedqm.limits.flat_q",
        "tests/test_limits.py::TestFlatPotential::test_matches_binomial_laguerre_oracle"),
    ConcordanceRow(
        FLC, "flat-coulomb-windows",
        "type II needs a < m < 2a + 1; type III needs m < a with m even",
        "curvedqm.limits.FlatExtendedSystem",
        "tests/test_limits.py::TestConstruction::test_coulomb_type_two_window"),
    ConcordanceRow(
        FLC, "flat-coulomb-correction",
        "v = -2 (Q/(m - a))^2 (qddot/q - (qdot/q)^2)",
        "curvedqm.limits.flat_v_rat",
        "tests/test_limits.py::TestFlatPotential::test_matches_binomial_laguerre_oracle"),
    ConcordanceRow(
        FLC, "flat-coulomb-constant",
        "gamma = 0 for all flat Coulomb extensions",
        "curvedqm.limits.gamma_flat",
        "tests/test_limits.py::TestFlatPotential::test_constant_pins"),
    ConcordanceRow(
        FLC, "flat-coulomb-towers",
        "E = -Q^2/(4 (n_r + a + 1)^2), type III adds n_r = -m-1",
        "curvedqm.limits.flat_extended_energy",
        "tests/test_limits.py::TestSpectrum::test_solver_oracle_confirms_levels"),
    ConcordanceRow(
        FLC, "flat-coulomb-wavefunctions",
        "numerators assembled in u = Q r/(n_r + a + 1) with the companion "
        "row at the flat variable t, over q",
        "curvedqm.limits.flat_extended_wavefunction",
        "tests/test_limits.py::TestWavefunctions::test_solver_overlap_and_nodes"),
    ConcordanceRow(
        FLC, "flat-extra-state",
        "the type III extra state is envelope / q",
        "curvedqm.limits.flat_extended_wavefunction",
        "tests/test_limits.py::TestWavefunctions::test_eigen_equation_residual"),
    ConcordanceRow(
        FLC, "flat-enlarged-shape-invariance",
        "V^(m)(l) + 2 W' - V^(m+1)(l+1) = 0 for the flat type II family",
        "curvedqm.limits.flat_enlarged_si_gap",
        "tests/test_limits.py::TestEnlargedSI::test_partnership_gap_vanishes"),
    ConcordanceRow(
        FLC, "coulomb-curvature-sweep",
        "first-order approach to flat in the projective wavefunction distance",
        "curvedqm.limits.convergence_study",
        "tests/test_limits.py::TestConvergence::test_coulomb_wavefunction_limit_is_deep"),
    ConcordanceRow(
        FLC, "sweep-truncation",
        "admissibility lost along a curvature sequence is reported, not raised",
        "curvedqm.limits.convergence_study",
        "tests/test_limits.py::TestConvergence::test_truncation_is_reported"),
)


def _tests_root():
    for base in (Path(__file__).resolve().parents[2], Path.cwd()):
        cand = base / "tests"
        if cand.is_dir():
            return base
    return None


def _test_index(root):
    """Map test file -> {class -> set of test function names}."""
    index = {}
    for path in sorted((root / "tests").glob("test_*.py")):
        tree = ast.parse(path.read_text())
        classes = {}
        for node in tree.body:
            if isinstance(node, ast.ClassDef):
                classes[node.name] = {
                    item.name for item in node.body
                    if isinstance(item, ast.FunctionDef)}
        index[f"tests/{path.name}"] = classes
    return index


def _resolve_operation(dotted):
    parts = dotted.split(".")
    for cut in range(len(parts), 0, -1):
        try:
            obj = importlib.import_module(".".join(parts[:cut]))
        except ImportError:
            continue
        try:
            for attr in parts[cut:]:
                obj = getattr(obj, attr)
        except AttributeError:
            return False
        return True
    return False


def concordance_gaps():
    """All registry defects, as human-readable strings; empty when complete."""
    gaps = []
    seen = set()
    for row in REGISTRY:
        if row.key in seen:
            gaps.append(f"duplicate key: {row.key}")
        seen.add(row.key)
        for name in ("section", "key", "formula", "operation", "test"):
            if not getattr(row, name):
                gaps.append(f"{row.key}: empty {name}")
    root = _tests_root()
    if root is None:
        gaps.append("tests directory not found next to the package")
        index = {}
    else:
        index = _test_index(root)
    for row in REGISTRY:
        if not _resolve_operation(row.operation):
            gaps.append(f"{row.key}: operation does not resolve: {row.operation}")
        pieces = row.test.split("::")
        if len(pieces) != 3:
            gaps.append(f"{row.key}: test reference needs file::Class::name: {row.test}")
            continue
        fname, cls, fn = pieces
        if index and fn not in index.get(fname, {}).get(cls, set()):
            gaps.append(f"{row.key}: test not found: {row.test}")
    return gaps


def generate_concordance(path=None):
    """Render the registry as a markdown table; fail loudly on any gap."""
    gaps = concordance_gaps()
    if gaps:
        raise CurvedQMError(
            "concordance generation failed:\n" + "\n".join(gaps))
    lines = ["# Formula-to-code concordance", "",
             f"{len(REGISTRY)} implemented formulas, each tied to the "
             "operation realizing it and the test verifying it.", ""]
    for section in dict.fromkeys(row.section for row in REGISTRY):
        lines += [f"## {section}", "",
                  "| formula | statement | realized by | verified by |",
                  "| --- | --- | --- | --- |"]
        for row in REGISTRY:
            if row.section == section:
                lines.append(f"| {row.key} | {row.formula} | "
                             f"`{row.operation}` | `{row.test}` |")
        lines.append("")
    text = "\n".join(lines)
    if path is not None:
        Path(path).write_text(text)
    return text
