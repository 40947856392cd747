"""Numerical checks of the convergence argument against recurrence traces."""

from src.verify.appendix import appendix_inequality_suite
from src.verify.bounds import (
    AnsatzConstants,
    BaseCaseResult,
    E3Bound,
    NonlinearBound,
    NonlinearConstants,
    ansatz_check,
    base_case_verifier,
    e3_bound_check,
    fit_ansatz_constants,
    fit_nonlinear_constants,
    hat_xi,
    hat_xi_bound_check,
    hat_xi_value,
    inductive_step_check,
    root_correction_sides,
    nonlinear_bound_check,
)
from src.verify.decomposition import (
    DecompositionTerms,
    ProductTable,
    decomposition_terms,
    h_sequence,
    identity_residuals,
    main_lemma_residual,
    r1_increments,
    r2_increment_profile,
)
from src.verify.fitting import DecayFit, envelope, fit_decay, fit_envelope
from src.verify.suite import DEFAULT_THRESHOLDS, VerifySettings, run_verification_suite

__all__ = [
    "AnsatzConstants",
    "BaseCaseResult",
    "DEFAULT_THRESHOLDS",
    "DecayFit",
    "DecompositionTerms",
    "E3Bound",
    "NonlinearBound",
    "NonlinearConstants",
    "ProductTable",
    "VerifySettings",
    "ansatz_check",
    "appendix_inequality_suite",
    "base_case_verifier",
    "decomposition_terms",
    "e3_bound_check",
    "envelope",
    "fit_ansatz_constants",
    "fit_decay",
    "fit_envelope",
    "fit_nonlinear_constants",
    "h_sequence",
    "hat_xi",
    "hat_xi_bound_check",
    "hat_xi_value",
    "identity_residuals",
    "inductive_step_check",
    "root_correction_sides",
    "main_lemma_residual",
    "nonlinear_bound_check",
    "r1_increments",
    "r2_increment_profile",
    "run_verification_suite",
]
