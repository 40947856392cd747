"""
Subcommands of the recurflow CLI.

Each command takes a validated RunConfig, writes its reports into
``output_dir`` and returns the process exit code: 0 success, 1 error,
2 check failure.
"""

import csv
import json
import logging
import os
import sys
from functools import wraps
from typing import Callable, Dict, Optional

import numpy as np

from src.cli.output import load_cached_trace, save_trace, write_json
from src.config import config
from src.errors import (
    ConfigurationError,
    DegenerateKernel,
    InsufficientData,
    RecurflowError,
    RootFindingFailure,
)
from src.kernel.assumption import validate_assumption
from src.kernel.monomial import MonomialKernel
from src.kernel.polynomial import RealPolynomial, as_polynomial, kernel_G, symmetrize
from src.kernel.spectrum import Spectrum, characteristic_spectrum, sigma_of_kernel
from src.linear.moments import moment_transform
from src.linear.stability import eigen_check, product_norm_scan, similarity_check
from src.linear.system import power_forcing, run_linear, scaled_sup
from src.linear.transition import matrix_path
from src.logging_config import log_stage
from src.recurrence.asymptotics import X_STAR_MIN_P, compute_R, estimate_x_star
from src.recurrence.engine import EngineConfig, run_recurrence
from src.recurrence.export import format_float
from src.recurrence.trace import RecurrenceTrace
from src.schemas import (
    REPORT_MODELS,
    ErrorReport,
    LinearReport,
    RunConfig,
    SimulationSummary,
    SpectrumReport,
    StabilityReport,
)
from src.verify.fitting import fit_decay
from src.verify.suite import VerifySettings, run_verification_suite

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_CHECK_FAILED = 2

MATRIX_PATH_MAX_P = 2000
SIMILARITY_MAX_P = 2000
LINEAR_COLUMNS = ("p", "xi_p", "abs_xi_p", "h_p")


def emit_error(report: ErrorReport) -> None:
    sys.stderr.write(report.model_dump_json(indent=2) + "\n")
    sys.stderr.flush()


def handle_errors(command: Callable[..., int]) -> Callable[..., int]:
    """Map exceptions raised by a command to an exit code and a JSON error on stderr."""
    @wraps(command)
    def decorated_function(*args, **kwargs) -> int:
        try:
            return command(*args, **kwargs)
        except RecurflowError as e:
            logger.error(f"{command.__name__} failed: {type(e).__name__}: {e.message}")
            emit_error(ErrorReport(**e.to_dict()))
            return e.exit_code
        except Exception as e:
            logger.exception(f"{command.__name__} failed with an internal error")
            emit_error(ErrorReport(error=str(e), error_type=type(e).__name__, exit_code=EXIT_ERROR))
            return EXIT_ERROR

    return decorated_function


def _polynomial(cfg: RunConfig) -> RealPolynomial:
    return as_polynomial(cfg.f_exact())


def _spectrum_or_none(f: RealPolynomial) -> Optional[Spectrum]:
    try:
        return characteristic_spectrum(symmetrize(f))
    except (DegenerateKernel, RootFindingFailure) as e:
        logger.warning(f"No characteristic spectrum for f = {f}: {e}")
        return None


def _kernel(cfg: RunConfig) -> MonomialKernel:
    if cfg.kernel:
        return MonomialKernel.parse(cfg.kernel)
    return MonomialKernel.from_polynomial(kernel_G(symmetrize(_polynomial(cfg))))


def _default_fit_range(cfg: RunConfig, top: int):
    if cfg.fit_range is not None:
        return cfg.fit_range
    lo = max(8, top // 32)
    return (lo, top) if lo < top else None


def _print(report) -> None:
    print(report.model_dump_json(indent=2, by_alias=True))


# SPECTRUM
@handle_errors
def cmd_spectrum(cfg: RunConfig) -> int:
    """Write spectrum.json and assumption.json; exit 2 unless the roots are distinct and in the strip."""
    f = _polynomial(cfg)
    with log_stage(logger, "spectrum"):
        spectrum = characteristic_spectrum(symmetrize(f))
    report = SpectrumReport.from_spectrum(spectrum)
    write_json(report, os.path.join(cfg.output_dir, "spectrum.json"))
    write_json(validate_assumption(f), os.path.join(cfg.output_dir, "assumption.json"))
    _print(report)
    if not (spectrum.distinct and spectrum.in_strip):
        logger.warning(f"Spectrum fails the assumption: distinct={spectrum.distinct}, "
                       f"in_strip={spectrum.in_strip}")
        return EXIT_CHECK_FAILED
    return EXIT_OK


# SIMULATION
def simulate_trace(cfg: RunConfig, f: RealPolynomial) -> RecurrenceTrace:
    """Run the recurrence for ``cfg`` and fill delta when the horizon allows it."""
    engine = EngineConfig(P=cfg.P, precision=cfg.precision, parallel=cfg.threads > 1,
                          threads=cfg.threads)
    with log_stage(logger, "simulate"):
        trace = run_recurrence(f, engine)
    if trace.P >= X_STAR_MIN_P:
        with log_stage(logger, "x_star"):
            trace = estimate_x_star(trace).trace
    else:
        logger.info(f"P = {trace.P} < {X_STAR_MIN_P}: x* is not estimated")
    return trace


def summarize(trace: RecurrenceTrace, cfg: RunConfig) -> SimulationSummary:
    spectrum = _spectrum_or_none(trace.f)
    alpha_f = spectrum.alpha_f if spectrum else None
    summary = SimulationSummary(f_coeffs=cfg.f_coeffs, P=trace.P, precision=cfg.precision,
                                alpha_f=alpha_f, scale_log2=trace.scale_log2)
    if trace.x_star is None:
        return summary

    summary.x_star = trace.x_star
    summary.err_bound = trace.x_star_err
    if alpha_f is not None:
        _, Cp = compute_R(trace, 1.0, alpha_f)
        finite = np.abs(Cp[1:])[np.isfinite(Cp[1:])]
        summary.sup_Cp = float(finite.max()) if finite.size else None
    try:
        fit = fit_decay(trace.delta, _default_fit_range(cfg, trace.P),
                        oscillatory=bool(spectrum and spectrum.leading_root.imag != 0))
        summary.fit = fit.to_report()
        summary.fitted_exponent = fit.exponent
    except InsufficientData as e:
        logger.warning(f"No decay fit of delta_p: {e}")
    return summary


@handle_errors
def cmd_simulate(cfg: RunConfig) -> int:
    """Write trace.csv (with its cache metadata) and summary.json."""
    f = _polynomial(cfg)
    trace = simulate_trace(cfg, f)
    save_trace(trace, cfg)
    summary = summarize(trace, cfg)
    write_json(summary, os.path.join(cfg.output_dir, "summary.json"))
    _print(summary)
    return EXIT_OK


# LINEAR SYSTEM
def write_linear_csv(trace, path: str) -> str:
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(LINEAR_COLUMNS)
        for p in range(2, trace.P + 1):
            writer.writerow([p, format_float(np.real(trace.xi[p])), format_float(abs(trace.xi[p])),
                             format_float(trace.h[p])])
    return path


@handle_errors
def cmd_linear(cfg: RunConfig) -> int:
    """Solve the linear system; exit 2 unless the scaled sup plateaus and the moments reconstruct xi."""
    kernel = _kernel(cfg)
    forcing, forcing_text = None, None
    if cfg.forcing_exponent is not None:
        forcing = power_forcing(cfg.forcing_amplitude, cfg.forcing_exponent)
        forcing_text = f"{cfg.forcing_amplitude!r}*p^{cfg.forcing_exponent!r}"

    with log_stage(logger, "linear"):
        trace = run_linear(kernel, cfg.xi2, forcing, cfg.P)
    try:
        spectrum = sigma_of_kernel(kernel)
    except (DegenerateKernel, RootFindingFailure) as e:
        logger.warning(f"No spectrum for kernel {kernel.to_text()}: {e}")
        spectrum = None
    sigma = spectrum.sigma_G if spectrum else 0.0
    profile = scaled_sup(trace, sigma, normalization=abs(cfg.xi2) or 1.0)
    moments = moment_transform(trace)

    mismatch = None
    if cfg.P <= MATRIX_PATH_MAX_P:
        path = matrix_path(kernel, cfg.xi2, forcing, cfg.P)
        xi = np.asarray(trace.xi[2:])
        mismatch = float(np.max(np.abs(xi - path[2:])) / (1.0 + np.max(np.abs(xi))))

    fit = None
    values = np.abs(trace.xi) if not kernel.is_real else np.asarray(trace.xi, dtype=np.float64)
    oscillatory = bool(kernel.is_real and spectrum and spectrum.leading_root.imag != 0)
    try:
        fit = fit_decay(values, _default_fit_range(cfg, cfg.P), oscillatory=oscillatory).to_report()
    except InsufficientData as e:
        logger.info(f"No decay fit of xi_p: {e}")

    tol = config.tolerances
    passed = (profile.plateau_detected and moments.residual <= tol.residual_tol
              and (mismatch is None or mismatch <= tol.identity_residual))
    report = LinearReport(
        kernel=kernel.to_text(), xi2=cfg.xi2, P=cfg.P, forcing=forcing_text,
        sigma_G=spectrum.sigma_G if spectrum else None,
        sup_scaled=profile.sup_scaled, sup_scaled_half=profile.sup_scaled_half,
        plateau_detected=profile.plateau_detected,
        moment_residual=moments.residual, moment_sup_norm=moments.sup_norm,
        matrix_path_mismatch=mismatch, fit=fit, passed=bool(passed),
    )
    write_linear_csv(trace, os.path.join(cfg.output_dir, "linear.csv"))
    write_json(report, os.path.join(cfg.output_dir, "linear.json"))
    _print(report)
    return EXIT_OK if report.passed else EXIT_CHECK_FAILED


# STABILITY
@handle_errors
def cmd_stability(cfg: RunConfig) -> int:
    """Product-norm scan, eigenvalue cross-check and similarity constant; exit 2 unless stable."""
    kernel = _kernel(cfg)
    if max(cfg.q0) > cfg.P:
        raise ConfigurationError(f"q0 values {cfg.q0} must not exceed P = {cfg.P}")

    with log_stage(logger, "product_norm_scan"):
        scan = product_norm_scan(kernel, cfg.q0, cfg.P, workers=cfg.threads)
    eigen = eigen_check(kernel)
    try:
        similarity = similarity_check(kernel, P=min(cfg.P, SIMILARITY_MAX_P))
    except np.linalg.LinAlgError as e:
        logger.warning(f"Similarity check skipped, M~ has no eigenvector basis: {e}")
        similarity = None

    report = StabilityReport(scan=scan, eigen=eigen, similarity=similarity,
                             passed=bool(scan.plateau_detected and eigen.passed))
    write_json(report, os.path.join(cfg.output_dir, "stability.json"))
    _print(report)
    return EXIT_OK if report.passed else EXIT_CHECK_FAILED


# VERIFICATION
def trace_for(cfg: RunConfig, f: RealPolynomial) -> RecurrenceTrace:
    """Cached trace for ``cfg`` when one exists, else a fresh (and cached) simulation."""
    trace = load_cached_trace(cfg, f)
    if trace is None:
        trace = simulate_trace(cfg, f)
        save_trace(trace, cfg)
    return trace


@handle_errors
def cmd_verify(cfg: RunConfig) -> int:
    """Run the selected checks; exit 2 if any of them fails."""
    f = _polynomial(cfg)
    trace = trace_for(cfg, f)
    settings = VerifySettings(checks=cfg.checks, thresholds=cfg.thresholds, seed=cfg.seed,
                              fit_range=cfg.fit_range, workers=cfg.threads)
    with log_stage(logger, "verify"):
        report = run_verification_suite(trace, f, settings)
    write_json(report, os.path.join(cfg.output_dir, "verification.json"))
    _print(report)
    return EXIT_OK if report.all_passed else EXIT_CHECK_FAILED


# SCHEMAS
@handle_errors
def cmd_schemas(schema_dir: str = "schemas") -> int:
    """Write one JSON schema per report model into ``schema_dir``."""
    os.makedirs(schema_dir, exist_ok=True)
    for name, model in REPORT_MODELS.items():
        path = os.path.join(schema_dir, f"{name}.json")
        with open(path, "w") as fh:
            json.dump(model.model_json_schema(by_alias=True), fh, indent=2, sort_keys=True)
            fh.write("\n")
        logger.debug(f"Wrote schema {path}")
    logger.info(f"Wrote {len(REPORT_MODELS)} schemas to {schema_dir}")
    return EXIT_OK


COMMANDS: Dict[str, Callable[[RunConfig], int]] = {
    "spectrum": cmd_spectrum,
    "simulate": cmd_simulate,
    "linear": cmd_linear,
    "stability": cmd_stability,
    "verify": cmd_verify,
}
