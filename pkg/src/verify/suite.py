"""
Verification suite: runs the named checks against one recurrence trace and
collects them into a VerificationReport.

Checks are independent pure functions of the trace; with ``workers > 1`` they
run on a thread pool and are merged back in their canonical order.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, Optional, Sequence, Tuple

import numpy as np

from src.config import config
from src.errors import ConfigurationError, InsufficientHorizon, RecurflowError
from src.kernel.polynomial import RealPolynomial, as_polynomial, kernel_G, symmetrize
from src.kernel.spectrum import characteristic_spectrum
from src.logging_config import log_stage
from src.recurrence.asymptotics import X_STAR_MIN_P, estimate_x_star
from src.recurrence.trace import RecurrenceTrace
from src.schemas import CHECK_NAMES, CheckResult, VerificationReport
from src.verify.appendix import appendix_inequality_suite
from src.verify.bounds import (
    AnsatzConstants,
    ansatz_check,
    base_case_verifier,
    e3_bound_check,
    fit_ansatz_constants,
    fit_nonlinear_constants,
    hat_xi_bound_check,
    inductive_step_check,
    last_finite,
    nonlinear_bound_check,
    running_plateau,
)
from src.verify.decomposition import (
    ProductTable,
    h_sequence,
    identity_residuals,
    main_lemma_residual,
    r1_increments,
)
from src.verify.fitting import fit_decay, fit_envelope

logger = logging.getLogger(__name__)

DEFAULT_THRESHOLDS = {
    "identity_residual": config.tolerances.identity_residual,
    "plateau_rtol": config.tolerances.plateau_rtol,
    "decay_tolerance": 0.1,
    "h_order_gap": 0.2,
    "epsilon": 0.2,
    "bound_ratio": 1.0,
}
DECAY_FIT_MIN_P = X_STAR_MIN_P
MAIN_LEMMA_MIN_P = 10
NEGLIGIBLE = 1e-8


@dataclass
class VerifySettings:
    """Which checks to run and with which thresholds.

    Attributes:
        checks: Check names, a subset of CHECK_NAMES
        thresholds: Overrides of DEFAULT_THRESHOLDS
        appendix_samples: Random samples per appendix inequality
        seed: Seed of the appendix sampler
        fit_range: Window of the decay fits (default [P/32, P])
        identity_p_max: Last p of the decomposition identity check
        lemma_p_max: Last p of the lemma-envelope checks
        workers: Threads running independent checks
    """

    checks: Sequence[str] = CHECK_NAMES
    thresholds: Dict[str, float] = field(default_factory=dict)
    appendix_samples: int = 100_000
    seed: int = 0
    fit_range: Optional[Tuple[int, int]] = None
    identity_p_max: int = 1000
    lemma_p_max: int = 2000
    workers: int = 1

    def __post_init__(self):
        unknown = [name for name in self.checks if name not in CHECK_NAMES]
        if unknown:
            raise ConfigurationError(f"Unknown checks: {unknown}", {"known": list(CHECK_NAMES)})
        unknown = [name for name in self.thresholds if name not in DEFAULT_THRESHOLDS]
        if unknown:
            raise ConfigurationError(f"Unknown thresholds: {unknown}",
                                     {"known": list(DEFAULT_THRESHOLDS)})
        self.thresholds = {**DEFAULT_THRESHOLDS, **self.thresholds}
        if self.workers < 1:
            raise ConfigurationError(f"workers must be >= 1, got {self.workers}")

    def threshold(self, name: str) -> float:
        return self.thresholds[name]


@dataclass
class _Context:
    trace: RecurrenceTrace
    f: RealPolynomial
    f_tilde: RealPolynomial
    G: RealPolynomial
    sigma_G: float
    alpha_f: float
    table: ProductTable
    top: int
    settings: VerifySettings

    @property
    def lemma_top(self) -> int:
        return min(self.settings.lemma_p_max, self.top)

    @property
    def fit_range(self) -> Tuple[int, int]:
        if self.settings.fit_range is not None:
            lo, hi = self.settings.fit_range
            return lo, min(hi, self.top)
        return max(8, self.top // 32), self.top


def _identity_residual(ctx: _Context) -> CheckResult:
    threshold = ctx.settings.threshold("identity_residual")
    ps, res = identity_residuals(ctx.trace, ctx.f, min(ctx.settings.identity_p_max, ctx.top))
    if ps.size == 0:
        raise InsufficientHorizon("identity check needs P >= 3", {"P": ctx.top})
    i = int(np.argmax(res))
    return CheckResult(name="identity_residual", passed=bool(res[i] < threshold),
                       measured_constant=float(res[i]), threshold=threshold, worst_p=int(ps[i]),
                       details={"p_max": int(ps[-1])})


def _r1_increment(ctx: _Context) -> CheckResult:
    rtol = ctx.settings.threshold("plateau_rtol")
    ps, inc = r1_increments(ctx.f, max(ctx.lemma_top, 4))
    scaled = ps * np.abs(inc)
    top, half, plateau = running_plateau(scaled, rtol)
    bounded = math.isfinite(top) and (plateau or top <= NEGLIGIBLE)
    return CheckResult(name="r1_increment", passed=bool(bounded), measured_constant=top,
                       threshold=rtol, worst_p=int(ps[int(np.argmax(scaled))]) if ps.size else None,
                       details={"first_half_max": half, "plateau": plateau})


def _main_lemma_envelope(ctx: _Context) -> CheckResult:
    rtol = ctx.settings.threshold("plateau_rtol")
    ps = np.arange(MAIN_LEMMA_MIN_P, ctx.lemma_top + 1)
    if ps.size == 0:
        raise InsufficientHorizon(f"main lemma envelope needs P >= {MAIN_LEMMA_MIN_P}", {"P": ctx.top})
    res = np.array([main_lemma_residual(ctx.trace, ctx.f_tilde, int(p), ctx.table) for p in ps])
    scaled = res * ps / np.log(ps)
    top, half, plateau = running_plateau(scaled, rtol)
    return CheckResult(name="main_lemma_envelope", passed=bool(math.isfinite(top) and plateau),
                       measured_constant=top, threshold=rtol, worst_p=int(ps[int(np.argmax(scaled))]),
                       details={"first_half_max": half, "plateau": plateau})


def _nonlinear_bound(ctx: _Context) -> CheckResult:
    limit = ctx.settings.threshold("bound_ratio")
    constants = fit_nonlinear_constants(ctx.trace, -ctx.sigma_G, ctx.lemma_top, ctx.table)
    ps = np.arange(2 * constants.N0, ctx.lemma_top + 1)
    if ps.size == 0:
        raise InsufficientHorizon(f"nonlinear bound needs P >= {2 * constants.N0}", {"P": ctx.top})
    bounds = [nonlinear_bound_check(ctx.trace, ctx.f_tilde, constants, int(p), ctx.table) for p in ps]
    ratios = np.array([b.ratio for b in bounds])
    i = int(np.argmax(ratios))
    return CheckResult(name="nonlinear_bound", passed=bool(ratios[i] <= limit),
                       measured_constant=float(ratios[i]), threshold=limit, worst_p=int(ps[i]),
                       details={"C1": constants.C1, "C2": constants.C2, "N0": constants.N0,
                                "sigma": constants.sigma, "actual": bounds[i].actual,
                                "bound": bounds[i].bound})


def _ansatz_constants(ctx: _Context) -> AnsatzConstants:
    fitted = fit_ansatz_constants(ctx.trace, table=ctx.table)
    return AnsatzConstants(A1=fitted.A1, A2=fitted.A2, A3=fitted.A3, N0=fitted.N0,
                           epsilon=ctx.settings.threshold("epsilon"))


def _ansatz(ctx: _Context) -> CheckResult:
    return ansatz_check(ctx.trace, _ansatz_constants(ctx), table=ctx.table)


def _base_case(ctx: _Context) -> CheckResult:
    return base_case_verifier(ctx.trace, ctx.G, _ansatz_constants(ctx), ctx.sigma_G).to_check()


def _h_order_gap(ctx: _Context) -> CheckResult:
    gap_min = ctx.settings.threshold("h_order_gap")
    lo, hi = ctx.fit_range
    h = h_sequence(ctx.trace, ctx.G)
    xi = np.asarray(ctx.trace.xi, dtype=np.float64)
    fit_h = fit_envelope(h, (max(lo, 3), hi))
    fit_xi = fit_envelope(xi, (max(lo, 3), hi))
    gap = fit_xi.exponent - fit_h.exponent
    return CheckResult(name="h_order_gap", passed=bool(gap >= gap_min), measured_constant=gap,
                       threshold=gap_min,
                       details={"h_exponent": fit_h.exponent, "xi_exponent": fit_xi.exponent,
                                "fit_range": [max(lo, 3), hi]})


def _hat_xi_bound(ctx: _Context) -> CheckResult:
    return hat_xi_bound_check(ctx.trace)


def _inductive_step(ctx: _Context) -> CheckResult:
    return inductive_step_check(ctx.trace, ctx.G, ctx.settings.threshold("epsilon"), ctx.sigma_G,
                                rtol=ctx.settings.threshold("plateau_rtol"))


def _e3_bound(ctx: _Context) -> CheckResult:
    ps = np.arange(4, max(ctx.lemma_top, 4) + 1)
    bounds = [e3_bound_check(ctx.f_tilde, int(p)) for p in ps]
    ratios = np.array([b.lhs / b.rhs if b.rhs > 0 else math.inf for b in bounds])
    i = int(np.argmax(ratios))
    return CheckResult(name="e3_bound", passed=bool(ratios[i] <= 1.0), measured_constant=float(ratios[i]),
                       threshold=1.0, worst_p=int(ps[i]),
                       details={"lhs": bounds[i].lhs, "rhs": bounds[i].rhs})


def _decay_fit(ctx: _Context) -> CheckResult:
    tolerance = ctx.settings.threshold("decay_tolerance")
    if ctx.trace.P < DECAY_FIT_MIN_P:
        return CheckResult(name="decay_fit", passed=True, threshold=tolerance,
                           details={"skipped": f"horizon below {DECAY_FIT_MIN_P}"})
    trace = ctx.trace
    if trace.x_star is None or not np.any(np.isfinite(trace.delta[1:])):
        trace = estimate_x_star(trace).trace
    lo, hi = ctx.fit_range
    fit = fit_decay(trace.delta, (lo, min(hi, trace.P)), oscillatory=True)
    error = abs(fit.exponent + ctx.alpha_f)
    return CheckResult(name="decay_fit", passed=bool(error <= tolerance), measured_constant=fit.exponent,
                       threshold=tolerance,
                       details={"alpha_f": ctx.alpha_f, "fit": fit.to_report().model_dump()})


def _appendix(ctx: _Context) -> CheckResult:
    results = appendix_inequality_suite(ctx.settings.appendix_samples, ctx.settings.seed)
    ratios = [r.measured_constant for r in results.values() if r.threshold == 1.0]
    failed = [name for name, r in results.items() if not r.passed]
    return CheckResult(
        name="appendix", passed=not failed, measured_constant=max(ratios) if ratios else None,
        threshold=1.0,
        details={"failed": failed,
                 "items": {name: r.model_dump(by_alias=True, exclude={"name"}) for name, r in results.items()}},
    )


CHECKS: Dict[str, Callable[[_Context], CheckResult]] = {
    "identity_residual": _identity_residual,
    "r1_increment": _r1_increment,
    "main_lemma_envelope": _main_lemma_envelope,
    "nonlinear_bound": _nonlinear_bound,
    "ansatz": _ansatz,
    "base_case": _base_case,
    "h_order_gap": _h_order_gap,
    "hat_xi_bound": _hat_xi_bound,
    "inductive_step": _inductive_step,
    "e3_bound": _e3_bound,
    "decay_fit": _decay_fit,
    "appendix": _appendix,
}


def _run_check(name: str, ctx: _Context) -> CheckResult:
    try:
        with log_stage(logger, f"check {name}"):
            result = CHECKS[name](ctx)
    except RecurflowError as e:
        return CheckResult(name=name, passed=False, details={"error": e.to_dict()})
    level = logging.INFO if result.passed else logging.WARNING
    logger.log(level, f"Check {name}: {'pass' if result.passed else 'FAIL'} "
                      f"(measured {result.measured_constant})")
    return result


def run_verification_suite(trace: RecurrenceTrace, f=None,
                           settings: Optional[VerifySettings] = None) -> VerificationReport:
    """Run the selected checks on ``trace``.

    Args:
        trace: Recurrence trace to verify
        f: Polynomial of the recurrence (default ``trace.f``)
        settings: Checks, thresholds and sampling (defaults to all checks)

    Check-level failures, including hypothesis violations, are reported as
    failed checks; only configuration and spectrum errors propagate.
    """
    settings = settings or VerifySettings()
    f = as_polynomial(f) if f is not None else trace.f
    f_tilde = symmetrize(f)
    spectrum = characteristic_spectrum(f_tilde)
    table = ProductTable.from_trace(trace)
    ctx = _Context(trace=trace, f=f, f_tilde=f_tilde, G=kernel_G(f_tilde), sigma_G=spectrum.sigma_G,
                   alpha_f=spectrum.alpha_f, table=table, top=last_finite(table.xi), settings=settings)

    names = [name for name in CHECK_NAMES if name in set(settings.checks)]
    logger.info(f"Verification suite: {len(names)} checks on P={trace.P}")
    if settings.workers > 1 and len(names) > 1:
        with ThreadPoolExecutor(max_workers=settings.workers) as executor:
            results = list(executor.map(lambda name: _run_check(name, ctx), names))
    else:
        results = [_run_check(name, ctx) for name in names]

    checks = dict(zip(names, results))
    report = VerificationReport(f_coeffs=f.as_floats(), P=trace.P, checks=checks,
                                all_passed=all(r.passed for r in results))
    if report.failed:
        logger.warning(f"Failed checks: {report.failed}")
    return report
