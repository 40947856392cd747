"""
Limit of the normalizers a_p and the scaling ratio R.

log a_p increases by log(1 + xi_p/p^3) at each step, so
log x* = log a_P + sum_{q > P} log(1 + xi_q/q^3). The tail is modelled from
the trace itself: xi_p is fitted on [P/2, P] by the homogeneous modes
Re(c_k p^sigma_k) of the characteristic spectrum plus a p^-1 correction, and
the tail sum is evaluated from that model by Euler-Maclaurin.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from src.errors import DegenerateKernel, InsufficientHorizon, RootFindingFailure, ZeroInput
from src.kernel.polynomial import symmetrize
from src.kernel.spectrum import characteristic_spectrum
from src.numerics.accumulate import dd_cumsum
from src.recurrence.trace import RecurrenceTrace

logger = logging.getLogger(__name__)

X_STAR_MIN_P = 100
_MIN_FIT_POINTS = 10
_IMAG_TOL = 1e-12


@dataclass(frozen=True)
class XStarEstimate:
    """Estimated x* with the trace whose delta sequence it filled."""

    x_star: float
    err_bound: float
    log_x_star: float
    tail: float
    exponents: Tuple[complex, ...]
    coefficients: Tuple[complex, ...]
    trace: RecurrenceTrace


def tail_exponents(roots: Sequence[complex]) -> Tuple[complex, ...]:
    """One exponent per real root or conjugate pair, plus -1."""
    out = []
    for z in roots:
        z = complex(z)
        if z.imag < -_IMAG_TOL:
            continue
        out.append(complex(z.real, 0.0) if abs(z.imag) <= _IMAG_TOL else z)
    if not any(abs(z + 1.0) < 1e-6 for z in out):
        out.append(complex(-1.0, 0.0))
    return tuple(out)


def _design(p: np.ndarray, exponents: Sequence[complex]) -> np.ndarray:
    logp = np.log(p)
    cols = []
    for s in exponents:
        base = np.exp(s.real * logp)
        if s.imag == 0.0:
            cols.append(base)
        else:
            cols.append(base * np.cos(s.imag * logp))
            cols.append(base * np.sin(s.imag * logp))
    return np.column_stack(cols)


def fit_modes(p: np.ndarray, xi: np.ndarray, exponents: Sequence[complex]) -> Tuple[complex, ...]:
    """Least-squares c_k with xi_p ~ sum_k Re(c_k p^s_k)."""
    sol, *_ = np.linalg.lstsq(_design(p, exponents), xi, rcond=None)
    coeffs, i = [], 0
    for s in exponents:
        if s.imag == 0.0:
            coeffs.append(complex(sol[i], 0.0))
            i += 1
        else:
            coeffs.append(complex(sol[i], -sol[i + 1]))
            i += 2
    return tuple(coeffs)


def modelled_tail(coefficients: Sequence[complex], exponents: Sequence[complex], P: int) -> float:
    """sum_{q > P} xi_q/q^3 for xi_q = sum Re(c_k q^s_k): integral minus half the endpoint term."""
    total = 0.0
    for c, s in zip(coefficients, exponents):
        total += (c * (P ** (s - 2.0) / (2.0 - s) - 0.5 * P ** (s - 3.0))).real
    return float(total)


def _fit_window(trace: RecurrenceTrace) -> Tuple[np.ndarray, np.ndarray]:
    p = np.arange(trace.P + 1)
    finite = np.isfinite(trace.xi)
    window = finite & (p >= trace.P // 2)
    if window.sum() < _MIN_FIT_POINTS and finite.any():
        last = int(p[finite].max())
        window = finite & (p >= last // 2) & (p <= last)
    return p[window].astype(np.float64), trace.xi[window]


def _suffix_steps(steps: np.ndarray, P: int) -> np.ndarray:
    """S[p] = sum_{q=p+1}^{P} steps[q], summed from the smallest terms up."""
    suffix = np.zeros(P + 1)
    if P >= 2:
        rev = steps[P:1:-1]
        hi, lo = dd_cumsum(rev)
        for p in range(1, P):
            k = P - p - 1
            suffix[p] = hi[k] + lo[k]
    return suffix


def estimate_x_star(trace: RecurrenceTrace) -> XStarEstimate:
    """Extrapolate a_p to x* and fill delta_p = (x*/a_p)^p - 1.

    Raises:
        InsufficientHorizon: If the trace stops before p = 100
    """
    if trace.P < X_STAR_MIN_P:
        raise InsufficientHorizon(
            f"x* estimation needs P >= {X_STAR_MIN_P}, got {trace.P}", {"P": trace.P}
        )
    p_fit, xi_fit = _fit_window(trace)
    try:
        spectrum = characteristic_spectrum(symmetrize(trace.f))
        exponents = tail_exponents(spectrum.roots)
    except (DegenerateKernel, RootFindingFailure) as e:
        logger.warning(f"No characteristic spectrum for the tail model ({e}); using a crude bound")
        exponents = ()

    if exponents and p_fit.size >= len(exponents) * 2 + 2:
        coefficients = fit_modes(p_fit, xi_fit, exponents)
        tail = modelled_tail(coefficients, exponents, trace.P)
        err_bound = abs(tail)
    else:
        coefficients = ()
        tail = 0.0
        err_bound = float(np.max(np.abs(xi_fit))) / (2.0 * trace.P ** 2) if xi_fit.size else math.inf

    log_x_star = float(trace.log_a[trace.P]) + tail
    suffix = _suffix_steps(trace.log_a_step, trace.P)
    p = np.arange(trace.P + 1, dtype=np.float64)
    delta = np.expm1(p * (suffix + tail))
    delta[0] = np.nan

    x_star = math.exp(log_x_star)
    logger.info(f"x* = {x_star:.17g} (tail {tail:.3g}, err_bound {err_bound:.3g})")
    filled = trace.with_x_star(x_star, log_x_star, err_bound, delta)
    return XStarEstimate(
        x_star=x_star, err_bound=err_bound, log_x_star=log_x_star, tail=tail,
        exponents=exponents, coefficients=coefficients, trace=filled,
    )


def compute_R(trace: RecurrenceTrace, x: float,
              alpha_f: Optional[float] = None) -> Tuple[float, np.ndarray]:
    """R = x/x* and C_p = (Lambda_p(x)/R^p - 1) p^alpha_f.

    By homogeneity Lambda_p(x)/R^p = c_p x*^p, so C_p = delta_p p^alpha_f for
    every x != 0.

    Raises:
        ZeroInput: If x == 0
    """
    if x == 0:
        raise ZeroInput("R is undefined for x = 0", {"x": x})
    if trace.x_star is None:
        trace = estimate_x_star(trace).trace
    if alpha_f is None:
        alpha_f = characteristic_spectrum(symmetrize(trace.f)).alpha_f
    p = np.arange(trace.P + 1, dtype=np.float64)
    Cp = trace.delta * p ** alpha_f
    return x / trace.x_star, Cp
