"""
Renormalized simulation of the quadratic convolution recurrence

    c_1 = 1,   c_p = (1/p) sum_{p1=1}^{p-1} f(p1/p) c_p1 c_(p-p1).

Pairs (p1, p - p1) are folded into one term with weight f~(p1/p), plus the
middle term f(1/2) c_(p/2)^2 for even p. Coefficients are stored as a
mantissa in [1, 2) and an int64 binary exponent. Because the recurrence is
degree homogeneous, multiplying every c_q by 2^(-t q) maps solutions onto
solutions; the engine applies such rescales whenever the newest exponent
leaves the renormalization window, so they only touch integer exponents and
never change a mantissa bit.
"""

import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from contextlib import nullcontext
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import mpmath
import numpy as np

from src.config import config
from src.errors import ConfigurationError, SignDegeneracy
from src.kernel.polynomial import RealPolynomial, as_polynomial, symmetrize
from src.numerics.double_double import (
    chunked_pairwise_sum,
    dd_div_d,
    dd_from_fraction,
    dd_horner,
    dd_ldexp,
    dd_mul,
    dd_ratio,
)
from src.recurrence.trace import RecurrenceTrace

logger = logging.getLogger(__name__)

PRECISIONS = ("double", "double-double")
LOG_PREC_BITS = 128
_MIN_SHIFT = -2100


@dataclass
class EngineConfig:
    """Settings of one recurrence run.

    Attributes:
        P: Horizon (>= 2)
        precision: "double" or "double-double"
        parallel: Reduce convolution chunks on a thread pool
        threads: Pool size when parallel (default RECURFLOW_THREADS)
        renorm_threshold: Exponent magnitude that triggers a rescale
        chunk_size: Terms per reduction chunk
        xi_double_limit: Largest p with xi reported in double precision
    """
    P: int
    precision: str = "double-double"
    parallel: bool = False
    threads: Optional[int] = None
    renorm_threshold: int = field(default_factory=lambda: config.engine.renorm_threshold)
    chunk_size: int = field(default_factory=lambda: config.engine.chunk_size)
    xi_double_limit: int = field(default_factory=lambda: config.engine.xi_double_limit)

    def __post_init__(self):
        if self.P < 2:
            raise ConfigurationError(f"Horizon P must be >= 2, got {self.P}")
        if self.precision not in PRECISIONS:
            raise ConfigurationError(f"Unknown precision {self.precision!r}, expected one of {PRECISIONS}")
        if self.renorm_threshold < 1:
            raise ConfigurationError("renorm_threshold must be >= 1")
        if self.chunk_size < 2:
            raise ConfigurationError("chunk_size must be >= 2")
        if self.threads is None:
            self.threads = config.engine.threads
        if self.threads < 1:
            raise ConfigurationError("threads must be >= 1")

    @property
    def workers(self) -> int:
        return self.threads if self.parallel else 1


class _Weights:
    """f~(p1/p) for 1 <= p1 < p/2 and f(1/2), in the run's precision."""

    def __init__(self, f: RealPolynomial, double_double: bool):
        f_tilde = symmetrize(f)
        self.double_double = double_double
        coeffs = [Fraction(c) for c in f_tilde.coeffs]
        self.coeffs = np.array([float(c) for c in coeffs])
        self.coeffs_hi = np.array([dd_from_fraction(c)[0] for c in coeffs])
        self.coeffs_lo = np.array([dd_from_fraction(c)[1] for c in coeffs])
        half = f(Fraction(1, 2)) if f.is_exact else Fraction(float(f(0.5)))
        self.half_hi, self.half_lo = dd_from_fraction(Fraction(half))

    def at(self, p: int, p1: np.ndarray):
        if self.double_double:
            gh, gl = dd_ratio(p1, p)
            wh, wl = dd_horner(self.coeffs_hi, self.coeffs_lo, gh, gl)
        else:
            gamma = p1 / p
            wh = np.polynomial.polynomial.polyval(gamma, self.coeffs)
            wl = np.zeros_like(wh)
        if p % 2 == 0:
            wh = np.append(wh, self.half_hi)
            wl = np.append(wl, self.half_lo if self.double_double else 0.0)
        return wh, wl


def _true_log(hi: float, lo: float, exponent: int, p: int, scale_log2: int) -> mpmath.mpf:
    return mpmath.log(mpmath.mpf(hi) + mpmath.mpf(lo)) + (exponent + p * scale_log2) * mpmath.ln2


def _build_trace(f, P, precision, hi, lo, ex, scale_log2, log_c, log_a, steps, xi, renorms):
    n = P + 1
    return RecurrenceTrace(
        f=f, P=P, precision=precision,
        mantissa_hi=hi[:n].copy(), mantissa_lo=lo[:n].copy(), exponent=ex[:n].copy(),
        scale_log2=scale_log2, log_c=log_c[:n].copy(), log_a=log_a[:n].copy(),
        log_a_step=steps[:n].copy(), a=np.exp(log_a[:n]), xi=xi[:n].copy(),
        renormalizations=renorms,
    )


def _check_assumption(f: RealPolynomial) -> None:
    integral_f = f.integral()
    integral_ft = symmetrize(f).integral()
    if abs(float(integral_f) - 1.0) > 1e-12 or abs(float(integral_ft) - 2.0) > 1e-12:
        logger.warning(f"f = {f} violates the normalization (int f = {float(integral_f):.6g}, "
                       f"int f~ = {float(integral_ft):.6g}); running anyway")


def run_recurrence(f, cfg: EngineConfig) -> RecurrenceTrace:
    """Simulate c_p = Lambda_p(1) for 1 <= p <= cfg.P.

    Args:
        f: Weight polynomial (RealPolynomial, "4,-10,6" or coefficient list)
        cfg: Engine settings

    Returns:
        RecurrenceTrace with c, a, xi filled (delta stays NaN until x* is estimated)

    Raises:
        SignDegeneracy: If some c_p <= 0; the trace up to p - 1 is attached
    """
    f = as_polynomial(f)
    _check_assumption(f)
    P = cfg.P
    dd = cfg.precision == "double-double"
    weights = _Weights(f, dd)

    hi = np.full(P + 1, np.nan)
    lo = np.zeros(P + 1)
    ex = np.zeros(P + 1, dtype=np.int64)
    log_c = np.full(P + 1, np.nan)
    log_a = np.full(P + 1, np.nan)
    steps = np.full(P + 1, np.nan)
    xi = np.full(P + 1, np.nan)
    q_idx = np.arange(P + 1, dtype=np.int64)

    hi[1], lo[1], ex[1] = 1.0, 0.0, 0
    log_c[1] = 0.0
    log_a[1] = 0.0
    scale_log2 = 0
    renorms = 0
    xi_limit = P if dd else min(P, cfg.xi_double_limit)

    start = time.perf_counter()
    logger.info(f"Running recurrence for f = {f} to P = {P} ({cfg.precision}, workers={cfg.workers})")
    pool = ThreadPoolExecutor(max_workers=cfg.workers) if cfg.workers > 1 else nullcontext()
    with pool as executor, mpmath.workprec(LOG_PREC_BITS):
        prev_log_a = mpmath.mpf(0)
        for p in range(2, P + 1):
            p1 = np.arange(1, (p - 1) // 2 + 1, dtype=np.int64)
            if p % 2 == 0:
                p1 = np.append(p1, p // 2)
            p2 = p - p1
            wh, wl = weights.at(p, p1[: (p - 1) // 2].astype(np.float64))

            term_ex = ex[p1] + ex[p2]
            top = int(term_ex.max())
            shift = np.maximum(term_ex - top, _MIN_SHIFT).astype(np.int32)
            if dd:
                th, tl = dd_mul(hi[p1], lo[p1], hi[p2], lo[p2])
                th, tl = dd_mul(th, tl, wh, wl)
                th, tl = dd_ldexp(th, tl, shift)
                sh, sl = chunked_pairwise_sum(th, tl, cfg.chunk_size, executor=executor)
                qh, ql = dd_div_d(sh, sl, float(p))
            else:
                terms = np.ldexp(wh * hi[p1] * hi[p2], shift)
                qh, ql = float(np.sum(terms)) / p, 0.0

            if not qh > 0.0:
                logger.error(f"Sign degeneracy at p={p}: c_p mantissa {qh!r}")
                raise SignDegeneracy(p, float(qh), _build_trace(
                    f, p - 1, cfg.precision, hi, lo, ex, scale_log2, log_c, log_a, steps, xi, renorms))

            m, e = math.frexp(qh)
            hi[p] = math.ldexp(qh, 1 - e)
            lo[p] = math.ldexp(ql, 1 - e)
            ex[p] = top + e - 1

            if abs(ex[p]) > cfg.renorm_threshold:
                t = int(round(ex[p] / p))
                if t != 0:
                    ex[: p + 1] -= t * q_idx[: p + 1]
                    scale_log2 += t
                    renorms += 1
                    logger.debug(f"Renormalized at p={p}: t={t}, scale_log2={scale_log2}")

            log_cp = _true_log(hi[p], lo[p], int(ex[p]), p, scale_log2)
            log_ap = -log_cp / p
            step = log_ap - prev_log_a
            prev_log_a = log_ap
            log_c[p] = float(log_cp)
            log_a[p] = float(log_ap)
            steps[p] = float(step)
            if p <= xi_limit:
                xi[p] = float(p ** 3 * mpmath.expm1(step))

            if p % 1024 == 0:
                logger.debug(f"p={p}: a_p={math.exp(log_a[p]):.15g}, xi_p={xi[p]:.6g}")

    elapsed = time.perf_counter() - start
    logger.info(f"Recurrence done: P={P}, a_P={math.exp(log_a[P]):.15g}, "
                f"{renorms} renormalizations, {elapsed:.2f}s")
    return _build_trace(f, P, cfg.precision, hi, lo, ex, scale_log2, log_c, log_a, steps, xi, renorms)
