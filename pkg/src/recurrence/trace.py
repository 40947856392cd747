"""
Recurrence traces.

All per-index arrays have length P + 1 and are indexed by p directly; index 0
is unused and holds NaN (or 0 for integer arrays). The engine stores the
renormalized coefficients c^_p = mantissa_p * 2**exponent_p, related to the
true c_p = Lambda_p(1) by c_p = c^_p * 2**(p * scale_log2).
"""

import math
from dataclasses import dataclass, field, replace
from typing import Optional, Tuple

import numpy as np

from src.errors import ConfigurationError
from src.kernel.polynomial import RealPolynomial
from src.numerics.accumulate import dd_cumsum
from src.numerics.scaled import ScaledReal, normalize_arrays

LN2 = math.log(2.0)


def _nan(n: int) -> np.ndarray:
    return np.full(n, np.nan)


def scaled_from_log(log_c: np.ndarray):
    """Mantissa in [1, 2) and binary exponent of exp(log_c), entry 0 left unset."""
    log2c = np.where(np.isfinite(log_c), log_c, 0.0) / LN2
    whole = np.floor(log2c)
    mantissa, exponent = normalize_arrays(np.exp2(log2c - whole), whole.astype(np.int64))
    mantissa[0] = np.nan
    exponent[0] = 0
    return mantissa, exponent


@dataclass(frozen=True, eq=False)
class RecurrenceTrace:
    """Coefficients c_p = Lambda_p(1) and the quantities derived from them.

    Attributes:
        f: Weight polynomial of the recurrence
        P: Horizon
        precision: "double", "double-double" or the name of the source it was rebuilt from
        mantissa_hi, mantissa_lo: Renormalized mantissas in [1, 2)
        exponent: Renormalized binary exponents
        scale_log2: Accumulated per-index rescale, as a power of two
        log_c: True natural log of c_p
        log_a: log a_p = -log c_p / p
        log_a_step: log a_p - log a_(p-1), computed before rounding to double
        a: Normalizers a_p with Lambda_p(a_p) = 1
        xi: p^3 (a_p/a_(p-1) - 1); NaN where not resolved at the run's precision
        delta: (x*/a_p)^p - 1 once x* is estimated, NaN before
        x_star, log_x_star, x_star_err: Estimated limit of a_p and its tail bound
        renormalizations: Number of rescale events during the build
    """

    f: RealPolynomial
    P: int
    precision: str
    mantissa_hi: np.ndarray
    mantissa_lo: np.ndarray
    exponent: np.ndarray
    scale_log2: int
    log_c: np.ndarray
    log_a: np.ndarray
    log_a_step: np.ndarray
    a: np.ndarray
    xi: np.ndarray
    delta: np.ndarray = field(default=None)
    x_star: Optional[float] = None
    log_x_star: Optional[float] = None
    x_star_err: Optional[float] = None
    renormalizations: int = 0

    def __post_init__(self):
        if self.delta is None:
            object.__setattr__(self, "delta", _nan(self.P + 1))

    @property
    def scale_offset(self) -> float:
        """Per-index natural-log rescale: log c_p = log c^_p + p * scale_offset."""
        return self.scale_log2 * LN2

    @property
    def c(self) -> Tuple[ScaledReal, ...]:
        """Renormalized c^_p for p = 0..P (entry 0 is zero)."""
        out = [ScaledReal.zero()]
        for p in range(1, self.P + 1):
            out.append(ScaledReal.from_float(float(self.mantissa_hi[p]), int(self.exponent[p])))
        return tuple(out)

    def c_true(self, p: int) -> ScaledReal:
        """c_p = Lambda_p(1) with the rescale folded back in (exact, it is a power of two)."""
        return ScaledReal.from_float(float(self.mantissa_hi[p]),
                                     int(self.exponent[p]) + p * self.scale_log2)

    def lambda_at(self, p: int, x: float) -> float:
        """Lambda_p(x) = c_p x^p, by homogeneity."""
        if x == 0:
            return 0.0
        sign = -1.0 if (x < 0 and p % 2) else 1.0
        return sign * math.exp(self.log_c[p] + p * math.log(abs(x)))

    @property
    def indices(self) -> np.ndarray:
        return np.arange(self.P + 1)

    def with_x_star(self, x_star: float, log_x_star: float, err: float,
                    delta: np.ndarray) -> "RecurrenceTrace":
        return replace(self, x_star=x_star, log_x_star=log_x_star, x_star_err=err, delta=delta)

    def truncated(self, P: int) -> "RecurrenceTrace":
        """The same trace cut at horizon P (x* and delta are dropped)."""
        n = P + 1
        return RecurrenceTrace(
            f=self.f, P=P, precision=self.precision,
            mantissa_hi=self.mantissa_hi[:n].copy(), mantissa_lo=self.mantissa_lo[:n].copy(),
            exponent=self.exponent[:n].copy(), scale_log2=self.scale_log2,
            log_c=self.log_c[:n].copy(), log_a=self.log_a[:n].copy(),
            log_a_step=self.log_a_step[:n].copy(), a=self.a[:n].copy(), xi=self.xi[:n].copy(),
            renormalizations=self.renormalizations,
        )

    # alternative constructors -------------------------------------------

    @classmethod
    def from_log_steps(cls, log_a_step: np.ndarray, f: RealPolynomial, a1: float = 1.0,
                       xi: Optional[np.ndarray] = None, source: str = "xi") -> "RecurrenceTrace":
        """Rebuild a trace from log a_p - log a_(p-1), p = 2..P."""
        steps = np.asarray(log_a_step, dtype=np.float64).copy()
        P = steps.size - 1
        if P < 1:
            raise ValueError("a trace needs at least p = 1")
        steps[:2] = np.nan
        p = np.arange(P + 1, dtype=np.float64)

        log_a = _nan(P + 1)
        log_a[1] = math.log(a1)
        if P >= 2:
            hi, lo = dd_cumsum(steps[2:])
            log_a[2:] = (hi + lo) + math.log(a1)
        log_c = -p * log_a
        log_c[0] = np.nan

        mantissa, exponent = scaled_from_log(log_c)

        if xi is None:
            xi = _nan(P + 1)
            xi[2:] = p[2:] ** 3 * np.expm1(steps[2:])
        return cls(
            f=f, P=P, precision=source,
            mantissa_hi=mantissa, mantissa_lo=np.zeros(P + 1), exponent=exponent, scale_log2=0,
            log_c=log_c, log_a=log_a, log_a_step=steps, a=np.exp(log_a), xi=np.asarray(xi, dtype=np.float64),
        )

    @classmethod
    def from_xi(cls, xi: np.ndarray, f: RealPolynomial, a1: float = 1.0) -> "RecurrenceTrace":
        """Synthetic trace with the given fluctuations: a_p = a_(p-1)(1 + xi_p/p^3).

        ``xi`` is indexed by p; entries 0 and 1 are ignored.
        """
        xi = np.asarray(xi, dtype=np.float64).copy()
        xi[:2] = np.nan
        p = np.arange(xi.size, dtype=np.float64)
        steps = _nan(xi.size)
        steps[2:] = np.log1p(xi[2:] / p[2:] ** 3)
        return cls.from_log_steps(steps, f, a1=a1, xi=xi, source="xi")

    @classmethod
    def from_columns(cls, f: RealPolynomial, log_c: np.ndarray, a: np.ndarray, xi: np.ndarray,
                     delta: Optional[np.ndarray] = None, source: str = "csv") -> "RecurrenceTrace":
        """Trace from exported columns; steps come from xi where it is resolved.

        Raises:
            ConfigurationError: If the columns are empty or of different lengths
        """
        log_c = np.asarray(log_c, dtype=np.float64)
        xi = np.asarray(xi, dtype=np.float64)
        a = np.asarray(a, dtype=np.float64)
        sizes = {log_c.size, a.size, xi.size}
        if delta is not None:
            delta = np.asarray(delta, dtype=np.float64)
            sizes.add(delta.size)
        if len(sizes) != 1:
            raise ConfigurationError("trace columns differ in length",
                                     {"log_c": log_c.size, "a": a.size, "xi": xi.size})
        if log_c.size < 2:
            raise ConfigurationError("trace columns hold no rows", {"rows": max(log_c.size - 1, 0)})
        P = log_c.size - 1
        p = np.arange(P + 1, dtype=np.float64)
        log_a = _nan(P + 1)
        log_a[1:] = -log_c[1:] / p[1:]
        steps = _nan(P + 1)
        if P >= 2:
            steps[2:] = np.where(np.isfinite(xi[2:]), np.log1p(xi[2:] / p[2:] ** 3), np.diff(log_a[1:]))
        mantissa, exponent = scaled_from_log(log_c)
        trace = cls(
            f=f, P=P, precision=source,
            mantissa_hi=mantissa, mantissa_lo=np.zeros(P + 1), exponent=exponent, scale_log2=0,
            log_c=log_c, log_a=log_a, log_a_step=steps, a=a, xi=xi,
        )
        if delta is not None and np.isfinite(delta[1]):
            x_star = float(a[1]) * (1.0 + float(delta[1]))
            trace = trace.with_x_star(x_star, math.log(x_star), None, delta)
        return trace

    @classmethod
    def from_log_c(cls, log_c: np.ndarray, f: RealPolynomial) -> "RecurrenceTrace":
        """Trace from true log c_p, p = 0..P (entry 0 ignored)."""
        log_c = np.asarray(log_c, dtype=np.float64)
        p = np.arange(log_c.size, dtype=np.float64)
        log_a = _nan(log_c.size)
        log_a[1:] = -log_c[1:] / p[1:]
        steps = _nan(log_c.size)
        steps[2:] = np.diff(log_a[1:])
        return cls.from_log_steps(steps, f, a1=math.exp(log_a[1]) if log_c.size > 1 else 1.0,
                                  source="log_c")
