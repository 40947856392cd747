"""
Linearization of the recurrence around the normalizers.

Evaluating the recurrence at x = a_(p-1) gives Lambda_k(a_(p-1)) = 1 + D_k with

    D_k = prod_{k<q<p} (1 + xi_q/q^3)^k - 1,

and multiplying by p rearranges it exactly into R1 + R2 - Q = N:

    R1 = p - sum_{p1=1}^{p-1} f(p1/p)
    R2 = p ((1 + xi_p/p^3)^-p - 1)
    Q  = sum_{p1=1}^{p-2} f~(p1/p) D_p1
    N  = sum_{p1=1}^{p-1} f(p1/p) D_p1 D_(p-p1)

Products are exp(k * sum log(1 + xi_q/q^3)) with the logs summed once into
double-double prefix sums, so each D_k costs O(1).
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Tuple, Union

import numpy as np

from src.errors import ConfigurationError
from src.kernel.monomial import MonomialKernel
from src.kernel.polynomial import RealPolynomial, as_polynomial, kernel_G, symmetrize
from src.numerics.accumulate import dd_cumsum
from src.numerics.double_double import dd_from_fraction, dd_horner, dd_ratio, dd_sub, pairwise_sum
from src.recurrence.trace import RecurrenceTrace

logger = logging.getLogger(__name__)

Kernel = Union[RealPolynomial, MonomialKernel]


def _xi_of(source) -> np.ndarray:
    return np.asarray(source.xi if hasattr(source, "xi") else source)


def h_sequence(source, G: Kernel) -> np.ndarray:
    """h_p = xi_p - (1/p) sum_{q=2}^{p-1} G(q/p) xi_q for 3 <= p <= P.

    ``source`` is a recurrence or linear trace, or a xi array indexed by p.
    Entries past the last resolved xi are NaN.
    """
    xi = _xi_of(source)
    P = xi.size - 1
    h = np.full(P + 1, np.nan, dtype=xi.dtype)
    finite = np.isfinite(xi)
    for p in range(3, P + 1):
        if not finite[p] or not finite[p - 1]:
            break
        q = np.arange(2, p, dtype=np.float64)
        h[p] = xi[p] - np.dot(G(q / p), xi[2:p]) / p
    return h


def kernel_sums(source, G: Kernel, p: int) -> complex:
    """(1/p) sum_{q=2}^{p-1} G(q/p) xi_q."""
    xi = _xi_of(source)
    q = np.arange(2, p, dtype=np.float64)
    return np.dot(G(q / p), xi[2:p]) / p


def riemann_sum(f: RealPolynomial, p: int) -> float:
    """sum_{p1=1}^{p-1} f(p1/p) in double-double."""
    if p < 2:
        return 0.0
    hi, lo = _dd_poly_at(f, np.arange(1, p, dtype=np.float64), p)
    sh, sl = pairwise_sum(hi, lo)
    return sh + sl


def _dd_poly_at(f: RealPolynomial, p1: np.ndarray, p: int):
    coeffs = [dd_from_fraction(Fraction(c)) for c in f.coeffs]
    ch = np.array([c[0] for c in coeffs])
    cl = np.array([c[1] for c in coeffs])
    gh, gl = dd_ratio(p1, p)
    return dd_horner(ch, cl, gh, gl)


@dataclass(frozen=True, eq=False)
class ProductTable:
    """Double-double prefix sums T[k] = sum_{q=2}^{k} log(1 + xi_q/q^3), T[0] = T[1] = 0."""

    hi: np.ndarray
    lo: np.ndarray
    steps: np.ndarray
    xi: np.ndarray

    @classmethod
    def from_trace(cls, source) -> "ProductTable":
        xi = _xi_of(source).astype(np.float64)
        P = xi.size - 1
        p = np.arange(P + 1, dtype=np.float64)
        steps = np.zeros(P + 1)
        if isinstance(source, RecurrenceTrace):
            steps[2:] = source.log_a_step[2:]
        else:
            steps[2:] = np.log1p(xi[2:] / p[2:] ** 3)
        hi, lo = dd_cumsum(steps)
        return cls(hi=hi, lo=lo, steps=steps, xi=xi)

    @property
    def P(self) -> int:
        return self.xi.size - 1

    def log_products(self, k: np.ndarray, p: int) -> np.ndarray:
        """sum_{k<q<p} log(1 + xi_q/q^3) for each k < p."""
        h, l = dd_sub(self.hi[p - 1], self.lo[p - 1], self.hi[k], self.lo[k])
        return h + l

    def deviations(self, p: int) -> np.ndarray:
        """D_k = prod_{k<q<p}(1 + xi_q/q^3)^k - 1 for k = 0..p-1 (D_0 = 0)."""
        k = np.arange(p)
        return np.expm1(k * self.log_products(k, p))


@dataclass(frozen=True)
class DecompositionTerms:
    p: int
    R1: float
    R2: float
    Q: float
    Npp: float

    @property
    def residual(self) -> float:
        return abs(self.R1 + self.R2 - self.Q - self.Npp)

    @property
    def relative_residual(self) -> float:
        return self.residual / (1.0 + abs(self.Q))


def q_term(table: ProductTable, f_tilde: RealPolynomial, p: int) -> float:
    D = table.deviations(p)
    p1 = np.arange(1, p - 1)
    wh, wl = _dd_poly_at(f_tilde, p1.astype(np.float64), p)
    return float(np.dot(wh + wl, D[1:p - 1]))


def cross_term(table: ProductTable, weight: RealPolynomial, p: int) -> float:
    """sum_{p1=1}^{p-1} weight(p1/p) D_p1 D_(p-p1)."""
    D = table.deviations(p)
    p1 = np.arange(1, p)
    wh, wl = _dd_poly_at(weight, p1.astype(np.float64), p)
    return float(np.dot(wh + wl, D[p1] * D[p - p1]))


def decomposition_terms(trace, f, p: int, table: Optional[ProductTable] = None) -> DecompositionTerms:
    """R1, R2, Q and N at index p (3 <= p <= P) from the trace's xi."""
    f = as_polynomial(f)
    table = table or ProductTable.from_trace(trace)
    if not 3 <= p <= table.P:
        raise ConfigurationError(f"decomposition needs 3 <= p <= {table.P}, got {p}")
    f_tilde = symmetrize(f)

    R1 = p - riemann_sum(f, p)
    R2 = p * np.expm1(-p * table.steps[p])
    Q = q_term(table, f_tilde, p)

    Npp = cross_term(table, f, p)
    return DecompositionTerms(p=p, R1=float(R1), R2=float(R2), Q=Q, Npp=Npp)


def identity_residuals(trace, f, p_max: int) -> Tuple[np.ndarray, np.ndarray]:
    """Relative residuals of R1 + R2 - Q = N for p = 3..p_max."""
    table = ProductTable.from_trace(trace)
    p_max = min(p_max, table.P)
    ps = np.arange(3, p_max + 1)
    res = np.array([decomposition_terms(trace, f, int(p), table).relative_residual for p in ps])
    logger.debug(f"Decomposition identity: max relative residual {np.max(res, initial=0.0):.3g} up to p={p_max}")
    return ps, res


def r1_increments(f, p_max: int) -> Tuple[np.ndarray, np.ndarray]:
    """p (R1_p - R1_(p-1)) for p = 4..p_max."""
    f = as_polynomial(f)
    R1 = np.array([p - riemann_sum(f, p) if p >= 2 else 0.0 for p in range(p_max + 1)])
    ps = np.arange(4, p_max + 1)
    return ps, ps * (R1[4:] - R1[3:-1])


def r2_increment_profile(trace, p_max: Optional[int] = None) -> Tuple[np.ndarray, np.ndarray]:
    """p (R2_p - R2_(p-1)) + xi_p - (p/(p-1)) xi_(p-1) for p = 4..p_max; O(1/p^2)."""
    table = ProductTable.from_trace(trace)
    p_max = min(p_max or table.P, table.P)
    p = np.arange(p_max + 1, dtype=np.float64)
    R2 = p * np.expm1(-p * table.steps[:p_max + 1])
    xi = table.xi[:p_max + 1]
    ps = np.arange(4, p_max + 1)
    values = ps * (R2[4:] - R2[3:-1]) + xi[4:] - ps / (ps - 1.0) * xi[3:-1]
    return ps, values


def main_lemma_residual(trace, f_tilde, p: int, table: Optional[ProductTable] = None) -> float:
    """|p(Q_p - Q_(p-1)) - (p/(p-1)) xi_(p-1) + (1/p) sum_{q=2}^{p-1} G(q/p) xi_q|, p >= 4."""
    f_tilde = as_polynomial(f_tilde)
    table = table or ProductTable.from_trace(trace)
    if p < 4:
        raise ConfigurationError(f"main lemma residual needs p >= 4, got {p}")
    G = kernel_G(f_tilde)
    dQ = q_term(table, f_tilde, p) - q_term(table, f_tilde, p - 1)
    xi = table.xi
    return float(abs(p * dQ - p / (p - 1.0) * xi[p - 1] + kernel_sums(xi, G, p)))
