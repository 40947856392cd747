"""
Explicit constants of the convergence argument, measured on a trace.

Every check compares a quantity computed from the trace with the bound the
argument claims for it, and reports the measured constant instead of asserting
a value for it. Floating-point slack is added where an inequality is tight.
"""

import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from src.errors import ConfigurationError, HypothesisViolated, InsufficientHorizon
from src.kernel.monomial import MonomialKernel
from src.kernel.polynomial import as_polynomial
from src.kernel.spectrum import sigma_of_kernel
from src.numerics.quadrature import c_sigma
from src.schemas import CheckResult
from src.verify.decomposition import ProductTable, cross_term, h_sequence, kernel_sums

logger = logging.getLogger(__name__)

EPS = float(np.finfo(np.float64).eps)
BASE_CASE_MARGIN = 0.5


def bound_ratio(lhs, rhs, slack=0.0):
    """max(lhs - slack, 0) / rhs elementwise, 0 where both sides vanish."""
    lhs = np.maximum(np.asarray(lhs, dtype=np.float64) - slack, 0.0)
    rhs = np.asarray(rhs, dtype=np.float64)
    safe = np.where(rhs > 0, rhs, 1.0)
    return np.where(rhs > 0, lhs / safe, np.where(lhs > 0, np.inf, 0.0))


def running_plateau(values: np.ndarray, rtol: float) -> Tuple[float, float, bool]:
    """(max over all, max over the first half, second half adds less than rtol)."""
    values = np.asarray(values, dtype=np.float64)
    if values.size == 0:
        return 0.0, 0.0, True
    top = float(np.max(values))
    half = float(np.max(values[: max(values.size // 2, 1)]))
    plateau = top - half <= rtol * half if half > 0 else top == 0.0
    return top, half, bool(plateau)


def last_finite(values: np.ndarray, start: int = 2) -> int:
    """Largest p such that values[start..p] are all finite (start - 1 if none is)."""
    values = np.asarray(values)
    bad = np.flatnonzero(~np.isfinite(values[start:]))
    return int(bad[0] + start - 1) if bad.size else values.size - 1


def sigma_of(G) -> float:
    """sigma(G) for a polynomial or monomial kernel."""
    kernel = G if isinstance(G, MonomialKernel) else MonomialKernel.from_polynomial(G)
    return sigma_of_kernel(kernel).sigma_G


# Assumption constants ------------------------------------------------------

@dataclass(frozen=True)
class AnsatzConstants:
    """Constants of the a-priori assumption on xi and of the inductive hypothesis on h.

    Attributes:
        A1: Bound on |xi_q| for q >= N0
        A2: Bound on the partial products prod_{p1<q<=N0} (1 + xi_q/q^3)^p1, p1 < N0
        A3: Bound on |xi_q| for q <= N0
        N0: Split index, at least max(3, A1)
        C4: Constant of |h_r| <= C4 r^(sigma(G) - epsilon)
        epsilon: Gap below the characteristic rate
        p0: Index past which the hypothesis holds with margin
    """

    A1: float
    A2: float
    A3: float
    N0: int
    C4: float = math.inf
    epsilon: float = 0.2
    p0: int = 2

    def violations(self, sigma_G: Optional[float] = None) -> List[str]:
        out = []
        if min(self.A1, self.A2, self.A3) <= 0:
            out.append("A1, A2 and A3 must be positive")
        if self.N0 < max(3.0, self.A1):
            out.append(f"N0 = {self.N0} is below max(3, A1) = {max(3.0, self.A1):.6g}")
        if sigma_G is not None:
            upper = 0.5 * min(1.0 + sigma_G, -sigma_G)
            if not 0.0 < self.epsilon < upper:
                out.append(f"epsilon = {self.epsilon} outside (0, {upper:.6g})")
        return out

    def validate(self, sigma_G: Optional[float] = None) -> "AnsatzConstants":
        problems = self.violations(sigma_G)
        if problems:
            raise ConfigurationError("; ".join(problems), {"constants": self.__dict__})
        return self


def _ansatz_measure(table: ProductTable, N0: int, p: int) -> Dict[str, Any]:
    xi = np.abs(table.xi)
    tail = xi[N0:p]
    p1 = np.arange(1, N0)
    log_products = p1 * table.log_products(p1, N0 + 1)
    return {
        "A1": float(np.max(tail)) if tail.size else 0.0,
        "A1_at": int(N0 + np.argmax(tail)) if tail.size else N0,
        "A2": float(np.max(np.exp(log_products))) if p1.size else 1.0,
        "A3": float(np.max(xi[2:N0 + 1])),
    }


def _table(trace, table: Optional[ProductTable]) -> ProductTable:
    return table if table is not None else ProductTable.from_trace(trace)


def fit_ansatz_constants(trace, N0: Optional[int] = None, p: Optional[int] = None,
                         table: Optional[ProductTable] = None) -> AnsatzConstants:
    """Smallest feasible A1, A2, A3; without N0 the first N0 >= max(3, A1(N0)) is used."""
    table = _table(trace, table)
    p = min(p or table.P + 1, last_finite(table.xi) + 1)
    if N0 is None:
        N0 = 3
        while N0 < p - 1 and N0 < float(np.max(np.abs(table.xi[N0:p]))):
            N0 += 1
    if not 3 <= N0 < p:
        raise InsufficientHorizon(f"need 3 <= N0 < p, got N0={N0}, p={p}", {"N0": N0, "p": p})
    m = _ansatz_measure(table, N0, p)
    return AnsatzConstants(A1=max(m["A1"], EPS), A2=max(m["A2"], EPS), A3=max(m["A3"], EPS), N0=N0)


def ansatz_check(trace, constants: AnsatzConstants, p: Optional[int] = None,
                 table: Optional[ProductTable] = None) -> CheckResult:
    """Check the three assumption items and the N0 condition on xi_2..xi_(p-1)."""
    table = _table(trace, table)
    p = min(p or table.P + 1, last_finite(table.xi) + 1)
    N0 = constants.N0
    if p <= N0:
        raise InsufficientHorizon(f"ansatz check needs p > N0 = {N0}, got {p}", {"p": p, "N0": N0})
    m = _ansatz_measure(table, N0, p)
    items = {
        "xi_bounded_beyond_N0": m["A1"] <= constants.A1,
        "xi_bounded_up_to_N0": m["A3"] <= constants.A3,
        "products_bounded": m["A2"] <= constants.A2,
        "N0_large_enough": N0 >= max(3.0, constants.A1),
    }
    ratio = max(m["A1"] / constants.A1, m["A2"] / constants.A2, m["A3"] / constants.A3)
    failed = [name for name, ok in items.items() if not ok]
    if failed:
        logger.warning(f"Ansatz check failed items: {failed}")
    return CheckResult(
        name="ansatz",
        passed=not failed,
        measured_constant=ratio,
        threshold=1.0,
        worst_p=m["A1_at"],
        details={"items": items, "feasible": {k: m[k] for k in ("A1", "A2", "A3")},
                 "N0": N0, "p": p},
    )


# Nonlinear term ------------------------------------------------------------

@dataclass(frozen=True)
class NonlinearConstants:
    """Constants of the nonlinear-term bound; sigma is -sigma(G), in (0, 1)."""

    C1: float
    C2: float
    N0: int
    sigma: float

    @property
    def N0_minimum(self) -> float:
        return max(self.C2 ** (1.0 / (1.0 + self.sigma)), (4.0 * self.C2) ** (1.0 / (3.0 + self.sigma)))


@dataclass(frozen=True)
class NonlinearBound:
    p: int
    actual: float
    bound: float

    @property
    def ratio(self) -> float:
        return self.actual / self.bound if self.bound > 0 else (0.0 if self.actual == 0 else math.inf)

    @property
    def holds(self) -> bool:
        return self.actual <= self.bound


def _nonlinear_measure(table: ProductTable, N0: int, p: int, sigma: float) -> Tuple[float, float]:
    p1 = np.arange(1, N0)
    C1 = float(np.max(np.abs(np.exp(p1 * table.log_products(p1, N0))))) if p1.size else 0.0
    q = np.arange(N0, p)
    C2 = float(np.max(np.abs(table.xi[q]) * q ** sigma)) if q.size else 0.0
    return C1, C2


def fit_nonlinear_constants(trace, sigma: float, p_max: Optional[int] = None,
                            table: Optional[ProductTable] = None) -> NonlinearConstants:
    """First N0 >= 3 whose measured C2 satisfies the N0 condition; C1, C2 measured up to p_max."""
    table = _table(trace, table)
    p = min(p_max or table.P, last_finite(table.xi)) + 1
    for N0 in range(3, p // 2 + 1):
        C1, C2 = _nonlinear_measure(table, N0, p, sigma)
        constants = NonlinearConstants(C1=C1, C2=C2, N0=N0, sigma=sigma)
        if N0 >= constants.N0_minimum:
            logger.debug(f"Nonlinear constants: N0={N0}, C1={C1:.6g}, C2={C2:.6g}")
            return constants
    raise InsufficientHorizon(f"no N0 <= {p // 2} satisfies the nonlinear-bound condition",
                              {"p_max": p - 1})


def nonlinear_bound_check(trace, f_tilde, constants: NonlinearConstants, p: int,
                          table: Optional[ProductTable] = None) -> NonlinearBound:
    """|N_p| against ||f~|| ((1+C1+C2) 2 N0^2 C2/(p-N0)^(2+s) + 4 C2^2 C_s/p^(1+2s)).

    Raises:
        HypothesisViolated: With the first hypothesis that fails on the trace
    """
    f_tilde = as_polynomial(f_tilde)
    table = _table(trace, table)
    s, N0 = constants.sigma, constants.N0
    if not 0.0 < s < 1.0:
        raise HypothesisViolated("sigma", f"sigma = {s} is outside (0, 1)", {"sigma": s})
    if p < 2 * N0 or p > table.P:
        raise HypothesisViolated("horizon", f"need 2 N0 = {2 * N0} <= p <= {table.P}, got {p}",
                                 {"p": p, "N0": N0})
    C1, C2 = _nonlinear_measure(table, N0, p, s)
    if C1 > constants.C1:
        raise HypothesisViolated("product_bound", f"partial products reach {C1:.6g} > C1",
                                 {"measured": C1, "C1": constants.C1})
    if C2 > constants.C2:
        raise HypothesisViolated("xi_decay", f"max |xi_q| q^sigma = {C2:.6g} > C2",
                                 {"measured": C2, "C2": constants.C2})
    if N0 < constants.N0_minimum:
        raise HypothesisViolated("N0", f"N0 = {N0} below {constants.N0_minimum:.6g}",
                                 {"N0": N0, "minimum": constants.N0_minimum})

    actual = abs(0.5 * cross_term(table, f_tilde, p))
    bound = f_tilde.sup_norm() * (
        (1.0 + constants.C1 + constants.C2) * 2.0 * N0 ** 2 * constants.C2 / (p - N0) ** (2.0 + s)
        + 4.0 * constants.C2 ** 2 * c_sigma(s) / p ** (1.0 + 2.0 * s)
    )
    return NonlinearBound(p=p, actual=actual, bound=bound)


# Inductive hypothesis ------------------------------------------------------

@dataclass(frozen=True)
class BaseCaseResult:
    """Measured constants of |h_r| <= C4 r^(sigma(G) - epsilon).

    p0 is the last r where |h_r| r^(epsilon - sigma) exceeds half of C4, so past
    it the hypothesis holds with a factor-two margin.
    """

    C4: float
    epsilon: float
    p0: int
    horizon: int
    sigma_G: float
    worst_r: int
    hypothesis_holds: bool
    epsilon_admissible: bool

    @property
    def passed(self) -> bool:
        return (math.isfinite(self.C4) and self.hypothesis_holds and self.epsilon_admissible
                and self.horizon >= 2 * self.p0)

    def to_check(self) -> CheckResult:
        return CheckResult(
            name="base_case",
            passed=self.passed,
            measured_constant=self.C4,
            threshold=None,
            worst_p=self.worst_r,
            details={"epsilon": self.epsilon, "p0": self.p0, "horizon": self.horizon,
                     "sigma_G": self.sigma_G, "hypothesis_holds": self.hypothesis_holds,
                     "epsilon_admissible": self.epsilon_admissible},
        )


def base_case_verifier(trace, G, constants: AnsatzConstants,
                       sigma_G: Optional[float] = None) -> BaseCaseResult:
    """Smallest feasible C4 over the horizon for constants.epsilon, and the p0 it implies.

    With a finite ``constants.C4`` the hypothesis is also checked against it.
    """
    sigma = sigma_of(G) if sigma_G is None else sigma_G
    eps = constants.epsilon
    h = h_sequence(trace, G)
    horizon = last_finite(h, start=3)
    r = np.arange(3, horizon + 1, dtype=np.float64)
    scaled = np.abs(h[3:horizon + 1]) * r ** (eps - sigma)

    if scaled.size == 0 or not np.any(scaled > 0):
        C4, p0, worst = 0.0, 2, 2
    else:
        idx = int(np.argmax(scaled))
        C4, worst = float(scaled[idx]), int(r[idx])
        above = np.flatnonzero(scaled > BASE_CASE_MARGIN * C4)
        p0 = int(r[above[-1]])

    holds = C4 <= constants.C4 if math.isfinite(constants.C4) else True
    admissible = 0.0 < eps < 0.5 * min(1.0 + sigma, -sigma)
    result = BaseCaseResult(C4=C4, epsilon=eps, p0=p0, horizon=horizon, sigma_G=sigma,
                            worst_r=worst, hypothesis_holds=holds, epsilon_admissible=admissible)
    logger.info(f"Base case: C4={C4:.6g} (epsilon={eps}), p0={p0}, horizon={horizon}")
    return result


# xi-hat --------------------------------------------------------------------

def hat_xi_value(xi, p):
    """-p^2 ((1 + xi/p^3)^-p - 1), elementwise."""
    xi = np.asarray(xi, dtype=np.float64)
    p = np.asarray(p, dtype=np.float64)
    return -p * p * np.expm1(-p * np.log1p(xi / p ** 3))


def hat_xi(trace, p: int) -> float:
    """xi-hat_p of a trace, p >= 2."""
    if p < 2:
        raise ConfigurationError(f"xi-hat is defined for p >= 2, got {p}")
    return float(hat_xi_value(np.asarray(trace.xi)[p], p))


def hat_xi_bound_check(trace, p_max: Optional[int] = None) -> CheckResult:
    """|xi-hat_p - xi_p| <= 5 xi_p^2/(4 p^2) wherever p >= max(2 sqrt|xi_p|, 7)."""
    xi = np.asarray(trace.xi if hasattr(trace, "xi") else trace, dtype=np.float64)
    top = min(p_max or xi.size - 1, last_finite(xi))
    p = np.arange(7, top + 1, dtype=np.float64)
    x = xi[7:top + 1]
    admissible = p >= 2.0 * np.sqrt(np.abs(x))
    p, x = p[admissible], x[admissible]
    hx = hat_xi_value(x, p)
    ratio = bound_ratio(np.abs(hx - x), 1.25 * x * x / (p * p), 8.0 * EPS * (np.abs(x) + np.abs(hx)))
    idx = int(np.argmax(ratio)) if ratio.size else 0
    measured = float(ratio[idx]) if ratio.size else 0.0
    return CheckResult(
        name="hat_xi_bound",
        passed=measured <= 1.0,
        measured_constant=measured,
        threshold=1.0,
        worst_p=int(p[idx]) if ratio.size else None,
        details={"checked": int(p.size), "skipped": int(np.count_nonzero(~admissible))},
    )


def root_correction_sides(x, p) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(lhs, rhs, slack) of |p^3((1 + x/p^2)^(-1/p) - 1) + x| <= 5 x^2/(4 p^2)."""
    x = np.asarray(x, dtype=np.float64)
    p = np.asarray(p, dtype=np.float64)
    term = p ** 3 * np.expm1(-np.log1p(x / (p * p)) / p)
    lhs = np.abs(term + x)
    return lhs, 1.25 * x * x / (p * p), 8.0 * EPS * (np.abs(term) + np.abs(x))


def inductive_step_check(trace, G, epsilon: float, sigma_G: Optional[float] = None,
                         p_min: int = 10, rtol: float = 0.05) -> CheckResult:
    """C5 = max_p |xi-hat_p - (1/p) sum G(q/p) xi_q| p^(2 epsilon - sigma(G)), with a plateau test."""
    sigma = sigma_of(G) if sigma_G is None else sigma_G
    xi = np.asarray(trace.xi, dtype=np.float64)
    top = last_finite(xi)
    ps = np.arange(p_min, top + 1)
    if ps.size == 0:
        raise InsufficientHorizon(f"inductive step check needs horizon >= {p_min}", {"P": top})
    gap = np.array([abs(hat_xi_value(xi[p], p) - kernel_sums(xi, G, int(p))) for p in ps])
    scaled = gap * ps.astype(np.float64) ** (2.0 * epsilon - sigma)
    C5, half, plateau = running_plateau(scaled, rtol)
    return CheckResult(
        name="inductive_step",
        passed=bool(math.isfinite(C5) and plateau),
        measured_constant=C5,
        threshold=rtol,
        worst_p=int(ps[int(np.argmax(scaled))]),
        details={"epsilon": epsilon, "sigma_G": sigma, "first_half_max": half, "plateau": plateau},
    )


# Quadrature error of the first-moment sum ----------------------------------

@dataclass(frozen=True)
class E3Bound:
    p: int
    lhs: float
    rhs: float

    @property
    def holds(self) -> bool:
        return self.lhs <= self.rhs


def e3_bound_check(f_tilde, p: int) -> E3Bound:
    """|sum_{p1=1}^{p-2} f~(p1/p) p1/(p-1)^2 - int f~ gamma| <= ||f~'||/(4(p-1)) + 3||f~||/(2(p-1))."""
    if p < 4:
        raise ConfigurationError(f"the first-moment quadrature bound needs p >= 4, got {p}")
    f_tilde = as_polynomial(f_tilde)
    p1 = np.arange(1, p - 1, dtype=np.float64)
    total = math.fsum(f_tilde(p1 / p) * p1) / (p - 1.0) ** 2
    lhs = abs(total - float(f_tilde.moment(1)))
    rhs = f_tilde.derivative().sup_norm() / (4.0 * (p - 1)) + 1.5 * f_tilde.sup_norm() / (p - 1)
    return E3Bound(p=p, lhs=lhs, rhs=rhs)
