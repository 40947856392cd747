"""
Randomized checks of the elementary inequalities and product-deviation bounds.

Each item draws seeded samples from the inequality's stated domain (plus its
endpoints), evaluates both sides, and reports the worst sample as the witness.
Scalar inequalities report the largest excess lhs - rhs against a threshold of
0; bounds with a positive right side report the largest ratio lhs/rhs against
a threshold of 1. A few ulps of slack absorb rounding where an inequality is an
equality at the origin.
"""

import logging
import math
from typing import Callable, Dict, Tuple

import numpy as np
from scipy.special import zeta

from src.errors import ConfigurationError
from src.schemas import CheckResult
from src.verify.bounds import EPS, bound_ratio, hat_xi_value, root_correction_sides

logger = logging.getLogger(__name__)

BATCH = 10_000
MAX_INDEX = 64
MAX_CONSTANT = 6.0
N0_OFFSETS = 5
A2_D1 = (1.0, 4.0, 16.0)


def _witness(inputs: Dict[str, np.ndarray], i: int) -> Dict[str, float]:
    return {k: float(v[i]) for k, v in inputs.items()}


def _excess_result(name: str, lhs: np.ndarray, rhs: np.ndarray, slack: np.ndarray,
                   inputs: Dict[str, np.ndarray]) -> CheckResult:
    excess = lhs - rhs
    i = int(np.argmax(excess - slack))
    return CheckResult(
        name=name,
        passed=bool(excess[i] - slack[i] <= 0.0),
        measured_constant=float(np.max(excess)),
        threshold=0.0,
        details={"samples": int(lhs.size), "witness": _witness(inputs, i)},
    )


def _ratio_result(name: str, ratio: np.ndarray, inputs: Dict[str, np.ndarray]) -> CheckResult:
    i = int(np.argmax(ratio))
    return CheckResult(
        name=name,
        passed=bool(ratio[i] <= 1.0),
        measured_constant=float(ratio[i]),
        threshold=1.0,
        details={"samples": int(ratio.size), "witness": _witness(inputs, i)},
    )


def _uniform(rng: np.random.Generator, lo: float, hi: float, n: int, *edges: float) -> np.ndarray:
    return np.concatenate([np.asarray(edges, dtype=np.float64), rng.uniform(lo, hi, n)])


def _open_uniform(rng: np.random.Generator, lo: float, hi: float, n: int) -> np.ndarray:
    """Samples in (lo, hi]."""
    return hi - (hi - lo) * rng.random(n)


# Elementary inequalities ----------------------------------------------------

def check_log1p_upper(rng: np.random.Generator, n: int) -> CheckResult:
    """log(1 + x) <= x for x > -1."""
    x = np.concatenate([[0.0, 1e-300, -1.0 + 1e-12], _open_uniform(rng, -1.0, 10.0, n)])
    return _excess_result("log1p_upper", np.log1p(x), x, 2.0 * EPS * np.abs(x), {"x": x})


def check_power_sum(rng: np.random.Generator, n: int) -> CheckResult:
    """sum_{q=N+1}^{M} q^(-alpha-1) <= (N^-alpha - M^-alpha)/alpha for M > N >= 1, alpha > 0."""
    alpha = rng.uniform(0.05, 3.0, n)
    N = rng.integers(1, 1001, n).astype(np.float64)
    M = N + rng.integers(1, 10_001, n)
    lhs = zeta(alpha + 1.0, N + 1.0) - zeta(alpha + 1.0, M + 1.0)
    rhs = -np.expm1(-alpha * np.log(M / N)) * N ** -alpha / alpha
    slack = 16.0 * EPS * (zeta(alpha + 1.0, N + 1.0) + np.abs(rhs))
    return _excess_result("power_sum", lhs, rhs, slack, {"alpha": alpha, "N": N, "M": M})


def _scalar_check(name: str, lo: float, hi: float, lhs: Callable, rhs: Callable,
                  rng: np.random.Generator, n: int) -> CheckResult:
    x = _uniform(rng, lo, hi, n, 0.0, lo, hi)
    left, right = lhs(x), rhs(x)
    slack = 4.0 * EPS * (np.abs(left) + np.abs(right))
    return _excess_result(name, left, right, slack, {"x": x})


ELEMENTARY = {
    "exp_half": (0.0, 1.0, lambda x: np.exp(x / 2.0), lambda x: 1.0 + x),
    "exp_double": (-0.25, 0.0, lambda x: np.exp(2.0 * x), lambda x: 1.0 + x),
    "log_double": (-0.25, 0.0, lambda x: 2.0 * x, np.log1p),
    "exp_quadratic": (-0.5, 0.5, np.exp, lambda x: 1.0 + x + x * x),
    "log_lower": (-0.25, 0.25, lambda x: x - x * x, np.log1p),
}


# Root correction -------------------------------------------------------------

def _a2_samples(rng: np.random.Generator, n: int, D1: float) -> Tuple[np.ndarray, np.ndarray]:
    p_min = max(math.ceil(2.0 * math.sqrt(D1)), 7)
    p = np.floor(np.exp(rng.uniform(math.log(p_min), math.log(10_000.0), n)))
    p = np.maximum(p, p_min)
    x = rng.uniform(-D1, D1, n)
    x[: min(4, n)] = [D1, -D1, 0.0, D1][: min(4, n)]
    p[: min(4, n)] = p_min
    return x, p


def check_root_correction(rng: np.random.Generator, n: int) -> CheckResult:
    """|p^3((1 + x/p^2)^(-1/p) - 1) + x| <= 5x^2/(4p^2) for |x| <= D1, p >= max(2 sqrt(D1), 7)."""
    xs, ps, ds = [], [], []
    for D1 in A2_D1:
        x, p = _a2_samples(rng, n, D1)
        xs.append(x)
        ps.append(p)
        ds.append(np.full(n, D1))
    x, p, D = np.concatenate(xs), np.concatenate(ps), np.concatenate(ds)
    lhs, rhs, slack = root_correction_sides(x, p)
    return _ratio_result("root_correction", bound_ratio(lhs, rhs, slack), {"x": x, "p": p, "D1": D})


def check_hat_xi_correction(rng: np.random.Generator, n: int) -> CheckResult:
    """|xi-hat - xi| <= 5 xi^2/(4p^2) for |xi| <= D1, p >= max(2 sqrt(D1), 7)."""
    xs, ps, ds = [], [], []
    for D1 in A2_D1:
        x, p = _a2_samples(rng, n, D1)
        xs.append(x)
        ps.append(p)
        ds.append(np.full(n, D1))
    x, p, D = np.concatenate(xs), np.concatenate(ps), np.concatenate(ds)
    hx = hat_xi_value(x, p)
    ratio = bound_ratio(np.abs(hx - x), 1.25 * x * x / (p * p), 8.0 * EPS * (np.abs(x) + np.abs(hx)))
    return _ratio_result("hat_xi_correction", ratio, {"xi": x, "p": p, "D1": D})


# Product-deviation lemmas ---------------------------------------------------

class _ProductBatch:
    """A batch of admissible sequences xi_q, q = 0..MAX_INDEX, with per-sample (A, N0, p).

    |xi_q| <= A for q >= N0 and |xi_q| <= A3 for q < N0. One third of the
    samples use a constant-sign extreme sequence xi_q = +-A beyond N0.
    """

    def __init__(self, rng: np.random.Generator, n: int, min_N0: int = 1):
        self.n = n
        self.A = _open_uniform(rng, 0.0, MAX_CONSTANT, n)
        self.N0 = np.maximum(np.ceil(np.maximum(1.0, self.A)), min_N0) + rng.integers(0, N0_OFFSETS, n)
        self.p = np.floor(rng.uniform(self.N0 + 3, MAX_INDEX + 1)).astype(np.float64)
        self.p = np.minimum(self.p, MAX_INDEX)
        A3_draw = _open_uniform(rng, 0.0, MAX_CONSTANT, n)

        q = np.arange(MAX_INDEX + 1, dtype=np.float64)
        self.q = q
        u = rng.uniform(-1.0, 1.0, (n, q.size))
        extreme = rng.random(n) < 1.0 / 3.0
        signs = np.where(rng.random(n) < 0.5, -1.0, 1.0)
        u[extreme] = signs[extreme, None]
        beyond = q[None, :] >= self.N0[:, None]
        xi = np.where(beyond, self.A[:, None] * u, A3_draw[:, None] * u)
        xi[:, :2] = 0.0
        xi[q[None, :] >= self.p[:, None]] = 0.0
        self.xi = xi

        up_to_N0 = (q[None, :] >= 2) & (q[None, :] <= self.N0[:, None])
        self.A3 = np.max(np.where(up_to_N0, np.abs(xi), 0.0), axis=1)

        ratio = xi / np.maximum(q, 1.0) ** 3
        logs = np.log1p(ratio)
        # suffix[:, j] = sum_{q >= j} over q < p; entries at q >= p are zero
        self.log_suffix = np.concatenate([np.cumsum(logs[:, ::-1], axis=1)[:, ::-1],
                                          np.zeros((n, 1))], axis=1)
        self.lin_suffix = np.concatenate([np.cumsum(ratio[:, ::-1], axis=1)[:, ::-1],
                                          np.zeros((n, 1))], axis=1)
        self.p1 = q[None, :]

        # A2 = max_{1<=p1<=N0} prod_{p1<q<=N0} (1 + xi_q/q^3)^p1
        inner = np.where(q[None, :] <= self.N0[:, None], logs, 0.0)
        inner_suffix = np.concatenate([np.cumsum(inner[:, ::-1], axis=1)[:, ::-1],
                                       np.zeros((n, 1))], axis=1)
        head = (q[None, :] >= 1) & (q[None, :] <= self.N0[:, None])
        self.A2 = np.max(np.where(head, np.exp(q[None, :] * inner_suffix[:, 1:]), 0.0), axis=1)

    def log_products(self) -> np.ndarray:
        """p1 * sum_{p1<q<p} log(1 + xi_q/q^3), indexed [sample, p1]."""
        return self.p1 * self.log_suffix[:, 1:]

    def deviations(self) -> np.ndarray:
        return np.expm1(self.log_products())

    def linear(self) -> np.ndarray:
        """p1 * sum_{p1<q<p} xi_q/q^3."""
        return self.p1 * self.lin_suffix[:, 1:]

    def mask(self, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
        return (self.p1 >= lo[:, None]) & (self.p1 <= hi[:, None])

    def inputs(self) -> Dict[str, np.ndarray]:
        return {"A": self.A, "N0": self.N0, "p": self.p, "A2": self.A2, "A3": self.A3}


def _product_items(batch: _ProductBatch) -> Dict[str, Tuple[np.ndarray, Dict[str, np.ndarray]]]:
    D = batch.deviations()
    lin = batch.linear()
    p1 = batch.p1
    p, N0, A = batch.p, batch.N0, batch.A
    out = {}

    # |prod - 1| <= A/p1 for N0 <= p1 < p
    m = batch.mask(N0, p - 1)
    r = bound_ratio(np.abs(D), A[:, None] / np.maximum(p1, 1.0), 4.0 * EPS * (1.0 + np.abs(D)))
    worst = np.max(np.where(m, r, 0.0), axis=1)
    out["product_deviation"] = worst

    # sum_{N0<=p1<=p-3} gamma^2/(p-1)^2 |prod - 1| <= A/(2p^2)
    w2 = (p1 / p[:, None]) ** 2 / ((p - 1.0) ** 2)[:, None]
    m = batch.mask(N0, p - 3)
    lhs = np.sum(np.where(m, w2 * np.abs(D), 0.0), axis=1)
    out["weighted_deviation"] = bound_ratio(lhs, A / (2.0 * p * p), 8.0 * EPS * lhs)

    # the same sum from p1 = 1, with A1 = A
    m = batch.mask(np.ones_like(N0), p - 3)
    lhs = np.sum(np.where(m, w2 * np.abs(D), 0.0), axis=1)
    rhs = A / (2.0 * p * p) + N0 ** 3 / (3.0 * (p - 1.0) ** 2 * p * p) * (1.0 + batch.A2 * (1.0 + A / N0))
    out["weighted_deviation_full"] = bound_ratio(lhs, rhs, 8.0 * EPS * lhs)

    # |prod - (1 + p1 sum xi_q/q^3)| <= A^2/(4 p1^2) for N0 <= p1 < p
    m = batch.mask(N0, p - 1)
    err = np.abs(D - lin)
    r = bound_ratio(err, (A * A)[:, None] / (4.0 * np.maximum(p1, 1.0) ** 2),
                    8.0 * EPS * (np.abs(D) + np.abs(lin)))
    out["linearized_deviation"] = np.max(np.where(m, r, 0.0), axis=1)

    # sum_{1<=p1<=p-3} gamma/(p-1) |prod - (1 + p1 sum)| with A1 = A
    m = batch.mask(np.ones_like(N0), p - 3)
    w1 = p1 / (p * (p - 1.0))[:, None]
    lhs = np.sum(np.where(m, w1 * err, 0.0), axis=1)
    A2, A3 = batch.A2, batch.A3
    rhs = (A * A * np.log(p - 3.0) / (4.0 * p * (p - 1.0))
           + ((1.0 + A2) / 2.0 * N0 ** 2 + ((3.0 * A2 + 1.0) * A + 3.0 * A3) / 6.0 * N0) / (p * (p - 1.0)))
    out["linearized_weighted"] = bound_ratio(lhs, rhs, 8.0 * EPS * lhs)
    return {name: (ratio, batch.inputs()) for name, ratio in out.items()}


def check_product_lemmas(rng: np.random.Generator, n: int) -> Dict[str, CheckResult]:
    """Product-deviation bounds on ``n`` random admissible sequences per item."""
    merged: Dict[str, Tuple[list, Dict[str, list]]] = {}
    done = 0
    while done < n:
        size = min(BATCH, n - done)
        # the log(p - 3) bound needs N0 >= 3
        items = _product_items(_ProductBatch(rng, size, min_N0=3))
        for name, (ratio, inputs) in items.items():
            ratios, acc = merged.setdefault(name, ([], {k: [] for k in inputs}))
            ratios.append(ratio)
            for k, v in inputs.items():
                acc[k].append(v)
        done += size
    return {
        name: _ratio_result(name, np.concatenate(ratios), {k: np.concatenate(v) for k, v in acc.items()})
        for name, (ratios, acc) in merged.items()
    }


def appendix_inequality_suite(samples: int = 100_000, seed: int = 0) -> Dict[str, CheckResult]:
    """Run every appendix inequality on ``samples`` seeded random inputs.

    Returns one CheckResult per inequality; failures carry the worst sample
    under ``details["witness"]``.
    """
    if samples < 1:
        raise ConfigurationError(f"samples must be >= 1, got {samples}")
    rng = np.random.default_rng(seed)
    results = {
        "log1p_upper": check_log1p_upper(rng, samples),
        "power_sum": check_power_sum(rng, samples),
    }
    for name, (lo, hi, lhs, rhs) in ELEMENTARY.items():
        results[name] = _scalar_check(name, lo, hi, lhs, rhs, rng, samples)
    results["root_correction"] = check_root_correction(rng, samples)
    results["hat_xi_correction"] = check_hat_xi_correction(rng, samples)
    results.update(check_product_lemmas(rng, samples))

    failed = [name for name, r in results.items() if not r.passed]
    if failed:
        logger.warning(f"Appendix inequalities failed: {failed}")
    else:
        logger.info(f"Appendix inequalities: {len(results)} items passed on {samples} samples each")
    return results
