"""
Decay-rate fits for sequences indexed by p.

Monotone sequences are fitted by least squares on log|seq| against log p.
Sequences driven by a complex characteristic root oscillate in log p, so they
are fitted directly with the model

    seq_p ~ p^beta (a cos(omega log p) + b sin(omega log p)),

eliminating (a, b) by linear least squares (variable projection), scanning a
(beta, omega) grid and refining the best cell with scipy.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy.optimize import least_squares

from src.errors import ConfigurationError, InsufficientData
from src.schemas import FitReport

logger = logging.getLogger(__name__)

MIN_POINTS = 8
GRID_POINTS = 512
BETA_GRID = np.arange(-4.0, 2.0 + 1e-9, 0.02)
OMEGA_MAX = 20.0


@dataclass(frozen=True)
class DecayFit:
    """Fitted |seq_p| ~ amplitude * p^exponent over fit_range.

    log_period is 2 pi/omega of the oscillatory fit (NaN when none is resolved
    in the window); crossing_period is twice the mean spacing of sign changes
    in log p. For oscillatory fits the residual is the RMS of the relative
    misfit, otherwise the RMS in log space.
    """

    exponent: float
    amplitude: float
    log_period: float
    crossing_period: float
    residual: float
    fit_range: Tuple[int, int]
    n_points: int
    oscillatory: bool

    def to_report(self) -> FitReport:
        return FitReport(
            exponent=self.exponent,
            amplitude=self.amplitude,
            log_period=self.log_period,
            crossing_period=self.crossing_period,
            residual=self.residual,
            fit_range=self.fit_range,
            n_points=self.n_points,
            oscillatory=self.oscillatory,
        )


def _resolve_range(seq: np.ndarray, p_range: Optional[Tuple[int, int]]) -> Tuple[int, int]:
    finite = np.flatnonzero(np.isfinite(seq))
    if p_range is None:
        if finite.size == 0:
            raise InsufficientData("sequence has no finite entries")
        return max(int(finite[0]), 2), int(finite[-1])
    lo, hi = int(p_range[0]), int(p_range[1])
    if not 1 <= lo < hi < seq.size:
        raise ConfigurationError(f"fit range ({lo}, {hi}) is not inside [1, {seq.size - 1}]")
    return lo, hi


def log_spaced(lo: int, hi: int, points: int) -> np.ndarray:
    """Up to ``points`` distinct integers spread geometrically over [lo, hi]."""
    return np.unique(np.geomspace(lo, hi, points).round().astype(int))


def envelope(seq, p_range: Optional[Tuple[int, int]] = None,
             points: int = 32) -> Tuple[np.ndarray, np.ndarray]:
    """max_{p <= r <= hi} |seq_r| sampled at log-spaced p in [lo, hi]."""
    seq = np.asarray(seq)
    lo, hi = _resolve_range(seq, p_range)
    window = np.abs(np.nan_to_num(seq[lo:hi + 1], nan=0.0))
    suffix = np.maximum.accumulate(window[::-1])[::-1]
    p = log_spaced(lo, hi, points)
    return p, suffix[p - lo]


def _powerlaw_fit(p: np.ndarray, values: np.ndarray) -> Tuple[float, float, float]:
    x, y = np.log(p), np.log(values)
    slope, intercept = np.polyfit(x, y, 1)
    rms = float(np.sqrt(np.mean((y - (slope * x + intercept)) ** 2)))
    return float(slope), float(math.exp(intercept)), rms


def fit_envelope(seq, p_range: Optional[Tuple[int, int]] = None, points: int = 32) -> DecayFit:
    """Power-law fit of the suffix-max envelope of |seq|."""
    p, env = envelope(seq, p_range, points)
    keep = env > 0
    if np.count_nonzero(keep) < MIN_POINTS:
        raise InsufficientData(f"only {np.count_nonzero(keep)} nonzero envelope points",
                               {"needed": MIN_POINTS})
    exponent, amplitude, rms = _powerlaw_fit(p[keep], env[keep])
    return DecayFit(exponent=exponent, amplitude=amplitude, log_period=math.nan,
                    crossing_period=math.nan, residual=rms, fit_range=(int(p[0]), int(p[-1])),
                    n_points=int(np.count_nonzero(keep)), oscillatory=False)


def crossing_period(t: np.ndarray, y: np.ndarray) -> float:
    """Twice the mean spacing of sign changes of y over t (NaN below two crossings)."""
    s = np.sign(y)
    idx = np.flatnonzero(s[:-1] * s[1:] < 0)
    if idx.size < 2:
        return math.nan
    crossings = t[idx] - y[idx] * (t[idx + 1] - t[idx]) / (y[idx + 1] - y[idx])
    return float(2.0 * np.mean(np.diff(crossings)))


def _projection_residual(t: np.ndarray, y: np.ndarray, beta: float, omega: float) -> np.ndarray:
    z = y * np.exp(-beta * t)
    X = np.column_stack([np.cos(omega * t), np.sin(omega * t)])
    coef, *_ = np.linalg.lstsq(X, z, rcond=None)
    return (z - X @ coef) / max(np.linalg.norm(z), np.finfo(float).tiny)


def _grid_search(t: np.ndarray, y: np.ndarray, omegas: np.ndarray) -> Tuple[float, float]:
    Z = y[:, None] * np.exp(-np.outer(t, BETA_GRID))
    norms = np.sum(Z * Z, axis=0)
    best, best_beta, best_omega = np.inf, BETA_GRID[0], omegas[0]
    for omega in omegas:
        Q, _ = np.linalg.qr(np.column_stack([np.cos(omega * t), np.sin(omega * t)]))
        proj = Q.T @ Z
        objective = 1.0 - np.sum(proj * proj, axis=0) / norms
        i = int(np.argmin(objective))
        if objective[i] < best:
            best, best_beta, best_omega = objective[i], BETA_GRID[i], omega
    return float(best_beta), float(best_omega)


def _oscillatory_fit(p: np.ndarray, y: np.ndarray) -> Tuple[float, float, float, float]:
    t = np.log(p.astype(np.float64))
    span = t[-1] - t[0]
    omegas = np.geomspace(math.pi / (4.0 * span), OMEGA_MAX, 240)
    grid = np.unique(np.linspace(0, t.size - 1, min(GRID_POINTS, t.size)).astype(int))
    beta0, omega0 = _grid_search(t[grid], y[grid], omegas)

    result = least_squares(lambda v: _projection_residual(t, y, v[0], v[1]), x0=[beta0, omega0],
                           bounds=([-10.0, 1e-3], [10.0, 2.0 * OMEGA_MAX]), xtol=1e-14, ftol=1e-14)
    beta, omega = (float(v) for v in result.x)
    z = y * np.exp(-beta * t)
    X = np.column_stack([np.cos(omega * t), np.sin(omega * t)])
    coef, *_ = np.linalg.lstsq(X, z, rcond=None)
    misfit = z - X @ coef
    rms = float(np.sqrt(np.mean(misfit ** 2) / max(np.mean(z ** 2), np.finfo(float).tiny)))
    return beta, omega, float(np.hypot(*coef)), rms


def fit_decay(seq, p_range: Optional[Tuple[int, int]] = None,
              oscillatory: bool = False) -> DecayFit:
    """Fit the decay exponent of seq over p_range.

    Args:
        seq: Values indexed by p (seq[p])
        p_range: Inclusive (lo, hi); defaults to the finite part from p = 2
        oscillatory: Fit the oscillating power-law model instead of log|seq|

    Raises:
        InsufficientData: With fewer than 8 usable points
    """
    seq = np.asarray(seq, dtype=np.float64)
    lo, hi = _resolve_range(seq, p_range)

    if not oscillatory:
        p = log_spaced(lo, hi, 64)
        values = np.abs(seq[p])
        keep = np.isfinite(values) & (values > 0)
        if np.count_nonzero(keep) < MIN_POINTS:
            raise InsufficientData(f"only {np.count_nonzero(keep)} usable points in [{lo}, {hi}]",
                                   {"needed": MIN_POINTS})
        exponent, amplitude, rms = _powerlaw_fit(p[keep], values[keep])
        return DecayFit(exponent=exponent, amplitude=amplitude, log_period=math.nan,
                        crossing_period=math.nan, residual=rms, fit_range=(lo, hi),
                        n_points=int(np.count_nonzero(keep)), oscillatory=False)

    p = np.arange(lo, hi + 1)
    y = seq[lo:hi + 1]
    keep = np.isfinite(y)
    p, y = p[keep], y[keep]
    if p.size < MIN_POINTS or not np.any(y != 0):
        raise InsufficientData(f"only {p.size} usable points in [{lo}, {hi}]", {"needed": MIN_POINTS})
    beta, omega, amplitude, rms = _oscillatory_fit(p, y)
    t = np.log(p.astype(np.float64))
    period = 2.0 * math.pi / omega
    if period > 2.0 * (t[-1] - t[0]):
        period = math.nan
    fit = DecayFit(exponent=beta, amplitude=amplitude, log_period=period,
                   crossing_period=crossing_period(t, y), residual=rms, fit_range=(lo, hi),
                   n_points=int(p.size), oscillatory=True)
    logger.debug(f"Oscillatory fit on [{lo}, {hi}]: exponent {beta:.6g}, log period {period:.6g}")
    return fit
