"""
Double-double arithmetic on numpy arrays.

A double-double value is an unevaluated pair (hi, lo) with |lo| <= ulp(hi)/2.
Every routine here accepts scalars or equally shaped float64 arrays and is
error-free in the sense of Dekker/Knuth: ``two_sum`` and ``two_prod`` return
the rounded result together with the exact rounding error.
"""

from fractions import Fraction
from typing import Tuple, Union

import mpmath
import numpy as np

ArrayLike = Union[float, np.ndarray]
DD = Tuple[ArrayLike, ArrayLike]

_SPLITTER = 134217729.0  # 2**27 + 1

LN2: DD = (0.6931471805599453, 2.3190468138462996e-17)


def two_sum(a: ArrayLike, b: ArrayLike) -> DD:
    s = a + b
    bb = s - a
    err = (a - (s - bb)) + (b - bb)
    return s, err


def quick_two_sum(a: ArrayLike, b: ArrayLike) -> DD:
    """Like ``two_sum`` but requires |a| >= |b|."""
    s = a + b
    err = b - (s - a)
    return s, err


def split(a: ArrayLike) -> DD:
    """Dekker split into two halves of at most 26 significant bits each."""
    c = _SPLITTER * a
    abig = c - a
    ahi = c - abig
    return ahi, a - ahi


def two_prod(a: ArrayLike, b: ArrayLike) -> DD:
    p = a * b
    ahi, alo = split(a)
    bhi, blo = split(b)
    err = ((ahi * bhi - p) + ahi * blo + alo * bhi) + alo * blo
    return p, err


def dd_add(ah: ArrayLike, al: ArrayLike, bh: ArrayLike, bl: ArrayLike) -> DD:
    s, e = two_sum(ah, bh)
    t, f = two_sum(al, bl)
    e = e + t
    s, e = quick_two_sum(s, e)
    e = e + f
    return quick_two_sum(s, e)


def dd_neg(ah: ArrayLike, al: ArrayLike) -> DD:
    return -ah, -al


def dd_sub(ah: ArrayLike, al: ArrayLike, bh: ArrayLike, bl: ArrayLike) -> DD:
    return dd_add(ah, al, -bh, -bl)


def dd_mul(ah: ArrayLike, al: ArrayLike, bh: ArrayLike, bl: ArrayLike) -> DD:
    p, e = two_prod(ah, bh)
    e = e + (ah * bl + al * bh)
    return quick_two_sum(p, e)


def dd_mul_d(ah: ArrayLike, al: ArrayLike, b: ArrayLike) -> DD:
    p, e = two_prod(ah, b)
    e = e + al * b
    return quick_two_sum(p, e)


def dd_div(ah: ArrayLike, al: ArrayLike, bh: ArrayLike, bl: ArrayLike) -> DD:
    q1 = ah / bh
    ph, pl = dd_mul_d(bh, bl, q1)
    rh, rl = dd_sub(ah, al, ph, pl)
    q2 = rh / bh
    ph, pl = dd_mul_d(bh, bl, q2)
    rh, rl = dd_sub(rh, rl, ph, pl)
    q3 = rh / bh
    q1, q2 = quick_two_sum(q1, q2)
    return dd_add(q1, q2, q3, 0.0 * q3)


def dd_div_d(ah: ArrayLike, al: ArrayLike, b: ArrayLike) -> DD:
    return dd_div(ah, al, b, 0.0 * b)


def dd_ldexp(ah: ArrayLike, al: ArrayLike, e: ArrayLike) -> DD:
    """Scale by 2**e exactly (barring underflow)."""
    return np.ldexp(ah, e), np.ldexp(al, e)


def dd_from_fraction(x: Fraction) -> DD:
    hi = float(x)
    lo = float(Fraction(x) - Fraction(hi))
    return hi, lo


def dd_from_mpf(x: mpmath.mpf) -> DD:
    hi = float(x)
    lo = float(x - hi)
    return hi, lo


def dd_to_mpf(hi: float, lo: float) -> mpmath.mpf:
    return mpmath.mpf(float(hi)) + mpmath.mpf(float(lo))


def dd_ratio(num: np.ndarray, den: int) -> DD:
    """Exact-as-possible double-double for integer ratios num/den."""
    num = np.asarray(num, dtype=np.float64)
    hi = num / den
    ph, pl = two_prod(hi, float(den))
    r = (num - ph) - pl
    return hi, r / den


def dd_horner(coeffs_hi: np.ndarray, coeffs_lo: np.ndarray, xh: np.ndarray, xl: np.ndarray) -> DD:
    """Evaluate a polynomial with double-double coefficients (lowest degree first)."""
    rh = np.full_like(xh, coeffs_hi[-1])
    rl = np.full_like(xh, coeffs_lo[-1])
    for ch, cl in zip(coeffs_hi[-2::-1], coeffs_lo[-2::-1]):
        rh, rl = dd_mul(rh, rl, xh, xl)
        rh, rl = dd_add(rh, rl, ch, cl)
    return rh, rl


def pairwise_sum(hi: np.ndarray, lo: np.ndarray) -> Tuple[float, float]:
    """Reduce double-double arrays by a fixed pairwise tree.

    The reduction order depends only on the array length, which makes the
    result reproducible regardless of how the caller chunked the work.
    """
    hi = np.asarray(hi, dtype=np.float64)
    lo = np.asarray(lo, dtype=np.float64)
    if hi.size == 0:
        return 0.0, 0.0
    while hi.size > 1:
        if hi.size % 2:
            hi = np.append(hi, 0.0)
            lo = np.append(lo, 0.0)
        hi, lo = dd_add(hi[0::2], lo[0::2], hi[1::2], lo[1::2])
    return float(hi[0]), float(lo[0])


def chunked_pairwise_sum(hi: np.ndarray, lo: np.ndarray, chunk_size: int,
                         executor=None) -> Tuple[float, float]:
    """Pairwise reduction over fixed-size chunks, optionally mapped on an executor.

    Chunk boundaries depend on ``chunk_size`` only, so serial and threaded runs
    produce bit-identical sums.
    """
    n = len(hi)
    if n <= chunk_size:
        return pairwise_sum(hi, lo)
    bounds = [(i, min(i + chunk_size, n)) for i in range(0, n, chunk_size)]

    def _reduce(bound):
        start, stop = bound
        return pairwise_sum(hi[start:stop], lo[start:stop])

    if executor is not None:
        partial = list(executor.map(_reduce, bounds))
    else:
        partial = [_reduce(b) for b in bounds]
    ph = np.array([p[0] for p in partial])
    pl = np.array([p[1] for p in partial])
    return pairwise_sum(ph, pl)
