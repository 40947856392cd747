"""Compensated summation."""

from typing import Iterable

import numpy as np

from src.numerics.double_double import pairwise_sum, two_sum


class CompensatedAccumulator:
    """Neumaier running sum.

    Scalar ``add`` keeps a separate compensation term; ``extend`` reduces a
    whole array in double-double first and folds the pair in, so both paths
    keep the error at O(eps) independent of the number of terms.

    Example:
        >>> acc = CompensatedAccumulator()
        >>> acc.extend([0.1] * 10)
        >>> round(acc.value, 15)
        1.0
    """

    __slots__ = ("sum", "compensation")

    def __init__(self, initial: float = 0.0):
        self.sum = float(initial)
        self.compensation = 0.0

    def add(self, x: float) -> None:
        x = float(x)
        t = self.sum + x
        if abs(self.sum) >= abs(x):
            self.compensation += (self.sum - t) + x
        else:
            self.compensation += (x - t) + self.sum
        self.sum = t

    def add_dd(self, hi: float, lo: float) -> None:
        self.add(hi)
        self.add(lo)

    def extend(self, values: Iterable[float], chunk_size: int = 1 << 20) -> None:
        arr = np.asarray(values if isinstance(values, np.ndarray) else list(values),
                         dtype=np.float64).ravel()
        zeros = np.zeros(min(chunk_size, arr.size))
        for start in range(0, arr.size, chunk_size):
            chunk = arr[start:start + chunk_size]
            hi, lo = pairwise_sum(chunk, zeros[:chunk.size])
            self.add_dd(hi, lo)

    @property
    def value(self) -> float:
        return self.sum + self.compensation

    def as_dd(self):
        return two_sum(self.sum, self.compensation)

    def __float__(self) -> float:
        return self.value

    def __repr__(self) -> str:
        return f"CompensatedAccumulator(sum={self.sum!r}, compensation={self.compensation!r})"


def compensated_sum(values: Iterable[float]) -> float:
    acc = CompensatedAccumulator()
    acc.extend(values)
    return acc.value


def dd_cumsum(values: np.ndarray):
    """Running double-double prefix sums (hi, lo) of ``values``."""
    values = np.asarray(values, dtype=np.float64)
    hi = np.empty_like(values)
    lo = np.empty_like(values)
    sh, sl = 0.0, 0.0
    for i, v in enumerate(values):
        s, e = two_sum(sh, float(v))
        e += sl
        sh, sl = two_sum(s, e)
        hi[i] = sh
        lo[i] = sl
    return hi, lo
