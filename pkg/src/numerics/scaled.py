"""
Log-scaled reals.

``ScaledReal`` keeps a mantissa in [1, 2) and an unbounded integer binary
exponent, so magnitudes like (1/x*)^p for p in the tens of thousands stay
representable. The array helpers at the bottom do the same for numpy vectors
and are what the recurrence engine uses.
"""

import math
from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np

Number = Union[int, float]


@dataclass(frozen=True)
class ScaledReal:
    """value = mantissa * 2**exponent with |mantissa| in [1, 2) or mantissa == 0."""

    mantissa: float
    exponent: int = 0

    def __post_init__(self):
        if not math.isfinite(self.mantissa):
            raise ValueError(f"ScaledReal mantissa must be finite, got {self.mantissa!r}")
        m = abs(self.mantissa)
        if m != 0.0 and not (1.0 <= m < 2.0):
            raise ValueError(f"ScaledReal mantissa {self.mantissa!r} is not normalized")

    @classmethod
    def from_float(cls, value: Number, exponent: int = 0) -> "ScaledReal":
        """Build from value * 2**exponent."""
        value = float(value)
        if value == 0.0:
            return cls(0.0, 0)
        m, e = math.frexp(value)
        return cls(m * 2.0, e - 1 + int(exponent))

    @classmethod
    def from_log(cls, log_value: float, sign: float = 1.0) -> "ScaledReal":
        """Build from a natural logarithm of the magnitude."""
        log2 = log_value / math.log(2.0)
        e = math.floor(log2)
        m = 2.0 ** (log2 - e)
        if m >= 2.0:
            m, e = m / 2.0, e + 1
        return cls(math.copysign(m, sign), int(e))

    @classmethod
    def zero(cls) -> "ScaledReal":
        return cls(0.0, 0)

    def to_float(self) -> float:
        """Nearest double, saturating to +-inf or 0 outside the double range."""
        if self.mantissa == 0.0:
            return 0.0
        try:
            return math.ldexp(self.mantissa, self.exponent)
        except OverflowError:
            return math.copysign(math.inf, self.mantissa)

    @property
    def sign(self) -> int:
        return (self.mantissa > 0) - (self.mantissa < 0)

    def log(self) -> float:
        """Natural log of |value|."""
        if self.mantissa == 0.0:
            return -math.inf
        return math.log(abs(self.mantissa)) + self.exponent * math.log(2.0)

    def log2(self) -> float:
        if self.mantissa == 0.0:
            return -math.inf
        return math.log2(abs(self.mantissa)) + self.exponent

    def __neg__(self) -> "ScaledReal":
        return ScaledReal(-self.mantissa, self.exponent)

    def __mul__(self, other: Union["ScaledReal", Number]) -> "ScaledReal":
        other = _coerce(other)
        return ScaledReal.from_float(self.mantissa * other.mantissa,
                                     self.exponent + other.exponent)

    __rmul__ = __mul__

    def __truediv__(self, other: Union["ScaledReal", Number]) -> "ScaledReal":
        other = _coerce(other)
        if other.mantissa == 0.0:
            raise ZeroDivisionError("division of ScaledReal by zero")
        return ScaledReal.from_float(self.mantissa / other.mantissa,
                                     self.exponent - other.exponent)

    def __add__(self, other: Union["ScaledReal", Number]) -> "ScaledReal":
        other = _coerce(other)
        if self.mantissa == 0.0:
            return other
        if other.mantissa == 0.0:
            return self
        e = max(self.exponent, other.exponent)
        total = (math.ldexp(self.mantissa, self.exponent - e)
                 + math.ldexp(other.mantissa, other.exponent - e))
        return ScaledReal.from_float(total, e)

    __radd__ = __add__

    def __sub__(self, other: Union["ScaledReal", Number]) -> "ScaledReal":
        return self + (-_coerce(other))

    def __pow__(self, power: Number) -> "ScaledReal":
        if isinstance(power, int):
            if power == 0:
                return ScaledReal(1.0, 0)
            result = ScaledReal(1.0, 0)
            base = self if power > 0 else ScaledReal(1.0, 0) / self
            n = abs(power)
            while n:
                if n & 1:
                    result = result * base
                base = base * base
                n >>= 1
            return result
        if self.mantissa <= 0.0:
            raise ValueError("real powers require a positive ScaledReal")
        log2 = float(power) * (math.log2(self.mantissa) + self.exponent)
        e = math.floor(log2)
        return ScaledReal.from_float(2.0 ** (log2 - e), int(e))

    def __float__(self) -> float:
        return self.to_float()

    def __repr__(self) -> str:
        return f"ScaledReal({self.mantissa!r} * 2**{self.exponent})"


def _coerce(value: Union[ScaledReal, Number]) -> ScaledReal:
    if isinstance(value, ScaledReal):
        return value
    return ScaledReal.from_float(value)


def normalize_arrays(mantissa: np.ndarray, exponent: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Vectorized renormalization of (mantissa, exponent) pairs into [1, 2)."""
    m, e = np.frexp(np.asarray(mantissa, dtype=np.float64))
    nonzero = m != 0.0
    m = np.where(nonzero, m * 2.0, 0.0)
    e = np.where(nonzero, e.astype(np.int64) - 1 + np.asarray(exponent, dtype=np.int64), 0)
    return m, e
