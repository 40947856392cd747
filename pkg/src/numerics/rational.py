"""
Exact rational layer for small-p oracles.

``fractions.Fraction`` already keeps values reduced with a positive
denominator; these helpers add exact conversion from user input and map
division by zero onto the package error type.
"""

from fractions import Fraction
from typing import Iterable, Sequence, Union

from src.errors import DivideByZero

Rational = Fraction
RationalLike = Union[int, str, float, Fraction]


def to_rational(value: RationalLike) -> Fraction:
    """Exact conversion: strings are parsed as decimals, floats by their binary value."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str):
        return Fraction(value.strip())
    return Fraction(value)


def rational_add(a: RationalLike, b: RationalLike) -> Fraction:
    return to_rational(a) + to_rational(b)


def rational_mul(a: RationalLike, b: RationalLike) -> Fraction:
    return to_rational(a) * to_rational(b)


def rational_div(a: RationalLike, b: RationalLike) -> Fraction:
    b = to_rational(b)
    if b == 0:
        raise DivideByZero("exact division by zero", {"numerator": str(to_rational(a))})
    return to_rational(a) / b


def rational_pow(a: RationalLike, n: int) -> Fraction:
    a = to_rational(a)
    if n < 0 and a == 0:
        raise DivideByZero("zero raised to a negative power", {"power": n})
    return a ** n


def rational_eval(coeffs: Sequence[RationalLike], x: RationalLike) -> Fraction:
    """Horner evaluation of sum coeffs[n] x^n in exact arithmetic."""
    x = to_rational(x)
    result = Fraction(0)
    for c in reversed(list(coeffs)):
        result = result * x + to_rational(c)
    return result


def rational_sum(values: Iterable[RationalLike]) -> Fraction:
    total = Fraction(0)
    for v in values:
        total += to_rational(v)
    return total
