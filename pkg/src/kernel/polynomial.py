"""
Real polynomials on [0, 1].

Coefficients are stored lowest degree first and may be ints, Fractions or
floats. Exact inputs stay exact through the algebra (reflection, kernel,
integrals); numeric evaluation on floats and arrays uses float64 copies.
"""

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Integral, Rational as _RationalABC
from typing import Iterable, List, Sequence, Tuple, Union

import numpy as np

from src.errors import ConfigurationError

Coefficient = Union[int, float, Fraction]


def _is_exact(c) -> bool:
    return isinstance(c, _RationalABC) and not isinstance(c, bool)


def _divide(a: Coefficient, n: int, d: int) -> Coefficient:
    """a * n / d, exact for exact a."""
    if _is_exact(a):
        return Fraction(a) * Fraction(n, d)
    return float(a) * n / d


@dataclass(frozen=True)
class RealPolynomial:
    """p(gamma) = sum coeffs[n] gamma^n.

    Trailing zero coefficients are stripped on construction; the zero
    polynomial is stored as ``(0,)``.

    Example:
        >>> f = RealPolynomial.parse("4,-10,6")
        >>> f(Fraction(1, 2))
        Fraction(1, 2)
    """

    coeffs: Tuple[Coefficient, ...]

    def __post_init__(self):
        coeffs = list(self.coeffs)
        for c in coeffs:
            if not _is_exact(c) and not math.isfinite(float(c)):
                raise ConfigurationError(f"Polynomial coefficient {c!r} is not finite")
        while len(coeffs) > 1 and coeffs[-1] == 0:
            coeffs.pop()
        if not coeffs:
            coeffs = [0]
        object.__setattr__(self, "coeffs", tuple(coeffs))

    # construction -------------------------------------------------------

    @classmethod
    def parse(cls, text: str) -> "RealPolynomial":
        """Parse comma separated coefficients, lowest degree first ("4,-10,6")."""
        parts = [p.strip() for p in text.split(",") if p.strip()]
        if not parts:
            raise ConfigurationError(f"No coefficients in {text!r}")
        try:
            return cls(tuple(Fraction(p) for p in parts))
        except ValueError as e:
            raise ConfigurationError(f"Invalid polynomial coefficients {text!r}: {e}") from e

    @classmethod
    def from_json(cls, text: str) -> "RealPolynomial":
        data = json.loads(text)
        if not isinstance(data, list):
            raise ConfigurationError("Polynomial JSON must be an array of coefficients")
        return cls(tuple(data))

    def to_json(self) -> str:
        return json.dumps(self.as_floats())

    # basic properties ---------------------------------------------------

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return len(self.coeffs) == 1 and self.coeffs[0] == 0

    @property
    def is_exact(self) -> bool:
        return all(_is_exact(c) for c in self.coeffs)

    def as_floats(self) -> List[float]:
        return [float(c) for c in self.coeffs]

    def __call__(self, x):
        """Evaluate; exact for Fraction/int input with exact coefficients."""
        if _is_exact(x) and self.is_exact:
            x = Fraction(int(x)) if isinstance(x, Integral) else Fraction(x)
            result = Fraction(0)
            for c in reversed(self.coeffs):
                result = result * x + c
            return result
        floats = self.as_floats()
        if isinstance(x, np.ndarray) or not np.isscalar(x):
            x = np.asarray(x, dtype=np.float64)
            result = np.full_like(x, floats[-1])
        else:
            x = float(x)
            result = floats[-1]
        for c in reversed(floats[:-1]):
            result = result * x + c
        return result

    # algebra ------------------------------------------------------------

    def __add__(self, other: "RealPolynomial") -> "RealPolynomial":
        n = max(len(self.coeffs), len(other.coeffs))
        a = list(self.coeffs) + [0] * (n - len(self.coeffs))
        b = list(other.coeffs) + [0] * (n - len(other.coeffs))
        return RealPolynomial(tuple(x + y for x, y in zip(a, b)))

    def __neg__(self) -> "RealPolynomial":
        return RealPolynomial(tuple(-c for c in self.coeffs))

    def __sub__(self, other: "RealPolynomial") -> "RealPolynomial":
        return self + (-other)

    def scale(self, factor: Coefficient) -> "RealPolynomial":
        return RealPolynomial(tuple(c * factor for c in self.coeffs))

    def reflect(self) -> "RealPolynomial":
        """gamma -> 1 - gamma, expanded binomially."""
        out: List[Coefficient] = [0] * len(self.coeffs)
        for n, a in enumerate(self.coeffs):
            for k in range(n + 1):
                out[k] = out[k] + a * math.comb(n, k) * (-1) ** k
        return RealPolynomial(tuple(out))

    def derivative(self) -> "RealPolynomial":
        if self.degree == 0:
            return RealPolynomial((0,))
        return RealPolynomial(tuple(n * c for n, c in enumerate(self.coeffs) if n > 0))

    # integrals on [0, 1] ------------------------------------------------

    def moment(self, k: int = 0) -> Coefficient:
        """Integral over [0,1] of p(gamma) gamma^k, exact when coefficients are."""
        if self.is_exact:
            return sum((Fraction(a) / (n + k + 1) for n, a in enumerate(self.coeffs)), Fraction(0))
        return math.fsum(float(a) / (n + k + 1) for n, a in enumerate(self.coeffs))

    def integral(self) -> Coefficient:
        return self.moment(0)

    def sup_norm(self) -> float:
        """max over [0,1] of |p|, from endpoints and real critical points."""
        candidates = [0.0, 1.0]
        if self.degree >= 2:
            roots = np.polynomial.Polynomial(self.derivative().as_floats()).roots()
            candidates.extend(float(r.real) for r in np.atleast_1d(roots)
                              if abs(r.imag) <= 1e-12 * (1 + abs(r)) and 0.0 <= r.real <= 1.0)
        return float(max(abs(self(c)) for c in candidates))

    def real_roots_in_unit_interval(self) -> List[float]:
        if self.degree == 0:
            return []
        roots = np.polynomial.Polynomial(self.as_floats()).roots()
        return sorted(float(r.real) for r in np.atleast_1d(roots)
                      if abs(r.imag) <= 1e-12 * (1 + abs(r)) and 0.0 < r.real < 1.0)

    def __str__(self) -> str:
        terms = []
        for n, c in enumerate(self.coeffs):
            if c == 0 and not self.is_zero:
                continue
            terms.append(f"{c}" if n == 0 else f"{c}*g^{n}")
        return " + ".join(terms)


def symmetrize(f: RealPolynomial) -> RealPolynomial:
    """f~(gamma) = f(gamma) + f(1 - gamma)."""
    return f + f.reflect()


def kernel_G(f_tilde: RealPolynomial) -> RealPolynomial:
    """G(gamma) = sum_{n>=1} n a_n/(n+2) gamma^(n-1), the closed form of int_0^1 f~'(t gamma) t^2 dt."""
    if f_tilde.degree == 0:
        return RealPolynomial((0,))
    return RealPolynomial(tuple(_divide(a, n, n + 2)
                                for n, a in enumerate(f_tilde.coeffs) if n >= 1))


def as_polynomial(value: Union[RealPolynomial, str, Sequence[Coefficient], Iterable]) -> RealPolynomial:
    if isinstance(value, RealPolynomial):
        return value
    if isinstance(value, str):
        return RealPolynomial.parse(value)
    return RealPolynomial(tuple(value))
