"""Generalized monomial kernels G(gamma) = sum C_i gamma^alpha_i."""

from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from src.errors import ConfigurationError
from src.kernel.polynomial import RealPolynomial

Term = Tuple[complex, complex]


@dataclass(frozen=True)
class MonomialKernel:
    """Kernel terms as (C_i, alpha_i) pairs with pairwise distinct alpha_i.

    gamma^alpha is exp(alpha log gamma) with the real logarithm, so complex
    exponents are allowed on (0, 1].
    """

    terms: Tuple[Term, ...]

    def __post_init__(self):
        terms = tuple((complex(c), complex(a)) for c, a in self.terms)
        if not terms:
            raise ConfigurationError("MonomialKernel needs at least one term")
        alphas = [a for _, a in terms]
        for i in range(len(alphas)):
            for j in range(i + 1, len(alphas)):
                if alphas[i] == alphas[j]:
                    raise ConfigurationError(f"Repeated kernel exponent {alphas[i]}")
        object.__setattr__(self, "terms", terms)

    @classmethod
    def from_polynomial(cls, G: RealPolynomial) -> "MonomialKernel":
        """Nonzero coefficients of G as terms (C, n); zero terms would add pole roots."""
        terms = tuple((float(c), float(n)) for n, c in enumerate(G.coeffs) if c != 0)
        if not terms:
            return cls(((0.0, 0.0),))
        return cls(terms)

    @classmethod
    def parse(cls, text: str) -> "MonomialKernel":
        """Parse "alpha:C" pairs joined by commas, e.g. "0:-4,1:6"."""
        terms = []
        for item in text.split(","):
            item = item.strip()
            if not item:
                continue
            try:
                alpha, coeff = item.split(":")
                terms.append((complex(coeff.strip()), complex(alpha.strip())))
            except ValueError as e:
                raise ConfigurationError(f"Invalid kernel term {item!r}, expected alpha:C") from e
        return cls(tuple(terms))

    @property
    def size(self) -> int:
        return len(self.terms)

    @property
    def C(self) -> np.ndarray:
        return np.array([c for c, _ in self.terms], dtype=np.complex128)

    @property
    def alpha(self) -> np.ndarray:
        return np.array([a for _, a in self.terms], dtype=np.complex128)

    @property
    def is_real(self) -> bool:
        return all(c.imag == 0 and a.imag == 0 for c, a in self.terms)

    @property
    def is_null(self) -> bool:
        return all(c == 0 for c, _ in self.terms)

    def __call__(self, gamma):
        g = np.asarray(gamma, dtype=np.float64)
        logs = np.log(g)
        value = sum(c * np.exp(a * logs) for c, a in self.terms)
        if self.is_real:
            value = np.real(value)
        if np.ndim(value):
            return value
        return float(value) if self.is_real else complex(value)

    def shift(self, s: complex) -> "MonomialKernel":
        """Kernel G(gamma) gamma^s: exponents alpha_i + s, characteristic roots move by -s.

        This is the kernel generated by the rescaled sequence p^(-s) xi_p.
        """
        return MonomialKernel(tuple((c, a + s) for c, a in self.terms))

    def to_text(self) -> str:
        def fmt(z: complex) -> str:
            return f"{z.real:g}" if z.imag == 0 else f"{z}"
        return ",".join(f"{fmt(a)}:{fmt(c)}" for c, a in self.terms)


def as_kernel(value) -> MonomialKernel:
    if isinstance(value, MonomialKernel):
        return value
    if isinstance(value, RealPolynomial):
        return MonomialKernel.from_polynomial(value)
    if isinstance(value, str):
        return MonomialKernel.parse(value)
    return MonomialKernel(tuple(value))
