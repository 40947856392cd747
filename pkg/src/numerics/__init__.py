"""Shared numerical primitives: double-double, scaled reals, norms, quadrature, rationals."""

from src.numerics.accumulate import CompensatedAccumulator, compensated_sum, dd_cumsum
from src.numerics.linalg import faddeev_leverrier, power_iteration, spectral_norm
from src.numerics.quadrature import c_sigma, gauss_jacobi_quadrature, gauss_quadrature
from src.numerics.rational import (
    Rational,
    rational_add,
    rational_div,
    rational_eval,
    rational_mul,
    rational_pow,
    to_rational,
)
from src.numerics.scaled import ScaledReal

__all__ = [
    "CompensatedAccumulator",
    "Rational",
    "ScaledReal",
    "c_sigma",
    "compensated_sum",
    "dd_cumsum",
    "faddeev_leverrier",
    "gauss_jacobi_quadrature",
    "gauss_quadrature",
    "power_iteration",
    "rational_add",
    "rational_div",
    "rational_eval",
    "rational_mul",
    "rational_pow",
    "spectral_norm",
    "to_rational",
]
