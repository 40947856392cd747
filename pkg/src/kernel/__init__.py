"""Polynomial kernels f, f~, G and the characteristic spectrum."""

from src.kernel.assumption import loss_of_control_constant, validate_assumption
from src.kernel.monomial import MonomialKernel, as_kernel
from src.kernel.polynomial import RealPolynomial, as_polynomial, kernel_G, symmetrize
from src.kernel.roots import aberth_roots
from src.kernel.spectrum import (
    Spectrum,
    characteristic_polynomial,
    characteristic_spectrum,
    sigma_of_kernel,
    spectrum_from_roots,
)

__all__ = [
    "MonomialKernel",
    "RealPolynomial",
    "Spectrum",
    "aberth_roots",
    "as_kernel",
    "as_polynomial",
    "characteristic_polynomial",
    "characteristic_spectrum",
    "kernel_G",
    "loss_of_control_constant",
    "sigma_of_kernel",
    "spectrum_from_roots",
    "symmetrize",
    "validate_assumption",
]
