"""
Characteristic spectrum of a kernel.

The characteristic equation sum C_i/(lambda + alpha_i + 1) = 1 is cleared of
denominators into the monic polynomial

    prod_i (lambda + beta_i) - sum_i C_i prod_{j != i} (lambda + beta_j),

beta_i = alpha_i + 1, whose roots are found by the Aberth iteration and
checked by substituting back into the rational form.
"""

import logging
from dataclasses import dataclass
from typing import Any, Dict, Optional, Tuple

import numpy as np

from src.config import config
from src.errors import DegenerateKernel, RootFindingFailure
from src.kernel.monomial import MonomialKernel
from src.kernel.polynomial import RealPolynomial, kernel_G
from src.kernel.roots import aberth_roots

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Spectrum:
    """Roots of the characteristic equation and derived exponents.

    Attributes:
        roots: sigma_1..sigma_N sorted by real part, then by descending imaginary part
        sigma_G: max real part of the roots
        alpha_f: 1 - sigma_G
        distinct: min pairwise distance exceeds distinct_rel * (1 + max |root|)
        in_strip: every root has -1 < Re < 0
        max_residual: largest back-substitution residual
    """

    roots: Tuple[complex, ...]
    sigma_G: float
    alpha_f: float
    distinct: bool
    in_strip: bool
    max_residual: float = 0.0

    @property
    def leading_root(self) -> complex:
        return max(self.roots, key=lambda z: (z.real, z.imag))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "roots": [[z.real, z.imag] for z in self.roots],
            "sigma_G": self.sigma_G,
            "alpha_f": self.alpha_f,
            "distinct": self.distinct,
            "in_strip": self.in_strip,
            "max_residual": self.max_residual,
        }


def characteristic_polynomial(kernel: MonomialKernel) -> np.ndarray:
    """Cleared-denominator polynomial of the kernel, highest degree first."""
    beta = kernel.alpha + 1.0
    C = kernel.C
    poly = np.array([1.0 + 0j])
    for b in beta:
        poly = np.polymul(poly, [1.0, b])
    for i, c in enumerate(C):
        if c == 0:
            continue
        partial = np.array([1.0 + 0j])
        for j, b in enumerate(beta):
            if j != i:
                partial = np.polymul(partial, [1.0, b])
        poly = np.polysub(poly, c * partial)
    return poly


def characteristic_residual(kernel: MonomialKernel, lam: complex) -> float:
    """|sum C_i/(lambda + alpha_i + 1) - 1|."""
    return float(abs(np.sum(kernel.C / (lam + kernel.alpha + 1.0)) - 1.0))


def _sorted_roots(roots: np.ndarray) -> Tuple[complex, ...]:
    return tuple(sorted((complex(z) for z in roots), key=lambda z: (z.real, -z.imag)))


def min_pairwise_distance(roots) -> float:
    roots = np.asarray(roots, dtype=np.complex128)
    if roots.size < 2:
        return float("inf")
    diff = np.abs(roots[:, None] - roots[None, :])
    diff[np.diag_indices(roots.size)] = np.inf
    return float(diff.min())


def spectrum_from_roots(roots, residual: float = 0.0,
                        distinct_rel: Optional[float] = None) -> Spectrum:
    distinct_rel = config.tolerances.distinct_rel if distinct_rel is None else distinct_rel
    ordered = _sorted_roots(np.asarray(roots))
    arr = np.array(ordered, dtype=np.complex128)
    sigma_G = float(np.max(arr.real))
    threshold = distinct_rel * (1.0 + float(np.max(np.abs(arr))))
    return Spectrum(
        roots=ordered,
        sigma_G=sigma_G,
        alpha_f=1.0 - sigma_G,
        distinct=min_pairwise_distance(arr) > threshold,
        in_strip=bool(np.all((arr.real > -1.0) & (arr.real < 0.0))),
        max_residual=residual,
    )


def sigma_of_kernel(kernel: MonomialKernel, tol: Optional[float] = None) -> Spectrum:
    """Spectrum of sum C_i/(lambda + alpha_i + 1) = 1.

    Args:
        kernel: Monomial kernel with at least one nonzero C_i
        tol: Max accepted back-substitution residual (default from config)

    Raises:
        DegenerateKernel: If every C_i is zero
        RootFindingFailure: If the iteration fails or a root does not satisfy
            the equation to ``tol``
    """
    tol = config.tolerances.residual_tol if tol is None else tol
    if kernel.is_null:
        raise DegenerateKernel("kernel has no nonzero terms", {"terms": kernel.to_text()})

    poly = characteristic_polynomial(kernel)
    roots = aberth_roots(poly)

    residuals = []
    for lam in roots:
        poles = np.abs(lam + kernel.alpha + 1.0)
        if np.any(poles == 0):
            residuals.append(0.0 if abs(np.polyval(poly, lam)) == 0 else np.inf)
        else:
            residuals.append(characteristic_residual(kernel, lam))
    worst = float(max(residuals))
    if worst > tol:
        # A multiple root can sit within sqrt(eps) of where the rational form is
        # ill-conditioned; accept it when the cleared polynomial is at rounding level.
        lam = roots[int(np.argmax(residuals))]
        scale = np.sum(np.abs(poly) * np.abs(lam) ** np.arange(poly.size - 1, -1, -1))
        if abs(np.polyval(poly, lam)) > 64 * np.finfo(float).eps * scale:
            raise RootFindingFailure(
                f"root fails back-substitution (residual {worst:.3g} > {tol:.3g})",
                {"residual": worst, "tolerance": tol},
            )
    spectrum = spectrum_from_roots(roots, residual=worst)
    logger.debug(f"Spectrum of {kernel.to_text()}: sigma_G={spectrum.sigma_G:.12g}, "
                 f"distinct={spectrum.distinct}, in_strip={spectrum.in_strip}")
    return spectrum


def characteristic_spectrum(f_tilde: RealPolynomial, tol: Optional[float] = None) -> Spectrum:
    """Spectrum of sum n a_n/(n+2) * 1/(n+alpha) = 1 for f~ = sum a_n gamma^n.

    Raises:
        DegenerateKernel: If f~ is constant
    """
    if f_tilde.degree == 0:
        raise DegenerateKernel("f~ is constant: characteristic equation has no terms",
                               {"degree": 0})
    G = kernel_G(f_tilde)
    return sigma_of_kernel(MonomialKernel.from_polynomial(G), tol=tol)
