"""
Gauss quadrature on [0, 1].

Polynomial integrals elsewhere in the package are exact; these rules serve as
cross-checks and for the endpoint-singular integral C_sigma.
"""

from functools import lru_cache
from typing import Callable, Optional, Tuple

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import roots_jacobi

SUBSTITUTIONS = (None, "sine")


@lru_cache(maxsize=32)
def _legendre_unit(nodes: int) -> Tuple[np.ndarray, np.ndarray]:
    x, w = leggauss(nodes)
    return 0.5 * (x + 1.0), 0.5 * w


def gauss_quadrature(g: Callable[[np.ndarray], np.ndarray], nodes: int = 64,
                     substitution: Optional[str] = None) -> float:
    """Gauss-Legendre approximation of the integral of ``g`` over [0, 1].

    Args:
        g: Vectorized integrand
        nodes: Number of Gauss nodes (>= 2)
        substitution: None, or "sine" for gamma = sin^2(pi u / 2), whose
            Jacobian (pi/2) sin(pi u) vanishes at both ends and absorbs
            gamma^(-s)(1-gamma)^(-s) singularities with s <= 1/2

    Raises:
        ValueError: For fewer than two nodes or an unknown substitution
    """
    if nodes < 2:
        raise ValueError(f"gauss_quadrature needs at least 2 nodes, got {nodes}")
    if substitution not in SUBSTITUTIONS:
        raise ValueError(f"Unknown substitution {substitution!r}")
    u, w = _legendre_unit(nodes)
    if substitution is None:
        return float(np.dot(w, g(u)))
    gamma = np.sin(0.5 * np.pi * u) ** 2
    jacobian = 0.5 * np.pi * np.sin(np.pi * u)
    return float(np.dot(w, g(gamma) * jacobian))


def gauss_jacobi_quadrature(g: Callable[[np.ndarray], np.ndarray], a: float, b: float,
                            nodes: int = 64) -> float:
    """Integral over [0, 1] of gamma^a (1-gamma)^b g(gamma), weights handled exactly."""
    x, w = roots_jacobi(nodes, b, a)
    gamma = 0.5 * (x + 1.0)
    return float(np.dot(w, g(gamma)) * 2.0 ** (-(a + b + 1.0)))


@lru_cache(maxsize=64)
def c_sigma(sigma: float, nodes: int = 400) -> float:
    """C_sigma = integral over [0,1] of gamma^(-sigma) (1-gamma)^(-sigma).

    For sigma <= 1/2 the sine substitution leaves the bounded integrand
    pi (sin(pi u)/2)^(1 - 2 sigma); past 1/2 that is singular again and the
    Jacobi rule with weight exponents (-sigma, -sigma) is used instead.
    """
    if not 0.0 <= sigma < 1.0:
        raise ValueError(f"C_sigma is defined for 0 <= sigma < 1, got {sigma}")
    if sigma <= 0.5:
        return gauss_quadrature(lambda gam: (gam * (1.0 - gam)) ** (-sigma),
                                nodes=nodes, substitution="sine")
    return gauss_jacobi_quadrature(np.ones_like, -sigma, -sigma, nodes=nodes)
