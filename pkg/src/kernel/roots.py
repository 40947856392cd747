"""
Simultaneous polynomial root finding (Aberth-Ehrlich).

Initial guesses sit on a circle of Cauchy radius, rotated off the real axis
so conjugate pairs are not started symmetrically. Updates are applied
Gauss-Seidel style, each root using the freshest neighbours.
"""

import logging
from typing import Sequence

import numpy as np

from src.config import config
from src.errors import RootFindingFailure

logger = logging.getLogger(__name__)

_EPS = np.finfo(np.float64).eps
_ANGLE_OFFSET = 0.4


def _horner(coeffs: np.ndarray, z: complex):
    """p(z), p'(z) and sum |a_k||z|^k for coefficients highest degree first."""
    p = coeffs[0]
    dp = 0.0 + 0.0j
    scale = abs(coeffs[0])
    az = abs(z)
    for c in coeffs[1:]:
        dp = dp * z + p
        p = p * z + c
        scale = scale * az + abs(c)
    return p, dp, scale


def aberth_roots(coeffs: Sequence[complex], tol: float = None, max_iter: int = None) -> np.ndarray:
    """All roots of sum coeffs[k] z^(n-k) (highest degree first).

    A root is accepted once its correction satisfies |delta| <= tol (1 + |z|)
    or its value is within a small multiple of the rounding level of the
    polynomial at z.

    Raises:
        RootFindingFailure: If not every root converges within ``max_iter``
    """
    tol = config.tolerances.root_tol if tol is None else tol
    max_iter = config.tolerances.root_max_iter if max_iter is None else max_iter

    a = np.trim_zeros(np.asarray(coeffs, dtype=np.complex128), "f")
    n = a.size - 1
    if n < 1:
        return np.empty(0, dtype=np.complex128)
    a = a / a[0]
    if n == 1:
        return np.array([-a[1]])

    radius = 1.0 + float(np.max(np.abs(a[1:])))
    center = -a[1] / n
    angles = 2.0 * np.pi * np.arange(n) / n + _ANGLE_OFFSET
    z = center + 0.5 * radius * np.exp(1j * angles)
    done = np.zeros(n, dtype=bool)

    for iteration in range(1, max_iter + 1):
        for i in range(n):
            if done[i]:
                continue
            p, dp, scale = _horner(a, z[i])
            if abs(p) <= 16.0 * _EPS * scale:
                done[i] = True
                continue
            ratio = p / dp if dp != 0 else p / (scale * _EPS)
            others = np.delete(z, i)
            repulsion = np.sum(1.0 / (z[i] - others))
            delta = ratio / (1.0 - ratio * repulsion)
            z[i] = z[i] - delta
            if abs(delta) <= tol * (1.0 + abs(z[i])):
                done[i] = True
        if done.all():
            logger.debug(f"Aberth iteration converged for degree {n} after {iteration} sweeps")
            return z
    raise RootFindingFailure(
        f"Aberth iteration did not converge in {max_iter} sweeps",
        {"degree": n, "unconverged": int((~done).sum())},
    )
