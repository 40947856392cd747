"""
Small dense linear algebra used by the stability scans.

Only what the product-norm machinery needs: the spectral norm through power
iteration on M^H M, and the characteristic polynomial of a matrix.
"""

import logging
from typing import Optional, Tuple

import numpy as np

from src.errors import NonFinite

logger = logging.getLogger(__name__)


def power_iteration(M: np.ndarray, tol: float = 1e-12, max_iter: int = 1000,
                    v0: Optional[np.ndarray] = None, seed: int = 0) -> Tuple[float, np.ndarray]:
    """Largest singular value of ``M`` and its right singular vector.

    Args:
        M: Square (or rectangular) complex matrix
        tol: Relative change of the Rayleigh quotient that stops the iteration
        max_iter: Iteration cap
        v0: Warm-start vector (e.g. the vector of the previous product)
        seed: Seed of the perturbation added to the all-ones start vector

    Returns:
        (norm, v) with ``norm = ||M||_2``

    Raises:
        NonFinite: If ``M`` has NaN or infinite entries
    """
    M = np.atleast_2d(np.asarray(M, dtype=np.complex128))
    if not np.all(np.isfinite(M)):
        raise NonFinite("matrix has non-finite entries", {"shape": list(M.shape)})
    n = M.shape[1]
    if not np.any(M):
        return 0.0, np.ones(n, dtype=np.complex128) / np.sqrt(n)

    if v0 is None or not np.any(v0):
        rng = np.random.default_rng(seed)
        v = np.ones(n, dtype=np.complex128) + 1e-3 * rng.standard_normal(n)
    else:
        v = np.asarray(v0, dtype=np.complex128).copy()
    v /= np.linalg.norm(v)

    A = M.conj().T @ M
    rayleigh = float(np.real(np.vdot(v, A @ v)))
    for iteration in range(max_iter):
        w = A @ v
        w_norm = np.linalg.norm(w)
        if w_norm == 0.0:
            # v landed in the null space; restart on the dominant column
            v = A[:, int(np.argmax(np.linalg.norm(A, axis=0)))].copy()
            v /= np.linalg.norm(v)
            continue
        v = w / w_norm
        new = float(np.real(np.vdot(v, A @ v)))
        if abs(new - rayleigh) <= tol * abs(new):
            rayleigh = new
            break
        rayleigh = new
    else:
        logger.debug(f"power iteration hit max_iter={max_iter} (rayleigh={rayleigh:.6g})")
    return float(np.sqrt(max(rayleigh, 0.0))), v


def spectral_norm(M: np.ndarray, tol: float = 1e-12, seed: int = 0,
                  max_iter: int = 1000) -> float:
    """||M||_2 as sqrt of the largest eigenvalue of M^H M."""
    norm, _ = power_iteration(M, tol=tol, max_iter=max_iter, seed=seed)
    return norm


def faddeev_leverrier(M: np.ndarray) -> np.ndarray:
    """Coefficients of det(lambda I - M), highest degree first (monic)."""
    M = np.atleast_2d(np.asarray(M, dtype=np.complex128))
    n = M.shape[0]
    coeffs = np.zeros(n + 1, dtype=np.complex128)
    coeffs[0] = 1.0
    Mk = np.zeros_like(M)
    identity = np.eye(n, dtype=np.complex128)
    for k in range(1, n + 1):
        Mk = M @ Mk + coeffs[k - 1] * identity
        coeffs[k] = -np.trace(M @ Mk) / k
    return coeffs
