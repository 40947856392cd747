"""Transition matrices of the scaled-moment recursion B~_p = M_p B~_(p-1) + g_p."""

from dataclasses import dataclass

import numpy as np

from src.errors import ConfigurationError
from src.kernel.monomial import MonomialKernel, as_kernel
from src.linear.system import Forcing, forcing_array


@dataclass(frozen=True, eq=False)
class TransitionMatrix:
    """M_p^(k,j) = r^(alpha_k+1) delta_kj + C_j r^(alpha_j+1) / p with r = 1 - 1/p."""

    entries: np.ndarray
    p: int

    def __matmul__(self, other):
        other = other.entries if isinstance(other, TransitionMatrix) else other
        return self.entries @ other


def _decay_factors(kernel: MonomialKernel, p: int) -> np.ndarray:
    """r^(alpha+1) through the real logarithm of r = 1 - 1/p > 0."""
    return np.exp((kernel.alpha + 1.0) * np.log1p(-1.0 / p))


def transition_matrix(kernel, p: int) -> TransitionMatrix:
    if p < 2:
        raise ConfigurationError(f"transition matrices start at p = 2, got {p}")
    kernel = as_kernel(kernel)
    decay = _decay_factors(kernel, p)
    entries = np.diag(decay) + np.outer(np.ones(kernel.size), kernel.C * decay) / p
    return TransitionMatrix(entries=entries, p=p)


def tilde_matrix(kernel) -> np.ndarray:
    """Leading-order generator M~^(k,j) = C_j - (alpha_k+1) delta_kj, the limit of p (M_p - I)."""
    kernel = as_kernel(kernel)
    return np.outer(np.ones(kernel.size), kernel.C) - np.diag(kernel.alpha + 1.0)


def matrix_path(kernel, xi2: float, h: Forcing = None, P: int = 1000) -> np.ndarray:
    """xi_p for p = 0..P by evolving the scaled moments with M_p (cross-check of run_linear)."""
    kernel = as_kernel(kernel)
    forcing = forcing_array(h, P)
    xi = np.full(P + 1, np.nan, dtype=np.complex128)
    xi[2] = xi2
    ones = np.ones(kernel.size)
    b = ones * xi2 / 2.0
    for p in range(3, P + 1):
        decay = _decay_factors(kernel, p)
        xi[p] = forcing[p] + np.dot(kernel.C * decay, b)
        b = transition_matrix(kernel, p).entries @ b + forcing[p] / p * ones
    return xi.real.copy() if kernel.is_real else xi
