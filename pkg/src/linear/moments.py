"""
Moments of a linear solution.

B^(k)_p = sum_{q=2}^p xi_q q^alpha_k turns the convolution into a vector
recursion: xi_p = h_p + sum_k C_k p^-(alpha_k+1) B^(k)_(p-1). The scaled
moments B~^(k)_p = p^-(alpha_k+1) B^(k)_p stay bounded when the solution
decays at the characteristic rate.
"""

import logging
from dataclasses import dataclass

import numpy as np

from src.linear.system import LinearTrace
from src.numerics.accumulate import dd_cumsum

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class MomentState:
    """Moments indexed [k, p] for p = 0..P (columns 0 and 1 are zero).

    Attributes:
        B: Raw moments
        B_tilde: Scaled moments
        residual: max_p |xi_p - h_p - sum_k C_k p^-(alpha_k+1) B^(k)_(p-1)| relative
            to the same sum taken in absolute values
        worst_p: Index of the largest residual
    """

    B: np.ndarray
    B_tilde: np.ndarray
    residual: float
    worst_p: int

    @property
    def sup_norm(self) -> float:
        """max_p ||B~_p||_2 over p >= 2."""
        if self.B_tilde.shape[1] <= 2:
            return 0.0
        return float(np.max(np.linalg.norm(self.B_tilde[:, 2:], axis=0)))


def _cumsum_complex(values: np.ndarray) -> np.ndarray:
    re_hi, re_lo = dd_cumsum(values.real)
    im_hi, im_lo = dd_cumsum(values.imag)
    return (re_hi + re_lo) + 1j * (im_hi + im_lo)


def moment_transform(trace: LinearTrace) -> MomentState:
    """Fill B and B~ from a linear trace and measure the reconstruction residual."""
    kernel = trace.kernel
    P = trace.P
    q = np.arange(P + 1, dtype=np.float64)
    xi = np.nan_to_num(np.asarray(trace.xi, dtype=np.complex128))
    alpha = kernel.alpha
    C = kernel.C

    B = np.zeros((kernel.size, P + 1), dtype=np.complex128)
    B_abs = np.zeros((kernel.size, P + 1))
    B_tilde = np.zeros_like(B)
    logq = np.log(q[2:])
    for k, a in enumerate(alpha):
        weights = np.exp(a * logq)
        B[k, 2:] = _cumsum_complex(xi[2:] * weights)
        B_abs[k, 2:] = np.cumsum(np.abs(xi[2:] * weights))
        B_tilde[k, 2:] = np.exp(-(a + 1.0) * logq) * B[k, 2:]

    residual, worst_p = 0.0, 2
    if P >= 3:
        p = q[3:]
        scale = np.exp(-np.outer(alpha + 1.0, np.log(p)))
        recon = np.sum(C[:, None] * scale * B[:, 2:P], axis=0)
        magnitude = np.sum(np.abs(C)[:, None] * np.abs(scale) * B_abs[:, 2:P], axis=0)
        h = np.nan_to_num(trace.h[3:])
        err = np.abs(xi[3:] - h - recon)
        denom = np.abs(h) + magnitude
        rel = np.where(denom > 0, err / np.where(denom > 0, denom, 1.0), err)
        idx = int(np.argmax(rel))
        residual, worst_p = float(rel[idx]), idx + 3

    logger.debug(f"Moment reconstruction residual {residual:.3g} at p={worst_p}")
    return MomentState(B=B, B_tilde=B_tilde, residual=residual, worst_p=worst_p)
