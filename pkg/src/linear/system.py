"""
The linear recurrent system

    xi_p = h_p + (1/p) sum_{q=2}^{p-1} G(q/p) xi_q,    p >= 3,

evaluated directly in O(P^2). With h = 0 this is the homogeneous system whose
solutions decay like p^sigma(G); a forcing h of higher order keeps that rate.
"""

import logging
from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence, Union

import numpy as np

from src.config import config
from src.errors import ConfigurationError
from src.kernel.monomial import MonomialKernel, as_kernel

logger = logging.getLogger(__name__)

Forcing = Union[None, Callable[[int], float], Sequence[float], np.ndarray, Iterable[float]]


@dataclass(frozen=True, eq=False)
class LinearTrace:
    """Solution of the linear system; ``xi`` and ``h`` are indexed by p (0..P).

    xi[0], xi[1] and h[0..2] are NaN. xi is complex only for complex kernels.
    """

    kernel: MonomialKernel
    xi: np.ndarray
    h: np.ndarray
    P: int
    xi2: complex

    @property
    def p(self) -> np.ndarray:
        return np.arange(self.P + 1)


def forcing_array(h: Forcing, P: int) -> np.ndarray:
    """Materialize h_p for p = 3..P from None, a callable, an indexed sequence or an iterator."""
    out = np.full(P + 1, np.nan)
    if h is None:
        out[3:] = 0.0
    elif callable(h):
        out[3:] = [h(p) for p in range(3, P + 1)]
    elif isinstance(h, (list, tuple, np.ndarray)):
        h = np.asarray(h, dtype=np.float64)
        if h.size < P + 1:
            raise ConfigurationError(f"forcing sequence has {h.size} entries, need P + 1 = {P + 1}")
        out[3:] = h[3:P + 1]
    else:
        it = iter(h)
        try:
            out[3:] = [next(it) for _ in range(3, P + 1)]
        except StopIteration as e:
            raise ConfigurationError(f"forcing iterator ended before p = {P}") from e
    return out


def power_forcing(amplitude: float, exponent: float) -> Callable[[int], float]:
    """h_p = amplitude * p^exponent."""
    return lambda p: amplitude * float(p) ** exponent


def run_linear(kernel, xi2: float, h: Forcing = None, P: int = 1000) -> LinearTrace:
    """Solve the forced linear system to horizon P.

    Args:
        kernel: MonomialKernel (or anything ``as_kernel`` accepts)
        xi2: Initial value xi_2
        h: Forcing h_p, p >= 3 (None for the homogeneous system)
        P: Horizon (>= 3)
    """
    if P < 3:
        raise ConfigurationError(f"run_linear needs P >= 3, got {P}")
    kernel = as_kernel(kernel)
    forcing = forcing_array(h, P)
    dtype = np.float64 if kernel.is_real else np.complex128
    xi = np.full(P + 1, np.nan, dtype=dtype)
    xi[2] = xi2

    logger.debug(f"Linear run: kernel {kernel.to_text()}, xi2={xi2}, P={P}")
    for p in range(3, P + 1):
        q = np.arange(2, p, dtype=np.float64)
        g = kernel(q / p)
        xi[p] = forcing[p] + np.dot(g, xi[2:p]) / p
    return LinearTrace(kernel=kernel, xi=xi, h=forcing, P=P, xi2=xi2)


@dataclass(frozen=True)
class DecayProfile:
    """sup_p |xi_p| p^-sigma over the horizon and over its first half."""

    sup_scaled: float
    sup_scaled_half: float
    plateau_detected: bool
    worst_p: int


def scaled_sup(trace: LinearTrace, sigma: float, rtol: Optional[float] = None,
               normalization: float = 1.0) -> DecayProfile:
    """Running sup of |xi_p| p^-sigma / normalization; plateau if the second half adds < rtol."""
    rtol = config.tolerances.plateau_rtol if rtol is None else rtol
    p = np.arange(2, trace.P + 1, dtype=np.float64)
    scaled = np.abs(trace.xi[2:]) * p ** (-sigma)
    if normalization:
        scaled = scaled / normalization
    running = np.maximum.accumulate(scaled)
    half = running[max(trace.P // 2 - 2, 0)]
    top = float(running[-1])
    plateau = bool(top - half <= rtol * half) if half > 0 else top == 0.0
    return DecayProfile(sup_scaled=top, sup_scaled_half=float(half), plateau_detected=plateau,
                        worst_p=int(p[int(np.argmax(scaled))]))
