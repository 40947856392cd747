"""
Stability certificates for the linear system.

After shifting the kernel so its leading characteristic root has real part
zero, the products M_p M_(p-1) ... M_q0 should stay bounded in spectral norm.
The scan records the running sup and a log-spaced profile; the eigen check
cross-validates the spectrum through the generator M~; the similarity check
measures how far ||S^-1 M_p S||_2 exceeds 1.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, List, Optional, Tuple

import numpy as np
from scipy.optimize import linear_sum_assignment

from src.config import config
from src.errors import DegenerateKernel, NormBlowup
from src.kernel.monomial import MonomialKernel, as_kernel
from src.kernel.roots import aberth_roots
from src.kernel.spectrum import characteristic_polynomial, sigma_of_kernel
from src.linear.system import DecayProfile, LinearTrace, power_forcing, run_linear, scaled_sup
from src.linear.transition import tilde_matrix, transition_matrix
from src.numerics.linalg import faddeev_leverrier, power_iteration, spectral_norm
from src.schemas import EigenReport, ScanEntry, ScanReport, SimilarityReport

logger = logging.getLogger(__name__)

PROFILE_POINTS = 64
EIGEN_TOL = 1e-9


def _pairs(values) -> List[Tuple[float, float]]:
    return [(float(np.real(z)), float(np.imag(z))) for z in values]


def normalizing_shift(kernel: MonomialKernel) -> complex:
    """Real shift s with max Re of the roots of kernel.shift(s) equal to 0 (0 for null kernels)."""
    try:
        return complex(sigma_of_kernel(kernel).sigma_G, 0.0)
    except DegenerateKernel:
        return 0j


def _profile_points(q0: int, P: int) -> set:
    return set(np.unique(np.geomspace(q0, P, PROFILE_POINTS).astype(int)).tolist()) | {P}


def scan_products(kernel: MonomialKernel, q0: int, P: int, cap: float,
                  rtol: float) -> ScanEntry:
    """Running sup of ||M_p ... M_q0||_2 for q0 <= p <= P."""
    product = np.eye(kernel.size, dtype=np.complex128)
    v = None
    sup_norm, sup_half = 0.0, None
    half = max(q0, P // 2)
    marks = _profile_points(q0, P)
    profile = []
    for p in range(q0, P + 1):
        product = transition_matrix(kernel, p) @ product
        norm, v = power_iteration(product, tol=1e-10, max_iter=200, v0=v)
        if norm > cap:
            raise NormBlowup(
                f"||M_{p} ... M_{q0}||_2 = {norm:.3g} exceeds cap {cap:.3g}",
                {"q0": q0, "p": p, "norm": norm, "cap": cap},
            )
        sup_norm = max(sup_norm, norm)
        if p == half:
            sup_half = sup_norm
        if p in marks:
            profile.append((p, norm))
    if sup_half is None:
        sup_half = sup_norm
    plateau = sup_norm - sup_half <= rtol * sup_half if sup_half > 0 else sup_norm == 0.0
    return ScanEntry(q0=q0, sup_norm=sup_norm, profile=profile, plateau_detected=bool(plateau))


def product_norm_scan(kernel, q0_set: Iterable[int], P: int, shift: bool = True,
                      cap: Optional[float] = None, rtol: Optional[float] = None,
                      workers: int = 1) -> ScanReport:
    """Scan matrix-product norms for each starting index q0.

    Args:
        kernel: Kernel of the system
        q0_set: Starting indices (>= 2)
        P: Last index of the products
        shift: Shift the kernel so its leading root has real part 0 first
        cap: Norm above which the scan aborts (default from config)
        rtol: Plateau tolerance (default from config)
        workers: Scans for different q0 run on this many threads

    Raises:
        NormBlowup: If a product norm exceeds ``cap``
    """
    kernel = as_kernel(kernel)
    cap = config.tolerances.norm_cap if cap is None else cap
    rtol = config.tolerances.plateau_rtol if rtol is None else rtol
    s = normalizing_shift(kernel) if shift else 0j
    shifted = kernel.shift(s) if s != 0 else kernel
    q0s = sorted(set(int(q) for q in q0_set))
    logger.info(f"Product norm scan: kernel {shifted.to_text()}, q0={q0s}, P={P}")

    def _scan(q0: int) -> ScanEntry:
        return scan_products(shifted, q0, P, cap, rtol)

    if workers > 1 and len(q0s) > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            entries = list(executor.map(_scan, q0s))
    else:
        entries = [_scan(q0) for q0 in q0s]

    return ScanReport(
        kernel=shifted.to_text(),
        shift=(s.real, s.imag),
        P=P,
        entries=entries,
        sup_norm=max((e.sup_norm for e in entries), default=0.0),
        plateau_detected=all(e.plateau_detected for e in entries),
    )


def _match_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Largest distance under the optimal pairing of two root sets."""
    if a.size != b.size:
        return float("inf")
    if a.size == 0:
        return 0.0
    cost = np.abs(a[:, None] - b[None, :])
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].max())


def eigen_check(kernel, tol: float = EIGEN_TOL) -> EigenReport:
    """Compare the eigenvalues of M~ with the characteristic roots of the kernel."""
    kernel = as_kernel(kernel)
    Mt = tilde_matrix(kernel)
    eigenvalues = aberth_roots(faddeev_leverrier(Mt))
    try:
        kernel_roots = np.array(sigma_of_kernel(kernel).roots, dtype=np.complex128)
    except DegenerateKernel:
        kernel_roots = aberth_roots(characteristic_polynomial(kernel))
    mismatch = _match_distance(eigenvalues, kernel_roots)
    numpy_mismatch = _match_distance(np.linalg.eigvals(Mt), kernel_roots)
    logger.info(f"Eigen check: mismatch {mismatch:.3g} (numpy {numpy_mismatch:.3g})")
    return EigenReport(
        matrix=[_pairs(row) for row in Mt],
        eigenvalues=_pairs(sorted(eigenvalues, key=lambda z: (z.real, -z.imag))),
        kernel_roots=_pairs(kernel_roots),
        mismatch=mismatch,
        numpy_mismatch=numpy_mismatch,
        passed=bool(mismatch < tol),
    )


def similarity_check(kernel, P: int = 2000, shift: bool = True) -> SimilarityReport:
    """c = max_p p^2 (||S^-1 M_p S||_2 - 1) with S the eigenvector matrix of M~."""
    kernel = as_kernel(kernel)
    s = normalizing_shift(kernel) if shift else 0j
    shifted = kernel.shift(s) if s != 0 else kernel
    _, S = np.linalg.eig(tilde_matrix(shifted))
    S_inv = np.linalg.inv(S)
    constant, worst_p = -np.inf, 2
    for p in range(2, P + 1):
        norm = spectral_norm(S_inv @ transition_matrix(shifted, p).entries @ S)
        c = p * p * (norm - 1.0)
        if c > constant:
            constant, worst_p = c, p
    cond = float(np.linalg.cond(S))
    logger.info(f"Similarity check: c = {constant:.4g} at p={worst_p}, cond(S) = {cond:.3g}")
    return SimilarityReport(constant=float(constant), worst_p=worst_p, cond_S=cond)


@dataclass(frozen=True)
class ForcedStability:
    """Forcing experiment h_p = C1 p^(sigma - epsilon)."""

    trace: LinearTrace
    sigma_G: float
    profile: DecayProfile
    K_c1: float
    K_c1_xi2: float


def forced_stability(kernel, xi2: float, C1: float, epsilon: float, P: int,
                     rtol: Optional[float] = None) -> ForcedStability:
    """Run the forced system and normalize sup |xi_p| p^-sigma by C1 and by C1 + |xi_2|."""
    kernel = as_kernel(kernel)
    sigma = sigma_of_kernel(kernel).sigma_G
    trace = run_linear(kernel, xi2, power_forcing(C1, sigma - epsilon), P)
    profile = scaled_sup(trace, sigma, rtol=rtol)
    logger.info(f"Forced stability: sup |xi_p| p^-sigma = {profile.sup_scaled:.6g}, "
                f"plateau={profile.plateau_detected}")
    return ForcedStability(
        trace=trace,
        sigma_G=sigma,
        profile=profile,
        K_c1=profile.sup_scaled / C1 if C1 else float("inf"),
        K_c1_xi2=profile.sup_scaled / (C1 + abs(xi2)) if (C1 + abs(xi2)) else float("inf"),
    )
