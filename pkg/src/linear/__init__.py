"""The linear recurrent system, its moments and stability certificates."""

from src.linear.moments import MomentState, moment_transform
from src.linear.stability import (
    ForcedStability,
    eigen_check,
    forced_stability,
    normalizing_shift,
    product_norm_scan,
    similarity_check,
)
from src.linear.system import DecayProfile, LinearTrace, power_forcing, run_linear, scaled_sup
from src.linear.transition import TransitionMatrix, matrix_path, tilde_matrix, transition_matrix

__all__ = [
    "DecayProfile",
    "ForcedStability",
    "LinearTrace",
    "MomentState",
    "TransitionMatrix",
    "eigen_check",
    "forced_stability",
    "matrix_path",
    "moment_transform",
    "normalizing_shift",
    "power_forcing",
    "product_norm_scan",
    "run_linear",
    "scaled_sup",
    "similarity_check",
    "tilde_matrix",
    "transition_matrix",
]
