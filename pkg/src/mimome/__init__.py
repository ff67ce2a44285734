"""Secrecy capacity of the multi-antenna Gaussian wiretap channel."""

from .errors import (DimensionMismatch, DomainError, MimomeError, NotHermitian,
                     NotPositiveDefinite, ParseError, PreconditionViolated,
                     RankDeficient, SingularNoise, SolverNotConverged)
from .gsvd import (ChannelPair, GsvdResult, SubspaceDims, gsvd,
                   he_pseudo_inverse, null_projector_he, parallel_channel,
                   sigma_max, subspace_dims)
from .io import read_matrix, write_matrix
from .matrix_core import Tolerance
from .regimes import (HighSnrBreakdown, achievability_covariance,
                      high_snr_capacity, is_zero_capacity, masked_mimo_gap,
                      masked_mimo_rate, masked_mimo_rate_dual)
from .scaling import (McSummary, ScalingPoint, asymptotic_sigma_max, frontier,
                      min_eavesdropper_ratio, monte_carlo_sigma_max,
                      optimal_allocation, scaling_point, zero_cap_region)
from .secrecy import (KktReport, NoiseReduction, SaddlePoint, grad_kp,
                      grad_phi, inner_max_kp, rate_minus, rate_plus,
                      reduce_singular_noise, solve_saddle, theta,
                      verify_saddle)

__version__ = "0.1.0"

__all__ = [
    "ChannelPair", "GsvdResult", "SubspaceDims", "Tolerance",
    "gsvd", "subspace_dims", "sigma_max", "he_pseudo_inverse",
    "null_projector_he", "parallel_channel",
    "SaddlePoint", "KktReport", "NoiseReduction",
    "rate_plus", "rate_minus", "theta", "grad_kp", "grad_phi",
    "inner_max_kp", "solve_saddle", "verify_saddle", "reduce_singular_noise",
    "HighSnrBreakdown", "high_snr_capacity", "achievability_covariance",
    "masked_mimo_rate", "masked_mimo_rate_dual", "masked_mimo_gap",
    "is_zero_capacity",
    "ScalingPoint", "McSummary", "asymptotic_sigma_max", "zero_cap_region",
    "scaling_point", "frontier", "optimal_allocation",
    "min_eavesdropper_ratio", "monte_carlo_sigma_max",
    "read_matrix", "write_matrix",
    "MimomeError", "NotHermitian", "NotPositiveDefinite", "RankDeficient",
    "SingularNoise", "PreconditionViolated", "DomainError", "ParseError",
    "DimensionMismatch", "SolverNotConverged",
]
