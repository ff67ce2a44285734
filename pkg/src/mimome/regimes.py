"""High-SNR capacity asymptotics, the constructive achievability covariance,
the masked-MIMO baseline and its capacity gap, and the zero-capacity test."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import PreconditionViolated
from .gsvd import ChannelPair, GsvdResult, gsvd, null_projector_he, sigma_max
from .matrix_core import Tolerance, herm, logdet_hpd, matrix_rank

LN2 = math.log(2.0)

# Dual masked-rate evaluations must agree this tightly or something is wrong
# with the input's rank structure.
MASKED_CROSS_TOL = 1e-9


@dataclass(frozen=True)
class HighSnrBreakdown:
    """Asymptotic secrecy capacity split into its two terms.

    total_bits = c0_bits + gsv_sum_bits; c0_bits is nonzero only when the
    eavesdropper's channel lacks full column rank and a receiver-only
    subspace exists.  The value is an asymptote (the vanishing finite-power
    correction is dropped), not a bound.
    """

    c0_bits: float
    gsv_sum_bits: float
    total_bits: float
    case: str                      # "full_column_rank_he" | "rank_deficient_he"
    flagged_empty_sr: bool = False  # rank-deficient He but p = 0: c0 set to 0


def high_snr_capacity(ch: ChannelPair, power,
                      tol: Tolerance = Tolerance()) -> HighSnrBreakdown:
    """High-power secrecy capacity asymptote.

    gsv_sum is the sum of log2 sigma^2 over generalized singular values
    >= 1; c0 is log2 det(I + (P/p) Hr He# Hr†) with He# the projector onto
    the part of Null(He) visible to the receiver, applicable only when He
    is column-rank deficient.
    """
    power = float(power)
    if power <= 0.0:
        raise PreconditionViolated("power must be positive")
    g = gsvd(ch, tol)
    gsv_sum = float(sum(2.0 * math.log2(s) for s in g.sigma if s >= 1.0))
    rank_he = g.dims.k - g.dims.p
    if rank_he == ch.nt:
        return HighSnrBreakdown(c0_bits=0.0, gsv_sum_bits=gsv_sum,
                                total_bits=gsv_sum, case="full_column_rank_he")
    p = g.dims.p
    if p == 0:
        # eavesdropper rank deficiency lives entirely in the shared null
        # space; no receiver-only subchannel, so the extra term is empty
        return HighSnrBreakdown(c0_bits=0.0, gsv_sum_bits=gsv_sum,
                                total_bits=gsv_sum, case="rank_deficient_he",
                                flagged_empty_sr=True)
    he_null = null_projector_he(g)
    gram = herm(np.eye(ch.nr) + (power / p) * ch.hr @ he_null @ ch.hr.conj().T)
    c0 = logdet_hpd(gram) / LN2
    return HighSnrBreakdown(c0_bits=c0, gsv_sum_bits=gsv_sum,
                            total_bits=c0 + gsv_sum, case="rank_deficient_he")


def achievability_covariance(g: GsvdResult, power) -> np.ndarray:
    """Transmit covariance of the constructive high-SNR scheme.

    Full-column-rank eavesdropper: signal only on the shared subchannels
    with gain ratio sigma > 1, each at power alpha*P with
    alpha = 1/(Nt sigma_max(Omega)).  Rank-deficient case: power P - sqrt(P)
    spread over the p receiver-only coordinates and sqrt(P)*alpha on the
    favorable shared coordinates, alpha = 1/(Nt sigma_max(Omega_2)).
    The result is rescaled if necessary so tr K <= P holds exactly.
    """
    power = float(power)
    if power <= 0.0:
        raise PreconditionViolated("power must be positive")
    nt = g.psi_t.shape[0]
    k, p, s = g.dims.k, g.dims.p, g.dims.s
    active = [j for j in range(s) if g.sigma[j] > 1.0]
    rank_he = k - p

    cov = np.zeros((nt, nt), dtype=np.complex128)
    if rank_he == nt:
        if active:
            t_map = g.psi_t @ g.omega          # k = nt here
            alpha = power / (nt * float(np.linalg.svd(g.omega, compute_uv=False)[0]))
            d = np.zeros(nt)
            for j in active:
                d[k - s + j] = alpha
            cov = (t_map * d) @ t_map.conj().T
    else:
        prefix = np.zeros((k, k), dtype=np.complex128)
        if active:
            om2 = g.omega[k - p - s:k - p, k - p - s:k - p]
            alpha = math.sqrt(power) / \
                (nt * float(np.linalg.svd(om2, compute_uv=False)[0]))
            du = np.zeros(s)
            for j in active:
                du[j] = alpha
            prefix[k - p - s:k - p, k - p - s:k - p] = (om2 * du) @ om2.conj().T
        if p > 0:
            per_dim = max(power - math.sqrt(power), 0.0) / p
            prefix[k - p:, k - p:] = per_dim * np.eye(p)
        basis = g.psi_t[:, :k]
        cov = basis @ prefix @ basis.conj().T

    cov = herm(cov)
    tr = float(np.real(np.trace(cov)))
    if tr > power:
        cov *= power / tr
    return cov


def _require_masked_preconditions(ch: ChannelPair, tol: Tolerance):
    if not (ch.nr <= ch.nt <= ch.ne):
        raise PreconditionViolated(
            f"masked scheme needs Nr <= Nt <= Ne, got ({ch.nr},{ch.nt},{ch.ne})")
    if matrix_rank(ch.hr, tol) != ch.nr:
        raise PreconditionViolated("masked scheme needs rank(Hr) = Nr")
    if matrix_rank(ch.he, tol) != ch.nt:
        raise PreconditionViolated("masked scheme needs rank(He) = Nt")


def masked_mimo_rate_dual(ch: ChannelPair, power,
                          tol: Tolerance = Tolerance()) -> tuple[float, float]:
    """Masked-MIMO achievable rate evaluated two independent ways, in bits.

    Returns (direct, cross): the closed-form determinant expression on the
    receiver's singular basis, and the mutual-information difference
    I(u; yr) - I(u; ye) evaluated from its two entropy terms.  They must
    agree; the pair is exposed for reporting the cross-check delta.
    """
    power = float(power)
    if power <= 0.0:
        raise PreconditionViolated("power must be positive")
    _require_masked_preconditions(ch, tol)
    p_t = power / ch.nt
    _, sv, vh = np.linalg.svd(ch.hr, full_matrices=False)
    vr = vh.conj().T                               # Nt x Nr, right basis of Hr
    m_e = herm(np.eye(ch.nt) + p_t * ch.he.conj().T @ ch.he)
    m_e_inv = np.linalg.inv(m_e)
    # symmetric sandwich: same determinant as the asymmetric product
    d_half = np.sqrt(p_t + sv ** -2.0)
    direct = logdet_hpd(herm((d_half[:, None] * (ch.hr @ m_e_inv @ ch.hr.conj().T))
                             * d_half[None, :])) / LN2
    cross = (logdet_hpd(herm(np.eye(ch.nr)
                             + p_t * ch.hr @ ch.hr.conj().T))
             + logdet_hpd(herm(vr.conj().T @ m_e_inv @ vr))) / LN2
    return direct, cross


def masked_mimo_rate(ch: ChannelPair, power,
                     tol: Tolerance = Tolerance()) -> float:
    """Achievable rate of the masked (artificial-noise) scheme in bits."""
    direct, cross = masked_mimo_rate_dual(ch, power, tol)
    if abs(direct - cross) > MASKED_CROSS_TOL:
        raise PreconditionViolated(
            f"masked rate evaluations disagree by {abs(direct - cross):.3e} bits")
    return direct


def masked_mimo_gap(ch: ChannelPair, tol: Tolerance = Tolerance()) -> float:
    """Asymptotic shortfall of the masked scheme from capacity:
    sum of log2(1/sigma^2) over generalized singular values below 1."""
    _require_masked_preconditions(ch, tol)
    g = gsvd(ch, tol)
    return float(sum(2.0 * math.log2(1.0 / s) for s in g.sigma if s < 1.0))


def is_zero_capacity(ch: ChannelPair, tol: Tolerance = Tolerance()) -> bool:
    """True when no positive secrecy rate is possible at any power:
    the largest generalized singular value is at most 1."""
    return bool(sigma_max(ch, tol) <= 1.0 + tol.rank_rel)
