"""Dense complex-matrix substrate.

Hermitian checks, log-determinants, rank and null-space computations with
an explicit tolerance policy, and the two projections the saddle solver
needs (PSD cone with trace cap, spectral ball).

All entropic quantities elsewhere are kept in nats internally; this module
is unit-free.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotHermitian, NotPositiveDefinite

# Relative Frobenius threshold for accepting a matrix as Hermitian.
HERMITIAN_RTOL = 1e-12


@dataclass(frozen=True)
class Tolerance:
    """Numerical policy knobs.

    rank_rel:   singular value s counts toward rank iff s > rank_rel * s_max.
    conv_abs:   saddle-solver convergence threshold, in bits.
    psd_margin: smallest admissible distance of the noise cross-covariance
                spectrum from the unit boundary.
    """

    rank_rel: float = 1e-10
    conv_abs: float = 1e-5
    psd_margin: float = 1e-7

    def __post_init__(self):
        if not (0.0 < self.rank_rel < 1.0):
            raise ValueError("rank_rel must lie in (0, 1)")
        if self.conv_abs <= 0.0:
            raise ValueError("conv_abs must be positive")
        if self.psd_margin <= 0.0:
            raise ValueError("psd_margin must be positive")


def as_cmatrix(a, name: str = "matrix") -> np.ndarray:
    """Validate and coerce to a finite complex 2-D array."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise ValueError(f"{name} must be a 2-D matrix, got shape {m.shape}")
    if not (np.isfinite(m.real).all() and np.isfinite(m.imag).all()):
        raise ValueError(f"{name} contains non-finite entries")
    return m


def herm(m: np.ndarray) -> np.ndarray:
    """Hermitian symmetrization (M + M†)/2, applied before eigendecompositions
    to suppress round-off drift."""
    return 0.5 * (m + m.conj().T)


def require_hermitian(m: np.ndarray, rtol: float = HERMITIAN_RTOL,
                      name: str = "matrix") -> np.ndarray:
    m = as_cmatrix(m, name)
    if m.shape[0] != m.shape[1]:
        raise NotHermitian(f"{name} is not square: {m.shape}")
    scale = np.linalg.norm(m)
    if np.linalg.norm(m - m.conj().T) > rtol * max(scale, 1.0):
        raise NotHermitian(f"{name} deviates from Hermitian beyond {rtol} relative")
    return m


def logdet_hpd(m) -> float:
    """Natural log-determinant of a Hermitian positive-definite matrix,
    via Cholesky.

    Raises NotHermitian / NotPositiveDefinite; either signals a broken
    invariant upstream (e.g. a noise cross-covariance outside its ball).
    """
    m = require_hermitian(m, name="logdet_hpd input")
    try:
        chol = np.linalg.cholesky(herm(m))
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite(str(exc)) from exc
    return 2.0 * float(np.sum(np.log(np.real(np.diag(chol)))))


def matrix_rank(m, tol: Tolerance = Tolerance()) -> int:
    """Rank under the package-wide policy: s_i counts iff s_i > rank_rel * s_max."""
    m = as_cmatrix(m)
    sv = np.linalg.svd(m, compute_uv=False)
    if sv.size == 0 or sv[0] == 0.0:
        return 0
    return int(np.count_nonzero(sv > tol.rank_rel * sv[0]))


def null_space(m, tol: Tolerance = Tolerance()) -> np.ndarray:
    """Orthonormal basis of Null(M), as columns.

    A zero matrix returns the full identity basis; a full-column-rank matrix
    returns an empty (cols x 0) array.
    """
    m = as_cmatrix(m)
    _, sv, vh = np.linalg.svd(m, full_matrices=True)
    smax = sv[0] if sv.size else 0.0
    rank = int(np.count_nonzero(sv > tol.rank_rel * smax)) if smax > 0.0 else 0
    return vh[rank:].conj().T


def range_space(m, tol: Tolerance = Tolerance()) -> np.ndarray:
    """Orthonormal basis of the row space of M, i.e. Null(M)^perp."""
    m = as_cmatrix(m)
    _, sv, vh = np.linalg.svd(m, full_matrices=True)
    smax = sv[0] if sv.size else 0.0
    rank = int(np.count_nonzero(sv > tol.rank_rel * smax)) if smax > 0.0 else 0
    return vh[:rank].conj().T


def _project_capped_simplex(lam: np.ndarray, cap: float) -> np.ndarray:
    """Euclidean projection of a real vector onto {x >= 0, sum(x) <= cap}."""
    clipped = np.maximum(lam, 0.0)
    if clipped.sum() <= cap:
        return clipped
    # Active sum constraint: water-level shift against the simplex of mass cap.
    u = np.sort(lam)[::-1]
    css = np.cumsum(u) - cap
    idx = np.arange(1, lam.size + 1)
    rho = np.nonzero(u - css / idx > 0.0)[0][-1]
    theta = css[rho] / (rho + 1.0)
    return np.maximum(lam - theta, 0.0)


def psd_project(m, trace_cap: float) -> np.ndarray:
    """Euclidean-nearest matrix in {X >= 0, tr X <= trace_cap}.

    Eigendecomposition, negative-eigenvalue clipping, then (only if needed)
    projection of the eigenvalue vector onto the trace-capped simplex.
    """
    if trace_cap <= 0.0:
        raise ValueError("trace_cap must be positive")
    m = require_hermitian(m, rtol=1e-10, name="psd_project input")
    lam, vec = np.linalg.eigh(herm(m))
    lam = _project_capped_simplex(lam, trace_cap)
    return herm((vec * lam) @ vec.conj().T)


def spectral_ball_project(phi, radius: float) -> np.ndarray:
    """Clip the singular values of phi to at most `radius` (SVD clip).

    Frobenius-nearest matrix with spectral norm <= radius.
    """
    if not (0.0 < radius <= 1.0):
        raise ValueError("radius must lie in (0, 1]")
    phi = as_cmatrix(phi, "phi")
    u, sv, vh = np.linalg.svd(phi, full_matrices=False)
    if sv.size == 0 or sv[0] <= radius:
        return phi
    return (u * np.minimum(sv, radius)) @ vh
