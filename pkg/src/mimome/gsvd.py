"""Generalized singular value decomposition of a channel pair.

The factorization is Hr = Psi_r @ Sigma_r @ [Omega^-1 0] @ Psi_t^dagger and
He = Psi_e @ Sigma_e @ [Omega^-1 0] @ Psi_t^dagger, with unitary Psi factors,
lower-triangular nonsingular Omega, and block-diagonal gain matrices whose
column blocks (k-p-s | s | p) separate directions visible to the eavesdropper
only, to both terminals, and to the intended receiver only.

Computed by the QR-then-CS route: orthonormal range basis of the stacked
channel, SVD of its receiver block (the CS decomposition of the partitioned
isometry), then an RQ step to shape the triangular factor.  Forming
Hr^dagger Hr is avoided throughout.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .errors import DimensionMismatch, RankDeficient
from .matrix_core import Tolerance, as_cmatrix, herm, matrix_rank, null_space, range_space


@dataclass(frozen=True)
class ChannelPair:
    """Fixed complex gain matrices to the intended receiver (nr x nt) and
    the eavesdropper (ne x nt)."""

    hr: np.ndarray
    he: np.ndarray

    def __post_init__(self):
        hr = as_cmatrix(self.hr, "hr")
        he = as_cmatrix(self.he, "he")
        if hr.shape[1] != he.shape[1]:
            raise DimensionMismatch(
                f"hr and he must share the transmit dimension: {hr.shape} vs {he.shape}")
        object.__setattr__(self, "hr", hr)
        object.__setattr__(self, "he", he)

    @property
    def nt(self) -> int:
        return self.hr.shape[1]

    @property
    def nr(self) -> int:
        return self.hr.shape[0]

    @property
    def ne(self) -> int:
        return self.he.shape[0]

    def stacked(self) -> np.ndarray:
        return np.vstack([self.hr, self.he])


@dataclass(frozen=True)
class SubspaceDims:
    """Dimensions of the input-space partition.

    k: rank of the stacked channel; p: directions seen by the receiver only;
    s: directions seen by both.  Derived: eavesdropper-only k-p-s, invisible
    nt-k.
    """

    k: int
    p: int
    s: int
    nt: int

    def __post_init__(self):
        if not (0 <= self.p and 0 <= self.s and self.p + self.s <= self.k <= self.nt):
            raise ValueError(f"inconsistent subspace dims {self}")

    @property
    def dim_se(self) -> int:
        return self.k - self.p - self.s

    @property
    def dim_sn(self) -> int:
        return self.nt - self.k


@dataclass(frozen=True)
class GsvdResult:
    psi_r: np.ndarray
    psi_e: np.ndarray
    psi_t: np.ndarray
    omega: np.ndarray           # k x k lower triangular, nonsingular
    dr: np.ndarray              # s receiver gains on the shared block, ascending sigma
    de: np.ndarray              # s eavesdropper gains on the shared block
    dims: SubspaceDims
    sigma: np.ndarray = field(init=False)  # generalized singular values dr/de
    rank_ambiguous: bool = False

    def __post_init__(self):
        object.__setattr__(self, "sigma", np.asarray(self.dr) / np.asarray(self.de)
                           if len(self.dr) else np.zeros(0))

    def sigma_r(self) -> np.ndarray:
        """Receiver gain matrix (nr x k) with the (zero | Dr | I) block layout."""
        d = self.dims
        nr = self.psi_r.shape[0]
        out = np.zeros((nr, d.k), dtype=np.complex128)
        for i in range(d.s):
            out[nr - d.p - d.s + i, d.dim_se + i] = self.dr[i]
        for i in range(d.p):
            out[nr - d.p + i, d.dim_se + d.s + i] = 1.0
        return out

    def sigma_e(self) -> np.ndarray:
        """Eavesdropper gain matrix (ne x k) with the (I | De | zero) layout."""
        d = self.dims
        ne = self.psi_e.shape[0]
        out = np.zeros((ne, d.k), dtype=np.complex128)
        for i in range(d.dim_se):
            out[i, i] = 1.0
        for i in range(d.s):
            out[d.dim_se + i, d.dim_se + i] = self.de[i]
        return out

    def omega_inv(self) -> np.ndarray:
        if self.dims.k == 0:
            return np.zeros((0, 0), dtype=np.complex128)
        return sla.solve_triangular(self.omega, np.eye(self.dims.k), lower=True)

    def right_factor(self) -> np.ndarray:
        """[Omega^-1 0] @ Psi_t^dagger, shape k x nt."""
        nt = self.psi_t.shape[0]
        block = np.zeros((self.dims.k, nt), dtype=np.complex128)
        block[:, :self.dims.k] = self.omega_inv()
        return block @ self.psi_t.conj().T

    def reconstruct(self) -> tuple[np.ndarray, np.ndarray]:
        rf = self.right_factor()
        return self.psi_r @ self.sigma_r() @ rf, self.psi_e @ self.sigma_e() @ rf


def _intersection_dim(basis_a: np.ndarray, basis_b: np.ndarray, tol: Tolerance) -> int:
    """dim(span(A) ∩ span(B)) for orthonormal column bases A, B."""
    a, b = basis_a.shape[1], basis_b.shape[1]
    if a == 0 or b == 0:
        return 0
    return a + b - matrix_rank(np.hstack([basis_a, basis_b]), tol)


def subspace_dims(ch: ChannelPair, tol: Tolerance = Tolerance()) -> SubspaceDims:
    """Input-space partition dimensions via orthonormal-basis intersections.

    p counts eavesdropper-null directions not already invisible to everyone:
    dim Null(He) minus dim(Null(Hr) ∩ Null(He)).  This quotient form is the
    one the factorization's block shapes realize; the orthogonal intersection
    Null(Hr)^perp ∩ Null(He) undercounts it when Hr is rank deficient.
    """
    k = matrix_rank(ch.stacked(), tol)
    null_hr = null_space(ch.hr, tol)
    null_he = null_space(ch.he, tol)
    both_null = _intersection_dim(null_hr, null_he, tol)
    p = null_he.shape[1] - both_null
    rank_hr = ch.nt - null_hr.shape[1]
    s = rank_hr - p
    return SubspaceDims(k=k, p=p, s=s, nt=ch.nt)


def _orthonormal_complement(cols: np.ndarray, n: int) -> np.ndarray:
    """Orthonormal basis of the complement of the given orthonormal columns."""
    if cols.shape[1] == 0:
        return np.eye(n, dtype=np.complex128)
    return null_space(cols.conj().T)


def gsvd(ch: ChannelPair, tol: Tolerance = Tolerance()) -> GsvdResult:
    """Compute the GSVD of (Hr, He) in the block parametrization above.

    Shared-block generalized singular values are returned ascending.  A
    `rank_ambiguous` flag is set (never raised) when a singular value sits
    within a factor 10 of the rank threshold.
    """
    hr, he = ch.hr, ch.he
    nr, ne, nt = ch.nr, ch.ne, ch.nt

    stacked = ch.stacked()
    u_st, sv_st, vh_st = np.linalg.svd(stacked, full_matrices=True)
    smax = sv_st[0] if sv_st.size else 0.0
    k = int(np.count_nonzero(sv_st > tol.rank_rel * smax)) if smax > 0.0 else 0

    ambiguous = _near_threshold(sv_st, tol)

    if k == 0:
        return GsvdResult(
            psi_r=np.eye(nr, dtype=np.complex128),
            psi_e=np.eye(ne, dtype=np.complex128),
            psi_t=np.eye(nt, dtype=np.complex128),
            omega=np.zeros((0, 0), dtype=np.complex128),
            dr=np.zeros(0), de=np.zeros(0),
            dims=SubspaceDims(k=0, p=0, s=0, nt=nt),
            rank_ambiguous=ambiguous)

    q = u_st[:, :k]                                    # orthonormal range basis
    r_fac = sv_st[:k, None] * vh_st[:k, :]             # k x nt, stacked = q @ r_fac
    q1, q2 = q[:nr, :], q[nr:, :]

    sv_hr = np.linalg.svd(hr, compute_uv=False)
    sv_he = np.linalg.svd(he, compute_uv=False)
    rank_hr = int(np.count_nonzero(sv_hr > tol.rank_rel * sv_hr[0])) if sv_hr[0] > 0 else 0
    rank_he = int(np.count_nonzero(sv_he > tol.rank_rel * sv_he[0])) if sv_he[0] > 0 else 0
    ambiguous = ambiguous or _near_threshold(sv_hr, tol) or _near_threshold(sv_he, tol)

    p = k - rank_he
    s = rank_hr + rank_he - k
    dims = SubspaceDims(k=k, p=p, s=s, nt=nt)

    # CS step: SVD of the receiver block of the isometry [q1; q2].  Ordering
    # the cosines ascending puts eavesdropper-only, shared, receiver-only
    # column blocks in that order, with ascending sigma inside the shared one.
    u1, c_sv, wh = np.linalg.svd(q1, full_matrices=True)
    c_full = np.zeros(k)
    c_full[:c_sv.size] = c_sv
    order = np.argsort(c_full, kind="stable")
    c_asc = c_full[order]
    w = wh.conj().T[:, order]

    dim_se = k - p - s
    # Receiver-side unitary: shared and receiver-only left vectors occupy the
    # trailing s+p columns; leading columns complete the basis.
    active_u = []
    for j in range(dim_se, k):
        orig = order[j]
        active_u.append(u1[:, orig])
    active_u = np.column_stack(active_u) if active_u else np.zeros((nr, 0), dtype=np.complex128)
    psi_r = np.empty((nr, nr), dtype=np.complex128)
    psi_r[:, nr - p - s:] = active_u
    psi_r[:, :nr - p - s] = _orthonormal_complement(active_u, nr)

    # Eavesdropper-side unitary from the complementary sine columns.
    q2w = q2 @ w
    sines = np.linalg.norm(q2w, axis=0)
    v_cols = []
    for j in range(k - p):
        v_cols.append(q2w[:, j] / sines[j])
    v_cols = np.column_stack(v_cols) if v_cols else np.zeros((ne, 0), dtype=np.complex128)
    if v_cols.shape[1] > 1:
        # Direction-preserving Gram-Schmidt pass against round-off; the
        # columns are already orthonormal up to machine precision.
        v_cols = _mgs(v_cols)
    psi_e = np.empty((ne, ne), dtype=np.complex128)
    psi_e[:, :k - p] = v_cols
    psi_e[:, k - p:] = _orthonormal_complement(v_cols, ne)

    dr = c_asc[dim_se:dim_se + s].copy()
    de = sines[dim_se:dim_se + s].copy()

    if s > 0:
        # Shared-block gains collapsing toward the rank cut mean the
        # eavesdropper-only / receiver-only classification is fragile.
        ambiguous = ambiguous or bool(
            dr.min() < 10.0 * tol.rank_rel or de.min() < 10.0 * tol.rank_rel)

    # RQ step: unitary psi_t with [w^dag r_fac] @ psi_t = [L 0], L lower triangular.
    x = w.conj().T @ r_fac                             # k x nt
    q_x, r_x = np.linalg.qr(x.conj().T, mode="complete")
    psi_t = q_x
    lower = r_x[:k, :k].conj().T
    # Keep the triangular diagonal positive-real for a reproducible factor.
    phase = np.diag(lower).copy()
    phase = np.where(np.abs(phase) > 0, phase / np.abs(phase), 1.0)
    psi_t = psi_t.copy()
    psi_t[:, :k] = psi_t[:, :k] * phase[None, :].conj()
    lower = lower * phase[None, :].conj()

    omega = sla.solve_triangular(lower, np.eye(k), lower=True)
    # Zero the strict upper triangle left by round-off.
    omega = np.tril(omega)

    return GsvdResult(psi_r=psi_r, psi_e=psi_e, psi_t=psi_t, omega=omega,
                      dr=dr, de=de, dims=dims, rank_ambiguous=ambiguous)


def _mgs(cols: np.ndarray) -> np.ndarray:
    """Modified Gram-Schmidt that keeps each column aligned with its input."""
    out = cols.astype(np.complex128, copy=True)
    for j in range(out.shape[1]):
        for i in range(j):
            out[:, j] -= (out[:, i].conj() @ out[:, j]) * out[:, i]
        out[:, j] /= np.linalg.norm(out[:, j])
    return out


def _near_threshold(sv: np.ndarray, tol: Tolerance) -> bool:
    """Flag singular values within a factor 10 of the rank cut."""
    if sv.size == 0 or sv[0] == 0.0:
        return False
    cut = tol.rank_rel * sv[0]
    return bool(np.any((sv > cut / 10.0) & (sv < cut * 10.0)))


def sigma_max(ch: ChannelPair, tol: Tolerance = Tolerance()) -> float:
    """Largest generalized singular value sup ||Hr v|| / ||He v||.

    Infinite when a receiver-only direction exists (p > 0); zero when no
    direction reaches the receiver at all.
    """
    g = gsvd(ch, tol)
    if g.dims.p > 0:
        return float("inf")
    if g.dims.s == 0:
        return 0.0
    return float(np.max(g.sigma))


def he_pseudo_inverse(g: GsvdResult) -> np.ndarray:
    """Moore-Penrose pseudo-inverse of He assembled from the GSVD factors.

    Requires full column rank (k = nt, p = 0)."""
    d = g.dims
    if d.p != 0 or d.k != d.nt:
        raise RankDeficient("He lacks full column rank; pseudo-inverse form unavailable")
    nt = d.nt
    ne = g.psi_e.shape[0]
    mid = np.zeros((nt, ne), dtype=np.complex128)
    for i in range(nt - d.s):
        mid[i, i] = 1.0
    for i in range(d.s):
        mid[nt - d.s + i, nt - d.s + i] = 1.0 / g.de[i]
    return g.psi_t @ g.omega @ mid @ g.psi_e.conj().T


def null_projector_he(g: GsvdResult) -> np.ndarray:
    """Orthogonal projector onto Null(He): the trailing nt-(k-p) columns of
    Psi_t span the receiver-only and invisible subspaces."""
    d = g.dims
    psi_ne = g.psi_t[:, d.k - d.p:]
    return herm(psi_ne @ psi_ne.conj().T)


def parallel_channel(g: GsvdResult):
    """Equivalent parallel model: reduced diagonal gains and the linear maps
    taking the original signals onto them.

    Returns (sigma_r_tilde, sigma_e_tilde, input_transform, (tr, te)) with
    tr @ Hr == sigma_r_tilde @ input_transform and symmetrically for He.
    """
    d = g.dims
    nr = g.psi_r.shape[0]
    sig_r = np.zeros((d.s + d.p, d.k), dtype=np.complex128)
    for i in range(d.s):
        sig_r[i, d.dim_se + i] = g.dr[i]
    for i in range(d.p):
        sig_r[d.s + i, d.dim_se + d.s + i] = 1.0
    sig_e = np.zeros((d.k - d.p, d.k), dtype=np.complex128)
    for i in range(d.dim_se):
        sig_e[i, i] = 1.0
    for i in range(d.s):
        sig_e[d.dim_se + i, d.dim_se + i] = g.de[i]

    input_transform = g.omega_inv() @ g.psi_t[:, :d.k].conj().T
    tr = g.psi_r[:, nr - d.p - d.s:].conj().T
    te = g.psi_e[:, :d.k - d.p].conj().T
    return sig_r, sig_e, input_transform, (tr, te)
