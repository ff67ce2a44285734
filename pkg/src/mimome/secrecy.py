"""Secrecy capacity of the Gaussian multi-antenna wiretap channel.

Evaluates the genie-aided conditional rate R+ and the difference rate R-,
solves the convex-concave saddle problem

    C = min_{Phi}  max_{K}  R+(K, Phi)

over transmit covariances K (PSD, trace <= P) and noise cross-covariances
Phi (spectral norm <= 1), and certifies solutions through the primal-dual
gap |R+ - R-| together with probe-based saddle inequalities and the
degradedness residual.

Rates are exposed in bits; gradients are in nats (the internal unit).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import PreconditionViolated, SingularNoise
from .gsvd import ChannelPair, sigma_max
from .matrix_core import (
    Tolerance,
    as_cmatrix,
    herm,
    logdet_hpd,
    psd_project,
    spectral_ball_project,
)

LN2 = math.log(2.0)

# Iteration caps; both paths return the best iterate when exhausted.
MAX_INNER_ITER = 1000
MAX_OUTER_ITER = 5000

ARMIJO_BACKTRACK = 0.5
ARMIJO_SLOPE = 1e-4


@dataclass(frozen=True)
class SaddlePoint:
    """Converged (or best-effort) solution of the saddle problem."""

    k_bar: np.ndarray          # transmit covariance, Nt x Nt PSD, tr <= P
    phi_bar: np.ndarray        # noise cross-covariance, Nr x Ne
    capacity_bits: float
    theta_bar: np.ndarray      # MMSE coefficient at the solution, Nr x Ne
    iterations: int
    gap_bits: float            # |R+ - R-| at the returned iterate
    power: float


@dataclass(frozen=True)
class KktReport:
    saddle_resid: float        # worst probe violation of the saddle inequalities, bits
    degraded_resid: float      # ||Phi† Hr S - He S||_F / ||He S||_F, 0 when C = 0
    gap_bits: float
    zero_cap: bool             # Hr ≈ Theta He, the zero-capacity witness


def _require_power(p) -> float:
    p = float(p)
    if not (p > 0.0) or not math.isfinite(p):
        raise PreconditionViolated(f"power must be positive and finite, got {p}")
    return p


def _check_phi(phi, ch: ChannelPair, tol: Tolerance) -> np.ndarray:
    phi = as_cmatrix(phi, "phi")
    if phi.shape != (ch.nr, ch.ne):
        raise PreconditionViolated(
            f"phi must be {ch.nr}x{ch.ne}, got {phi.shape[0]}x{phi.shape[1]}")
    sv = np.linalg.svd(phi, compute_uv=False)
    # absolute 1e-12 slack over the margin absorbs projection round-off
    if sv.size and sv[0] > 1.0 - tol.psd_margin + 1e-12:
        raise SingularNoise(
            f"sigma_max(phi) = {sv[0]:.17g} within psd_margin of the unit boundary")
    return phi


def _check_kp(k, ch: ChannelPair) -> np.ndarray:
    k = as_cmatrix(k, "k_p")
    if k.shape != (ch.nt, ch.nt):
        raise PreconditionViolated(
            f"k_p must be {ch.nt}x{ch.nt}, got {k.shape[0]}x{k.shape[1]}")
    return herm(k)


def _lambda_parts(ch: ChannelPair, k, phi):
    """Eavesdropper Gram M_e, cross term Phi + Hr K He†, and MMSE error
    covariance Lambda."""
    me = herm(np.eye(ch.ne) + ch.he @ k @ ch.he.conj().T)
    cross = phi + ch.hr @ k @ ch.he.conj().T
    lam = np.eye(ch.nr) + ch.hr @ k @ ch.hr.conj().T \
        - cross @ np.linalg.solve(me, cross.conj().T)
    return herm(lam), me, cross


def _rate_plus_nats(ch: ChannelPair, k, phi) -> float:
    lam, _, _ = _lambda_parts(ch, k, phi)
    return logdet_hpd(lam) - logdet_hpd(np.eye(ch.nr) - phi @ phi.conj().T)


def rate_plus(ch: ChannelPair, k_p, phi, tol: Tolerance = Tolerance()) -> float:
    """Conditional rate R+ = I(x; yr | ye) in bits for Gaussian input with
    covariance k_p under receiver/eavesdropper noise cross-covariance phi."""
    k_p = _check_kp(k_p, ch)
    phi = _check_phi(phi, ch, tol)
    return _rate_plus_nats(ch, k_p, phi) / LN2


def rate_minus(ch: ChannelPair, k_p) -> float:
    """Difference rate R- = log2 det(I + Hr K Hr†) - log2 det(I + He K He†).

    May be negative for a poor covariance; capacity-level clamping happens
    in solve_saddle only.
    """
    k_p = _check_kp(k_p, ch)
    a = logdet_hpd(herm(np.eye(ch.nr) + ch.hr @ k_p @ ch.hr.conj().T))
    b = logdet_hpd(herm(np.eye(ch.ne) + ch.he @ k_p @ ch.he.conj().T))
    return (a - b) / LN2


def theta(ch: ChannelPair, k_p, phi, tol: Tolerance = Tolerance()) -> np.ndarray:
    """Linear MMSE coefficient Theta = (Hr K He† + Phi)(I + He K He†)^-1."""
    k_p = _check_kp(k_p, ch)
    phi = _check_phi(phi, ch, tol)
    me = herm(np.eye(ch.ne) + ch.he @ k_p @ ch.he.conj().T)
    cross = ch.hr @ k_p @ ch.he.conj().T + phi
    return np.linalg.solve(me, cross.conj().T).conj().T


def _grad_kp_nats(ch: ChannelPair, k, phi) -> np.ndarray:
    lam, me, cross = _lambda_parts(ch, k, phi)
    th = np.linalg.solve(me, cross.conj().T).conj().T
    d = ch.hr - th @ ch.he
    return herm(d.conj().T @ np.linalg.solve(lam, d))


def grad_kp(ch: ChannelPair, k_p, phi, tol: Tolerance = Tolerance(),
            form: str = "mmse") -> np.ndarray:
    """Gradient of R+ (in nats) with respect to the transmit covariance.

    Two equivalent closed forms are available: "mmse" evaluates
    (Hr - Theta He)† Lambda^-1 (Hr - Theta He); "chain" evaluates
    H̃†(K_Phi + H̃ K H̃†)^-1 H̃ - He†(I + He K He†)^-1 He directly.
    """
    k_p = _check_kp(k_p, ch)
    phi = _check_phi(phi, ch, tol)
    if form == "mmse":
        return _grad_kp_nats(ch, k_p, phi)
    if form != "chain":
        raise ValueError(f"unknown gradient form {form!r}")
    hst = np.vstack([ch.hr, ch.he])
    kphi = _kphi_block(ch, phi)
    m = herm(kphi + hst @ k_p @ hst.conj().T)
    me = herm(np.eye(ch.ne) + ch.he @ k_p @ ch.he.conj().T)
    g = hst.conj().T @ np.linalg.solve(m, hst) \
        - ch.he.conj().T @ np.linalg.solve(me, ch.he)
    return herm(g)


def _kphi_block(ch: ChannelPair, phi) -> np.ndarray:
    top = np.hstack([np.eye(ch.nr), phi])
    bot = np.hstack([phi.conj().T, np.eye(ch.ne)])
    return np.vstack([top, bot])


def grad_phi(ch: ChannelPair, k_p, phi, tol: Tolerance = Tolerance()) -> np.ndarray:
    """Gradient of R+ (in nats) with respect to phi.

    Returned as the upper-right Nr x Ne block G of
    (K_Phi + H̃ K H̃†)^-1 - K_Phi^-1; the directional derivative along a
    perturbation D is 2 Re tr(G† D).
    """
    k_p = _check_kp(k_p, ch)
    phi = _check_phi(phi, ch, tol)
    hst = np.vstack([ch.hr, ch.he])
    kphi = _kphi_block(ch, phi)
    m_inv = np.linalg.inv(herm(kphi + hst @ k_p @ hst.conj().T))
    kphi_inv = np.linalg.inv(herm(kphi))
    return (m_inv - kphi_inv)[:ch.nr, ch.nr:]


def _fw_gap_nats(g: np.ndarray, k: np.ndarray, power: float) -> float:
    """Frank-Wolfe certificate for the inner maximization: an upper bound on
    the remaining suboptimality of the concave objective over the trace-capped
    PSD cone."""
    lam_max = float(np.linalg.eigvalsh(herm(g))[-1])
    return max(power * lam_max, 0.0) - float(np.real(np.trace(g @ k)))


def _inner_max(ch: ChannelPair, phi, power: float, tol_nats: float,
               k0=None, max_iter: int = MAX_INNER_ITER):
    """Projected gradient ascent on K |-> R+(K, phi) with BB steps and Armijo
    backtracking.  Concavity makes the Frank-Wolfe gap a global certificate."""
    if k0 is None:
        k = (power / ch.nt) * np.eye(ch.nt, dtype=np.complex128)
    else:
        k = psd_project(herm(k0), power)
    f = _rate_plus_nats(ch, k, phi)
    g = _grad_kp_nats(ch, k, phi)
    step = 1.0 / max(float(np.linalg.norm(g)), 1e-8)
    prev_k = prev_g = None
    for _ in range(max_iter):
        if _fw_gap_nats(g, k, power) <= tol_nats:
            break
        if prev_k is not None:
            dk = k - prev_k
            dg = g - prev_g
            denom = -float(np.real(np.vdot(dk, dg)))   # > 0 for concave f
            if denom > 1e-300:
                step = max(float(np.real(np.vdot(dk, dk))) / denom, 1e-12)
        t = step
        cand, f_c = k, f
        for _ in range(60):
            cand = psd_project(k + t * g, power)
            move = cand - k
            slope = float(np.real(np.vdot(g, move)))
            if float(np.linalg.norm(move)) < 1e-16:
                break
            f_c = _rate_plus_nats(ch, cand, phi)
            if f_c >= f + ARMIJO_SLOPE * slope:
                break
            t *= ARMIJO_BACKTRACK
        if float(np.linalg.norm(cand - k)) < 1e-16:
            break
        prev_k, prev_g = k, g
        k, f = cand, f_c
        g = _grad_kp_nats(ch, k, phi)
    return k


def inner_max_kp(ch: ChannelPair, phi, power, tol: Tolerance = Tolerance(),
                 k0=None) -> np.ndarray:
    """Maximize R+(., phi) over {K PSD, tr K <= P} to within conv_abs bits."""
    power = _require_power(power)
    phi = _check_phi(phi, ch, tol)
    if k0 is not None:
        k0 = _check_kp(k0, ch)
    return _inner_max(ch, phi, power, tol.conv_abs * LN2, k0)


def _rate_minus_nats(ch: ChannelPair, k) -> float:
    a = logdet_hpd(herm(np.eye(ch.nr) + ch.hr @ k @ ch.hr.conj().T))
    b = logdet_hpd(herm(np.eye(ch.ne) + ch.he @ k @ ch.he.conj().T))
    return a - b


def _grad_rminus_nats(ch: ChannelPair, k) -> np.ndarray:
    a = np.linalg.solve(herm(np.eye(ch.nr) + ch.hr @ k @ ch.hr.conj().T), ch.hr)
    b = np.linalg.solve(herm(np.eye(ch.ne) + ch.he @ k @ ch.he.conj().T), ch.he)
    return herm(ch.hr.conj().T @ a - ch.he.conj().T @ b)


# penalty ladder for the saddle-selection tie-break (see _tie_break_kp)
TIE_BREAK_RHOS = (1e0, 1e1, 1e2, 1e3, 1e4)


def _tie_break_kp(ch: ChannelPair, phi, power: float, k, tol_nats: float,
                  max_iter: int = 250) -> np.ndarray:
    """Select the distinguished inner maximizer.

    Near the optimal phi the maximizer set of R+(., phi) can be a nearly
    flat manifold along which R- varies by whole bits; the gap certificate
    closes only at the saddle member, which also makes phi stationary for
    the outer minimization (grad_phi = 0 when phi is interior).  Both
    properties peak at the same point, so R+ - rho ||grad_phi||^2 has the
    saddle member as its global maximizer for every rho > 0; ascend it over
    an increasing rho ladder, warm-started, and keep the iterate with the
    smallest primal-dual gap.
    """
    nr, ne = ch.nr, ch.ne
    hst = np.vstack([ch.hr, ch.he])
    kphi = _kphi_block(ch, phi)
    kphi_inv_ur = np.linalg.inv(herm(kphi))[:nr, nr:]

    def penalty_parts(x):
        m_inv = np.linalg.inv(herm(kphi + hst @ x @ hst.conj().T))
        g_phi = m_inv[:nr, nr:] - kphi_inv_ur
        lift = np.zeros((nr + ne, nr + ne), dtype=np.complex128)
        lift[nr:, :nr] = g_phi.conj().T
        w = 2.0 * hst.conj().T @ m_inv @ lift @ m_inv @ hst
        return g_phi, herm(w)

    def gap_at(x):
        return abs(_rate_plus_nats(ch, x, phi) - _rate_minus_nats(ch, x))

    best_k, best_gap = k, gap_at(k)
    for rho in TIE_BREAK_RHOS:
        def f(x):
            g_phi, _ = penalty_parts(x)
            return _rate_plus_nats(ch, x, phi) \
                - rho * float(np.linalg.norm(g_phi)) ** 2

        def grad(x):
            g_phi, w = penalty_parts(x)
            return _grad_kp_nats(ch, x, phi) + rho * w

        fv = f(k)
        g = grad(k)
        step = 1.0 / max(float(np.linalg.norm(g)), 1e-8)
        prev_k = prev_g = None
        for _ in range(max_iter):
            if prev_k is not None:
                dk = k - prev_k
                dg = g - prev_g
                denom = -float(np.real(np.vdot(dk, dg)))
                if denom > 1e-300:
                    step = max(float(np.real(np.vdot(dk, dk))) / denom, 1e-12)
            t = step
            cand, f_c = k, fv
            for _ in range(40):
                cand = psd_project(k + t * g, power)
                move = cand - k
                slope = float(np.real(np.vdot(g, move)))
                if float(np.linalg.norm(move)) < 1e-16:
                    break
                f_c = f(cand)
                if f_c >= fv + ARMIJO_SLOPE * slope:
                    break
                t *= ARMIJO_BACKTRACK
            if float(np.linalg.norm(cand - k)) < 1e-16:
                break
            prev_k, prev_g = k, g
            k, fv = cand, f_c
            g = grad(k)
        gap = gap_at(k)
        if gap < best_gap:
            best_k, best_gap = k, gap
        if best_gap <= 0.5 * tol_nats:
            break
    return best_k


def _ascend_rminus(ch: ChannelPair, k, power: float,
                   max_iter: int = 300) -> np.ndarray:
    """Local projected gradient ascent on R-.  R- is not concave, so this is
    only a polish step for candidate covariances, not a solver."""
    f = _rate_minus_nats(ch, k)
    g = _grad_rminus_nats(ch, k)
    step = 1.0 / max(float(np.linalg.norm(g)), 1e-8)
    prev_k = prev_g = None
    for _ in range(max_iter):
        if prev_k is not None:
            dk = k - prev_k
            dg = g - prev_g
            denom = -float(np.real(np.vdot(dk, dg)))
            if denom > 1e-300:
                step = max(float(np.real(np.vdot(dk, dk))) / denom, 1e-12)
        t = step
        cand, f_c = k, f
        for _ in range(40):
            cand = psd_project(k + t * g, power)
            move = cand - k
            slope = float(np.real(np.vdot(g, move)))
            if float(np.linalg.norm(move)) < 1e-16:
                break
            f_c = _rate_minus_nats(ch, cand)
            if f_c >= f + ARMIJO_SLOPE * slope:
                break
            t *= ARMIJO_BACKTRACK
        if float(np.linalg.norm(cand - k)) < 1e-16 or f_c <= f:
            break
        prev_k, prev_g = k, g
        k, f = cand, f_c
        g = _grad_rminus_nats(ch, k)
    return k


def _gsvd_seed(ch: ChannelPair, power: float, tol: Tolerance):
    """Candidate covariance aligned with the favorable generalized singular
    directions (gain ratio > 1, plus any eavesdropper-null directions).
    Returns None when no such direction exists."""
    from .gsvd import gsvd as _gsvd   # deferred: only needed on this path
    g = _gsvd(ch, tol)
    kk, p, s = g.dims.k, g.dims.p, g.dims.s
    if kk == 0:
        return None
    cols = list(range(kk - p, kk))                   # receiver-only block
    cols += [kk - p - s + i for i in range(s) if g.sigma[i] > 1.0]
    if not cols:
        return None
    t_map = g.psi_t[:, :kk] @ g.omega
    ta = t_map[:, cols]
    k0 = ta @ ta.conj().T
    tr = float(np.real(np.trace(k0)))
    if tr <= 0.0:
        return None
    return herm(k0 * (power / tr))


def _outer_descent(ch: ChannelPair, power: float, tol: Tolerance, phi, k,
                   max_iter: int):
    """Projected subgradient descent on the value function V(phi).

    BB step with a short Armijo backtrack as the fast path; when that fails
    (nonsmooth kink of V) a wide geometric line probe is tried before
    declaring a stall.  Returns (phi, k, iterations used).
    """
    radius = 1.0 - tol.psd_margin
    conv_nats = tol.conv_abs * LN2
    inner_tol = conv_nats / 10.0
    v = _rate_plus_nats(ch, k, phi)
    g = grad_phi(ch, k, phi, tol)
    step = 1.0 / max(float(np.linalg.norm(g)), 1e-8)
    prev_phi = prev_g = None
    used = 0
    for used in range(1, max_iter + 1):
        if abs(v - _rate_minus_nats(ch, k)) <= conv_nats:
            break
        if prev_phi is not None:
            dphi = phi - prev_phi
            dg = g - prev_g
            denom = 2.0 * float(np.real(np.vdot(dphi, dg)))
            if denom > 1e-300:
                step = max(2.0 * float(np.real(np.vdot(dphi, dphi))) / denom,
                           1e-12)
        accepted = False
        t = step
        cand, k_c, v_c = phi, k, v
        for _ in range(8):
            cand = spectral_ball_project(phi - t * g, radius)
            move = cand - phi
            if float(np.linalg.norm(move)) < 1e-15:
                break
            k_c = _inner_max(ch, cand, power, inner_tol, k0=k)
            v_c = _rate_plus_nats(ch, k_c, cand)
            slope = 2.0 * float(np.real(np.vdot(g, move)))
            if v_c <= v + ARMIJO_SLOPE * slope:
                accepted = True
                break
            t *= ARMIJO_BACKTRACK
        if not accepted:
            best = (v, phi, k)
            for t in step * np.geomspace(1e-4, 1e4, 17):
                cand = spectral_ball_project(phi - t * g, radius)
                k_c = _inner_max(ch, cand, power, inner_tol, k0=k)
                v_c = _rate_plus_nats(ch, k_c, cand)
                if v_c < best[0]:
                    best = (v_c, cand, k_c)
            if best[0] >= v - 1e-14 * max(abs(v), 1.0):
                break                      # stalled at a kink: no descent found
            v_c, cand, k_c = best
        prev_phi, prev_g = phi, g
        phi, k, v = cand, k_c, v_c
        g = grad_phi(ch, k, phi, tol)
    return phi, k, used


def solve_saddle(ch: ChannelPair, power, tol: Tolerance = Tolerance()) -> SaddlePoint:
    """Solve min over phi of max over K of R+ and return the saddle point.

    Zero-capacity channels (largest generalized singular value <= 1) are
    short-circuited with the exact witness K = 0, Phi = Theta = Hr He^+.
    Otherwise the outer minimization runs projected subgradient descent on
    the value function V(phi) = max_K R+(K, phi) (convex; Danskin subgradient
    evaluated at the inner maximizer), selects the distinguished inner
    maximizer by the stationarity-penalty tie-break, and terminates on the
    primal-dual certificate |R+ - R-| <= conv_abs bits.  If the iteration
    budget runs out the best iterate is returned and gap_bits exceeds the
    tolerance.
    """
    power = _require_power(power)
    if sigma_max(ch, tol) <= 1.0 + tol.rank_rel:
        witness = spectral_ball_project(ch.hr @ np.linalg.pinv(ch.he),
                                        1.0 - tol.psd_margin)
        k_bar = np.zeros((ch.nt, ch.nt), dtype=np.complex128)
        return SaddlePoint(k_bar=k_bar, phi_bar=witness, capacity_bits=0.0,
                           theta_bar=witness, iterations=0, gap_bits=0.0,
                           power=power)

    conv_nats = tol.conv_abs * LN2
    phi = np.zeros((ch.nr, ch.ne), dtype=np.complex128)
    k = _inner_max(ch, phi, power, conv_nats / 10.0)
    iterations = 0
    budget = MAX_OUTER_ITER
    best = None
    while budget > 0:
        phi, k, used = _outer_descent(ch, power, tol, phi, k, budget)
        iterations += used
        budget -= max(used, 1)
        k = _inner_max(ch, phi, power, conv_nats * 1e-3, k0=k)
        gap = abs(_rate_plus_nats(ch, k, phi) - _rate_minus_nats(ch, k))
        if gap > conv_nats:
            # the inner argmax is not the saddle member; try the
            # stationarity-penalty tie-break and an R- ascent from both the
            # tie-break result and a GSVD-aligned seed, keep the best gap
            candidates = [_tie_break_kp(ch, phi, power, k, conv_nats * 1e-3)]
            candidates.append(_ascend_rminus(ch, candidates[0].copy(), power))
            seed = _gsvd_seed(ch, power, tol)
            if seed is not None:
                candidates.append(_ascend_rminus(ch, seed, power))
            for cand in candidates:
                cand_gap = abs(_rate_plus_nats(ch, cand, phi)
                               - _rate_minus_nats(ch, cand))
                if cand_gap < gap:
                    k, gap = cand, cand_gap
        if best is None or gap < best[0]:
            best = (gap, k, phi)
        if best[0] <= conv_nats or used <= 1:
            break

    gap, k, phi = best
    r_minus = _rate_minus_nats(ch, k)
    return SaddlePoint(k_bar=herm(k), phi_bar=phi,
                       capacity_bits=max(r_minus / LN2, 0.0),
                       theta_bar=theta(ch, k, phi, tol),
                       iterations=iterations,
                       gap_bits=gap / LN2, power=power)



# Relative threshold for declaring Hr ≈ Theta He in verify_saddle.
ZERO_CAP_RTOL = 1e-6


def verify_saddle(ch: ChannelPair, sp: SaddlePoint, probes: int = 200,
                  seed: int = 0, tol: Tolerance = Tolerance()) -> KktReport:
    """Probe-based optimality report for a solve_saddle output.

    Draws random feasible covariances and cross-covariances and reports the
    worst violation of the two saddle inequalities, the degradedness residual
    on the column space of the transmit covariance, the primal-dual gap, and
    the zero-capacity witness test.
    """
    rng = np.random.default_rng(seed)
    radius = 1.0 - tol.psd_margin
    r_center = _rate_plus_nats(ch, herm(sp.k_bar), sp.phi_bar)

    worst = 0.0
    for _ in range(int(probes)):
        a = rng.normal(size=(ch.nt, ch.nt)) + 1j * rng.normal(size=(ch.nt, ch.nt))
        kp = herm(a @ a.conj().T)
        tr = float(np.real(np.trace(kp)))
        if tr > 0.0:
            kp *= rng.uniform(0.0, 1.0) * sp.power / tr
        b = rng.normal(size=(ch.nr, ch.ne)) + 1j * rng.normal(size=(ch.nr, ch.ne))
        sv = np.linalg.svd(b, compute_uv=False)
        if sv[0] > 0.0:
            b *= rng.uniform(0.0, 1.0) * radius / sv[0]
        # K probe must not beat the inner maximizer; phi probe must not
        # undercut the outer minimizer
        worst = max(worst,
                    _rate_plus_nats(ch, kp, sp.phi_bar) - r_center,
                    r_center - _rate_plus_nats(ch, herm(sp.k_bar), b))

    degraded = 0.0
    if sp.capacity_bits > tol.conv_abs:
        lam, vec = np.linalg.eigh(herm(sp.k_bar))
        keep = lam > tol.rank_rel * max(float(lam[-1]), 0.0)
        if np.any(keep):
            s_bar = vec[:, keep] * np.sqrt(lam[keep])
            num = np.linalg.norm(sp.phi_bar.conj().T @ ch.hr @ s_bar - ch.he @ s_bar)
            den = np.linalg.norm(ch.he @ s_bar)
            degraded = float(num / den) if den > 0.0 else float(num)

    gap = abs(r_center - _rate_minus_nats(ch, herm(sp.k_bar))) / LN2
    resid = np.linalg.norm(ch.hr - sp.theta_bar @ ch.he)
    scale = max(float(np.linalg.norm(ch.hr)), 1e-300)
    return KktReport(saddle_resid=max(worst, 0.0) / LN2,
                     degraded_resid=degraded,
                     gap_bits=gap,
                     zero_cap=bool(resid <= ZERO_CAP_RTOL * scale))


@dataclass(frozen=True)
class NoiseReduction:
    """Output of reduce_singular_noise.

    reduced is None when every noise direction sits at the unit boundary
    (nothing finite remains to reduce to).
    """

    reduced: ChannelPair | None
    phi_reduced: np.ndarray
    t: np.ndarray              # r1 x Nt difference channel on the unit block

    def is_infinite(self, k_p, tol: Tolerance = Tolerance()) -> bool:
        """True when the conditional rate diverges for this covariance,
        i.e. T K T† != 0 on the unit-singular-value block."""
        if self.t.shape[0] == 0:
            return False
        k_p = herm(as_cmatrix(k_p, "k_p"))
        prod = self.t @ k_p @ self.t.conj().T
        scale = max(float(np.linalg.norm(k_p)), 1.0) * \
            max(float(np.linalg.norm(self.t)) ** 2, 1.0)
        return bool(np.linalg.norm(prod) > tol.rank_rel * scale)


def reduce_singular_noise(ch: ChannelPair, phi,
                          tol: Tolerance = Tolerance()) -> NoiseReduction:
    """Split off the unit-singular-value directions of phi.

    Partitions the SVD of phi at 1 - 10*psd_margin: directions at the unit
    boundary yield the difference channel T = U1† Hr - V1† He (the rate is
    infinite iff T K T† != 0); the remainder gives a reduced channel pair and
    a strictly sub-unit cross-covariance.
    """
    phi = as_cmatrix(phi, "phi")
    if phi.shape != (ch.nr, ch.ne):
        raise PreconditionViolated(
            f"phi must be {ch.nr}x{ch.ne}, got {phi.shape[0]}x{phi.shape[1]}")
    u, sv, vh = np.linalg.svd(phi, full_matrices=True)
    cut = 1.0 - 10.0 * tol.psd_margin
    r1 = int(np.count_nonzero(sv >= cut))
    if r1 == 0:
        return NoiseReduction(reduced=ch, phi_reduced=phi,
                              t=np.zeros((0, ch.nt), dtype=np.complex128))
    u1, u2 = u[:, :r1], u[:, r1:]
    v = vh.conj().T
    v1, v2 = v[:, :r1], v[:, r1:]
    t = u1.conj().T @ ch.hr - v1.conj().T @ ch.he
    if u2.shape[1] == 0 or v2.shape[1] == 0:
        return NoiseReduction(reduced=None,
                              phi_reduced=np.zeros((u2.shape[1], v2.shape[1]),
                                                   dtype=np.complex128),
                              t=t)
    reduced = ChannelPair(u2.conj().T @ ch.hr, v2.conj().T @ ch.he)
    return NoiseReduction(reduced=reduced,
                          phi_reduced=u2.conj().T @ phi @ v2,
                          t=t)
