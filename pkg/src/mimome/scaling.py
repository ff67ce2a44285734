"""Many-antenna scaling laws: the asymptotic largest generalized singular
value for i.i.d. Gaussian channel pairs, the zero-capacity region in the
antenna-ratio plane and its frontier, optimal antenna allocation, and a
Monte-Carlo validator for the asymptotics."""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .gsvd import ChannelPair, sigma_max
from .matrix_core import Tolerance

GOLDEN_TOL = 1e-12
BISECT_TOL = 1e-12


@dataclass(frozen=True)
class ScalingPoint:
    """One point of the antenna-ratio plane: beta = Nt/Ne, gamma = Nr/Ne."""

    beta: float
    gamma: float
    sigma_max_asymptotic: float
    in_zero_region: bool


@dataclass(frozen=True)
class McSummary:
    trials: int
    seed: int
    empirical_sigma_max_mean: float
    empirical_sigma_max_sd: float
    zero_cap_fraction: float


def asymptotic_sigma_max(beta, gamma) -> float:
    """Almost-sure large-system limit of the largest generalized singular
    value statistic for i.i.d. CN(0,1) channels with Nt/Ne -> beta and
    Nr/Ne -> gamma.  Defined for 0 <= beta < 1 and gamma > 0."""
    beta = float(beta)
    gamma = float(gamma)
    if beta >= 1.0:
        raise DomainError(f"asymptotic formula requires beta < 1, got {beta}")
    if beta < 0.0:
        raise DomainError(f"beta must be nonnegative, got {beta}")
    if gamma <= 0.0:
        raise DomainError(f"gamma must be positive, got {gamma}")
    inner = 1.0 - (1.0 - beta) * (1.0 - beta / gamma)
    # inner >= 0 always: it equals beta*(1/gamma + 1 - beta/gamma) and
    # rounds negative only through cancellation near beta = 0
    root = math.sqrt(max(inner, 0.0))
    return gamma * ((1.0 + root) / (1.0 - beta)) ** 2


def zero_cap_region(beta, gamma) -> bool:
    """Membership in the asymptotic zero-capacity region:
    beta <= 1/2 and gamma <= (1 - sqrt(2 beta))^2."""
    beta = float(beta)
    gamma = float(gamma)
    if beta < 0.0 or gamma < 0.0:
        raise DomainError("beta and gamma must be nonnegative")
    return beta <= 0.5 and gamma <= (1.0 - math.sqrt(2.0 * beta)) ** 2


def scaling_point(beta, gamma) -> ScalingPoint:
    return ScalingPoint(beta=float(beta), gamma=float(gamma),
                        sigma_max_asymptotic=asymptotic_sigma_max(beta, gamma),
                        in_zero_region=zero_cap_region(beta, gamma))


def frontier(beta_grid) -> list[tuple[float, float]]:
    """Boundary curve of the zero-capacity region: gamma = (1-sqrt(2 beta))^2
    for each beta in [0, 1/2]."""
    pts = []
    for b in beta_grid:
        b = float(b)
        if not 0.0 <= b <= 0.5:
            raise DomainError(f"frontier beta values must lie in [0, 1/2], got {b}")
        pts.append((b, (1.0 - math.sqrt(2.0 * b)) ** 2))
    return pts


def _golden_section(f, lo, hi, tol):
    # standard golden-section minimizer on [lo, hi]
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    x1 = b - invphi * (b - a)
    x2 = a + invphi * (b - a)
    f1, f2 = f(x1), f(x2)
    while b - a > tol:
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - invphi * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + invphi * (b - a)
            f2 = f(x2)
    return 0.5 * (a + b)


def optimal_allocation(objective=None) -> tuple[float, float]:
    """Minimizer of beta + gamma (total receiver-side antenna budget per
    eavesdropper antenna) over the closed zero-capacity region.

    The minimum lies on the frontier, so the search is a golden-section
    minimization of objective(beta, gamma_frontier(beta)) over [0, 1/2].
    A custom objective(beta, gamma) may be supplied."""
    if objective is None:
        objective = lambda b, g: b + g
    gamma_of = lambda b: (1.0 - math.sqrt(2.0 * b)) ** 2
    f = lambda b: objective(b, gamma_of(b))
    beta = _golden_section(f, 0.0, 0.5, GOLDEN_TOL)
    # one parabolic refinement: golden section alone bottoms out near
    # sqrt(eps) because the objective is flat to machine precision there
    for h in (1e-4, 1e-6):
        if not h < beta < 0.5 - h:
            break
        f_lo, f_mid, f_hi = f(beta - h), f(beta), f(beta + h)
        curv = f_hi - 2.0 * f_mid + f_lo
        if curv > 0.0:
            step = 0.5 * h * (f_lo - f_hi) / curv
            beta = min(max(beta + step, 0.0), 0.5)
    return beta, gamma_of(beta)


def min_eavesdropper_ratio(tx_fraction) -> float:
    """Smallest rho = Ne/T driving the secrecy capacity to zero when a total
    of T antennas is split as Nt = tau T, Nr = (1-tau) T.

    Membership of (tau/rho, (1-tau)/rho) in the zero-capacity region is
    monotone in rho, so the threshold is found by bisection."""
    tau = float(tx_fraction)
    if not 0.0 < tau < 1.0:
        raise DomainError(f"tx_fraction must lie in (0, 1), got {tau}")

    def inside(rho):
        return zero_cap_region(tau / rho, (1.0 - tau) / rho)

    lo = 2.0 * tau           # beta <= 1/2 requires rho >= 2 tau
    hi = max(4.0, 4.0 * tau)
    while not inside(hi):
        hi *= 2.0
        if hi > 1e12:
            raise DomainError("no finite eavesdropper ratio found")
    while hi - lo > BISECT_TOL:
        mid = 0.5 * (lo + hi)
        if inside(mid):
            hi = mid
        else:
            lo = mid
    return hi


def _trial_sigma_max(nt: int, nr: int, ne: int, seed: int, trial: int,
                     tol: Tolerance) -> float:
    # counter-based generator keyed per (seed, trial, matrix) so trials are
    # order independent and safe to run in parallel
    def draw(rows, tag):
        bits = np.random.Philox(key=[np.uint64(seed),
                                     np.uint64(2 * trial + tag)])
        rng = np.random.Generator(bits)
        re = rng.standard_normal((rows, nt))
        im = rng.standard_normal((rows, nt))
        return (re + 1j * im) / math.sqrt(2.0)   # CN(0,1): variance 1/2 per part

    ch = ChannelPair(draw(nr, 0), draw(ne, 1))
    return sigma_max(ch, tol)


def monte_carlo_sigma_max(nt: int, nr: int, ne: int, trials: int, seed: int,
                          tol: Tolerance = Tolerance()) -> McSummary:
    """Empirical statistics of the largest generalized singular value over
    i.i.d. CN(0,1) channel draws.

    Trials run in parallel (MIMOME_THREADS caps the pool) but are reduced in
    trial order, so equal inputs always give bit-identical summaries."""
    if trials < 1:
        raise DomainError("trials must be at least 1")
    workers = int(os.environ.get("MIMOME_THREADS", "0")) or min(32, os.cpu_count() or 1)
    if workers > 1 and trials > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            values = list(pool.map(
                lambda t: _trial_sigma_max(nt, nr, ne, seed, t, tol),
                range(trials)))
    else:
        values = [_trial_sigma_max(nt, nr, ne, seed, t, tol)
                  for t in range(trials)]
    arr = np.array(values, dtype=np.float64)
    if np.all(np.isfinite(arr)):
        mean = float(np.mean(arr))
        sd = float(np.std(arr, ddof=1)) if trials > 1 else 0.0
    else:
        # an infinite sigma_max (receiver-only direction) dominates
        mean = math.inf
        sd = math.inf if trials > 1 else 0.0
    frac = float(np.count_nonzero(arr <= 1.0) / trials)
    return McSummary(trials=trials, seed=int(seed),
                     empirical_sigma_max_mean=mean,
                     empirical_sigma_max_sd=sd,
                     zero_cap_fraction=frac)
