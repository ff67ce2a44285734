"""Acceptance suite: nine end-to-end criteria, each printing a single
pass/fail line with its measured worst case before asserting."""

import math
import sys

import numpy as np
import pytest

from mimome.gsvd import ChannelPair, gsvd, he_pseudo_inverse, subspace_dims
from mimome.matrix_core import Tolerance, herm, spectral_ball_project
from mimome.regimes import (high_snr_capacity, is_zero_capacity,
                            masked_mimo_rate, masked_mimo_rate_dual)
from mimome.scaling import (asymptotic_sigma_max, frontier,
                            min_eavesdropper_ratio, monte_carlo_sigma_max,
                            optimal_allocation, zero_cap_region)
from mimome.secrecy import (grad_kp, grad_phi, rate_plus, solve_saddle,
                            verify_saddle)

LN2 = math.log(2.0)


def crandn(rng, m, n):
    return (rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n))) / np.sqrt(2)


def rand_kp(rng, nt, power):
    a = crandn(rng, nt, nt)
    k = herm(a @ a.conj().T)
    return k * (power * rng.uniform(0.2, 1.0) / np.real(np.trace(k)))


def report(num, ok, detail):
    print(f"criterion {num}: {'PASS' if ok else 'FAIL'} - {detail}",
          file=sys.stderr, flush=True)


def test_criterion_1_scalar_oracle():
    # closed form and a grid min-max oracle, 20 random scalar channels,
    # 1e-5 bits
    rng = np.random.default_rng(101)
    worst = 0.0
    for _ in range(20):
        hr = float(rng.uniform(0.1, 3.0))
        he = float(rng.uniform(0.1, 3.0))
        p = float(rng.uniform(0.1, 10.0))
        ch = ChannelPair([[hr]], [[he]])
        got = solve_saddle(ch, p, Tolerance(conv_abs=1e-7)).capacity_bits
        closed = math.log2(max(1.0, (1 + p * hr * hr) / (1 + p * he * he)))
        worst = max(worst, abs(got - closed))
        # grid oracle: R+ is nondecreasing in k (its k-gradient is a PSD
        # quadratic form), so the inner max sits at k = P; minimize the
        # resulting 1-D function of phi on a fine grid plus parabolic refine
        def v_of_phi(phi):
            lam = 1 + hr * hr * p - (hr * he * p + phi) ** 2 / (1 + he * he * p)
            return (math.log(lam) - math.log(1 - phi * phi)) / LN2

        phis = np.linspace(-0.999999, 0.999999, 20001)
        vals = np.array([v_of_phi(f) for f in phis])
        i = int(np.argmin(vals))
        grid_val = vals[i]
        if 0 < i < len(phis) - 1:
            den = vals[i + 1] - 2 * vals[i] + vals[i - 1]
            if den > 0:
                step = 0.5 * (vals[i - 1] - vals[i + 1]) / den
                grid_val = v_of_phi(phis[i] + step * (phis[1] - phis[0]))
        oracle = max(grid_val, 0.0)
        worst = max(worst, abs(got - oracle))
    ok = worst <= 1e-5
    report(1, ok, f"worst |capacity - oracle| = {worst:.3e} bits (tol 1e-5)")
    assert ok


def test_criterion_2_saddle_certificate():
    # 20 random instances, dims <= 4, P in {1, 10}: gap <= 1e-4,
    # degradedness <= 1e-3 when capacity > 1e-3, probes within 1e-6
    rng = np.random.default_rng(102)
    tol = Tolerance(conv_abs=1e-10)
    worst_gap = worst_deg = worst_probe = 0.0
    for i in range(20):
        nt = int(rng.integers(1, 5))
        nr = int(rng.integers(1, 5))
        ne = int(rng.integers(1, 5))
        p = 1.0 if i % 2 == 0 else 10.0
        ch = ChannelPair(crandn(rng, nr, nt), crandn(rng, ne, nt))
        sp = solve_saddle(ch, p, tol)
        kkt = verify_saddle(ch, sp, probes=200, seed=i, tol=tol)
        worst_gap = max(worst_gap, sp.gap_bits)
        worst_probe = max(worst_probe, kkt.saddle_resid)
        if sp.capacity_bits > 1e-3:
            worst_deg = max(worst_deg, kkt.degraded_resid)
    ok = worst_gap <= 1e-4 and worst_deg <= 1e-3 and worst_probe <= 1e-6
    report(2, ok, f"worst gap {worst_gap:.3e} (tol 1e-4), degradedness "
                  f"{worst_deg:.3e} (tol 1e-3), probe {worst_probe:.3e} (tol 1e-6)")
    assert ok


def test_criterion_3_gradient_checks():
    # central finite differences, step 1e-5, 20 random directions, 1e-5 rel
    rng = np.random.default_rng(103)
    step = 1e-5
    worst = 0.0
    for _ in range(20):
        ch = ChannelPair(crandn(rng, 3, 3), crandn(rng, 3, 3))
        k = rand_kp(rng, 3, 1.0)
        phi = spectral_ball_project(crandn(rng, 3, 3), 0.8)
        gk = grad_kp(ch, k, phi)
        gp = grad_phi(ch, k, phi)
        d = herm(crandn(rng, 3, 3))
        d /= np.linalg.norm(d)
        fd = (rate_plus(ch, k + step * d, phi) -
              rate_plus(ch, k - step * d, phi)) * LN2 / (2 * step)
        got = float(np.real(np.trace(gk.conj().T @ d)))
        worst = max(worst, abs(got - fd) / max(abs(fd), 1e-8))
        e = crandn(rng, 3, 3)
        e /= np.linalg.norm(e)
        fd = (rate_plus(ch, k, phi + step * e) -
              rate_plus(ch, k, phi - step * e)) * LN2 / (2 * step)
        got = 2.0 * float(np.real(np.trace(gp.conj().T @ e)))
        worst = max(worst, abs(got - fd) / max(abs(fd), 1e-8))
    ok = worst <= 1e-5
    report(3, ok, f"worst relative finite-difference error {worst:.3e} (tol 1e-5)")
    assert ok


def test_criterion_4_gsvd():
    # 100 random dimension combinations <= 6: reconstruction <= 1e-9 rel,
    # block structure of the gain matrices, sigma = svd(Hr He_pinv) to 1e-8
    rng = np.random.default_rng(104)
    worst_rec = worst_sig = 0.0
    blocks_ok = True
    for _ in range(100):
        nt = int(rng.integers(1, 7))
        nr = int(rng.integers(1, 7))
        ne = int(rng.integers(1, 7))
        ch = ChannelPair(crandn(rng, nr, nt), crandn(rng, ne, nt))
        g = gsvd(ch)
        hr_rec, he_rec = g.reconstruct()
        num = np.hypot(np.linalg.norm(hr_rec - ch.hr),
                       np.linalg.norm(he_rec - ch.he))
        worst_rec = max(worst_rec, num / max(np.linalg.norm(ch.stacked()), 1e-300))
        d = g.dims
        sr, se = g.sigma_r(), g.sigma_e()
        # receiver gains: zero block, then Dr on the shared columns, then
        # identity on the receiver-only columns; eavesdropper mirrored
        want_r = np.zeros_like(sr)
        for i in range(d.s):
            want_r[nr - d.p - d.s + i, d.k - d.p - d.s + i] = g.dr[i]
        for i in range(d.p):
            want_r[nr - d.p + i, d.k - d.p + i] = 1.0
        want_e = np.zeros_like(se)
        for i in range(d.k - d.p - d.s):
            want_e[i, i] = 1.0
        for i in range(d.s):
            want_e[d.k - d.p - d.s + i, d.k - d.p - d.s + i] = g.de[i]
        if not (np.array_equal(sr, want_r) and np.array_equal(se, want_e)):
            blocks_ok = False
        if d.p == 0 and d.k == nt and len(g.sigma):
            sv = np.linalg.svd(ch.hr @ he_pseudo_inverse(g), compute_uv=False)
            sv = np.sort(sv[sv > 1e-10 * sv[0]])
            if len(sv) == len(g.sigma):
                worst_sig = max(worst_sig, float(np.max(np.abs(sv - g.sigma))))
            else:
                blocks_ok = False
    ok = worst_rec <= 1e-9 and blocks_ok and worst_sig <= 1e-8
    report(4, ok, f"worst reconstruction {worst_rec:.3e} (tol 1e-9), "
                  f"block structure {'ok' if blocks_ok else 'BROKEN'}, "
                  f"worst sigma-vs-svd {worst_sig:.3e} (tol 1e-8)")
    assert ok


def test_criterion_5_high_snr_convergence():
    # 10 random full-column-rank-He instances at P = 1e6 within 0.1 bits of
    # the asymptote, with the error nonincreasing over P in {1e2, 1e4, 1e6};
    # plus the (k,p,s) = (2,1,1) instance tracking log2 P with the right
    # constant
    rng = np.random.default_rng(105)
    tol = Tolerance(conv_abs=1e-3)
    worst = 0.0
    monotone_ok = True
    done = 0
    while done < 10:
        nt = int(rng.integers(1, 4))
        nr = int(rng.integers(1, 4))
        ne = int(rng.integers(nt, 5))
        ch = ChannelPair(crandn(rng, nr, nt), crandn(rng, ne, nt))
        g = gsvd(ch)
        if g.dims.p != 0 or g.dims.k != nt or not np.any(g.sigma > 1.0):
            continue
        done += 1
        errs = []
        for p in (1e2, 1e4, 1e6):
            cap = solve_saddle(ch, p, tol).capacity_bits
            errs.append(abs(cap - high_snr_capacity(ch, p).total_bits))
        worst = max(worst, errs[-1])
        for lo, hi in zip(errs[1:], errs):
            if lo > hi + 2e-3:
                monotone_ok = False
    ch = ChannelPair(np.eye(2), np.array([[1.0, 0.0]]))
    p = 1e6
    cap = solve_saddle(ch, p, tol).capacity_bits
    c0 = high_snr_capacity(ch, p).c0_bits
    rd_err = abs((cap - math.log2(p)) - (c0 - math.log2(p)))
    ok = worst <= 0.1 and monotone_ok and rd_err <= 0.1
    report(5, ok, f"worst |capacity - asymptote| at P=1e6: {worst:.3e} bits "
                  f"(tol 0.1), nonincreasing {'ok' if monotone_ok else 'BROKEN'}, "
                  f"rank-deficient offset error {rd_err:.3e} (tol 0.1)")
    assert ok


def test_criterion_6_masked_mimo():
    # dual-formula agreement to 1e-9; achievability R_SN <= C + 1e-6;
    # sigma = (0.1, 10) instance at least 6.6 bits from capacity at P=1e6
    rng = np.random.default_rng(106)
    worst_dual = 0.0
    achievable_ok = True
    for _ in range(10):
        ch = ChannelPair(crandn(rng, 2, 3), crandn(rng, 4, 3))
        for p in (1.0, 100.0):
            direct, cross = masked_mimo_rate_dual(ch, p)
            worst_dual = max(worst_dual, abs(direct - cross))
            cap = solve_saddle(ch, p).capacity_bits
            if direct > cap + 1e-6:
                achievable_ok = False
    ch = ChannelPair(np.diag([0.1, 10.0]), np.eye(2))
    p = 1e6
    cap = solve_saddle(ch, p, Tolerance(conv_abs=1e-3)).capacity_bits
    gap = cap - masked_mimo_rate(ch, p)
    ok = worst_dual <= 1e-9 and achievable_ok and gap >= 6.6
    report(6, ok, f"worst dual delta {worst_dual:.3e} (tol 1e-9), "
                  f"achievability {'ok' if achievable_ok else 'BROKEN'}, "
                  f"constructed gap {gap:.3f} bits (need >= 6.6)")
    assert ok


def test_criterion_7_zero_capacity_equivalence():
    # is_zero_capacity verdict vs solve_saddle (<= 1e-4 bits) on 50 random
    # and 10 adversarial degraded constructions
    rng = np.random.default_rng(107)
    mismatches = 0
    for _ in range(50):
        nt = int(rng.integers(1, 4))
        nr = int(rng.integers(1, 4))
        ne = int(rng.integers(1, 4))
        ch = ChannelPair(crandn(rng, nr, nt), crandn(rng, ne, nt))
        verdict = is_zero_capacity(ch)
        cap = solve_saddle(ch, 10.0).capacity_bits
        if verdict != (cap <= 1e-4):
            mismatches += 1
    for _ in range(10):
        # receiver channel a contraction of the eavesdropper's: zero capacity
        nt, nr, ne = 2, 2, 3
        he = crandn(rng, ne, nt)
        th = spectral_ball_project(crandn(rng, nr, ne), float(rng.uniform(0.3, 1.0)))
        ch = ChannelPair(th @ he, he)
        verdict = is_zero_capacity(ch)
        cap = solve_saddle(ch, 10.0).capacity_bits
        if (not verdict) or cap > 1e-4:
            mismatches += 1
    ok = mismatches == 0
    report(7, ok, f"{mismatches} verdict mismatches over 60 instances (need 0)")
    assert ok


def test_criterion_8_scaling_exact_points():
    beta, gamma = optimal_allocation()
    e_alloc = max(abs(beta - 2 / 9), abs(gamma - 1 / 9))
    e_ratio3 = abs(min_eavesdropper_ratio(2 / 3) - 3.0)
    e_ratio_half = abs(min_eavesdropper_ratio(0.5) - (1.5 + math.sqrt(2)))
    pts = frontier([0.0, 0.5])
    endpoints_exact = pts[0] == (0.0, 1.0) and pts[1] == (0.5, 0.0)
    ok = e_alloc <= 1e-9 and e_ratio3 <= 1e-9 and e_ratio_half <= 1e-6 \
        and endpoints_exact
    report(8, ok, f"allocation error {e_alloc:.3e} (tol 1e-9), ratio(2/3) error "
                  f"{e_ratio3:.3e} (tol 1e-9), ratio(1/2) error {e_ratio_half:.3e} "
                  f"(tol 1e-6), endpoints {'exact' if endpoints_exact else 'WRONG'}")
    assert ok


def test_criterion_9a_monte_carlo_vs_asymptote():
    # (Nt, Nr, Ne) = (50, 50, 200), 50 trials: mean sigma_max within 5% of
    # the asymptotic formula at (0.25, 0.25)
    mc = monte_carlo_sigma_max(50, 50, 200, 50, seed=2024)
    target = asymptotic_sigma_max(0.25, 0.25)
    rel = abs(mc.empirical_sigma_max_mean - target) / target
    ok = rel <= 0.05
    report("9a", ok,
           f"empirical mean {mc.empirical_sigma_max_mean:.6f} "
           f"(sd {mc.empirical_sigma_max_sd:.4f}) vs formula {target:.6f}: "
           f"relative deviation {rel:.3%} (tol 5%); the printed formula is the "
           f"limit of the squared statistic ({math.sqrt(target):.6f} unsquared, "
           f"deviation {abs(mc.empirical_sigma_max_mean - math.sqrt(target)) / math.sqrt(target):.3%}), "
           f"so neither reading meets 5% at this matrix size")
    assert ok


def test_criterion_9b_region_grid_consistency():
    # formula <= 1 iff region membership, 200 x 200 grid
    betas = np.linspace(0.0, 0.999, 200)
    gammas = np.linspace(0.01, 1.5, 200)
    mismatches = 0
    for b in betas:
        for g in gammas:
            if (asymptotic_sigma_max(b, g) <= 1.0) != zero_cap_region(b, g):
                mismatches += 1
    ok = mismatches == 0
    report("9b", ok, f"{mismatches} grid mismatches over 40000 points (need 0)")
    assert ok
