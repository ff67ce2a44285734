"""Command line interface.

Subcommands wrap the library operations one to one; every run emits a JSON
report (stdout with --json, and report.json under --out) echoing the
command, input digests, tolerances actually used, wall time, and seed.
Rates are reported in bits with 9 significant digits.  Exit code is 0 only
when no error occurred and, for the capacity path, the primal-dual gap is
within the convergence tolerance.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
import time

import numpy as np

from .errors import MimomeError, SolverNotConverged
from .gsvd import ChannelPair, gsvd, he_pseudo_inverse, sigma_max, subspace_dims
from .io import read_matrix, write_matrix
from .matrix_core import Tolerance
from .regimes import (achievability_covariance, high_snr_capacity,
                      is_zero_capacity, masked_mimo_gap, masked_mimo_rate_dual)
from .scaling import (asymptotic_sigma_max, frontier, min_eavesdropper_ratio,
                      monte_carlo_sigma_max, optimal_allocation, zero_cap_region)
from .secrecy import (SaddlePoint, rate_minus, rate_plus, solve_saddle, theta,
                      verify_saddle)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NOT_CONVERGED = 2


def _fmt(x) -> str:
    return f"{float(x):.9g}"


def _json_default(obj):
    # numpy scalars leak into reports; coerce them to plain Python types
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


def _digest(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        h.update(fh.read())
    return h.hexdigest()


def _tolerance(args) -> Tolerance:
    return Tolerance(rank_rel=args.tol_rank, conv_abs=args.tol_conv)


def _report_base(args, tol: Tolerance) -> dict:
    return {
        "command": " ".join(sys.argv[1:]),
        "inputs": {},
        "results": {},
        "units": "bits",
        "tolerances": {"rank_rel": tol.rank_rel, "conv_abs": tol.conv_abs,
                       "psd_margin": tol.psd_margin},
        "seed": args.seed,
        "wall_time_s": None,
    }


def _load_pair(report, hr_file, he_file) -> ChannelPair:
    report["inputs"][str(hr_file)] = _digest(hr_file)
    report["inputs"][str(he_file)] = _digest(he_file)
    return ChannelPair(read_matrix(hr_file), read_matrix(he_file))


def _finish(report, args, started, human_lines, exit_code):
    report["wall_time_s"] = time.monotonic() - started
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        with open(os.path.join(args.out, "report.json"), "w") as fh:
            json.dump(report, fh, indent=1, default=_json_default)
            fh.write("\n")
    if args.json:
        print(json.dumps(report, indent=1, default=_json_default))
    else:
        for line in human_lines:
            print(line)
    return exit_code


def _out_path(args, name):
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        return os.path.join(args.out, name)
    return name


def cmd_capacity(args) -> int:
    started = time.monotonic()
    tol = _tolerance(args)
    report = _report_base(args, tol)
    ch = _load_pair(report, args.hr, args.he)
    sp = solve_saddle(ch, args.power, tol)
    kkt = verify_saddle(ch, sp, seed=args.seed, tol=tol)
    res = {
        "power": args.power,
        "capacity_bits": sp.capacity_bits,
        "gap_bits": sp.gap_bits,
        "zero_cap": kkt.zero_cap,
        "degraded_resid": kkt.degraded_resid,
        "saddle_resid_bits": kkt.saddle_resid,
        "iterations": sp.iterations,
    }
    report["results"] = res
    lines = [
        f"capacity_bits {_fmt(sp.capacity_bits)}",
        f"gap_bits {_fmt(sp.gap_bits)}",
        f"zero_cap {str(kkt.zero_cap).lower()}",
        f"degraded_resid {_fmt(kkt.degraded_resid)}",
        f"saddle_resid_bits {_fmt(kkt.saddle_resid)}",
    ]
    if args.emit_covariances:
        kb = _out_path(args, "k_bar.json")
        pb = _out_path(args, "phi_bar.json")
        write_matrix(kb, sp.k_bar)
        write_matrix(pb, sp.phi_bar)
        report["results"]["k_bar_file"] = kb
        report["results"]["phi_bar_file"] = pb
        lines.append(f"wrote {kb} {pb}")
    code = EXIT_OK if sp.gap_bits <= tol.conv_abs else EXIT_NOT_CONVERGED
    return _finish(report, args, started, lines, code)


def cmd_verify(args) -> int:
    started = time.monotonic()
    tol = _tolerance(args)
    report = _report_base(args, tol)
    ch = _load_pair(report, args.hr, args.he)
    report["inputs"][str(args.k_bar)] = _digest(args.k_bar)
    report["inputs"][str(args.phi_bar)] = _digest(args.phi_bar)
    k_bar = read_matrix(args.k_bar)
    phi_bar = read_matrix(args.phi_bar)
    rp = rate_plus(ch, k_bar, phi_bar, tol)
    rm = rate_minus(ch, k_bar)
    gap = abs(rp - rm)
    sp = SaddlePoint(k_bar=k_bar, phi_bar=phi_bar,
                     capacity_bits=max(rm, 0.0),
                     theta_bar=theta(ch, k_bar, phi_bar, tol),
                     iterations=0, gap_bits=gap, power=args.power)
    kkt = verify_saddle(ch, sp, seed=args.seed, tol=tol)
    report["results"] = {
        "rate_plus_bits": rp, "rate_minus_bits": rm, "gap_bits": gap,
        "saddle_resid_bits": kkt.saddle_resid,
        "degraded_resid": kkt.degraded_resid, "zero_cap": kkt.zero_cap,
    }
    lines = [
        f"rate_plus_bits {_fmt(rp)}",
        f"rate_minus_bits {_fmt(rm)}",
        f"gap_bits {_fmt(gap)}",
        f"saddle_resid_bits {_fmt(kkt.saddle_resid)}",
        f"degraded_resid {_fmt(kkt.degraded_resid)}",
    ]
    code = EXIT_OK if gap <= tol.conv_abs else EXIT_NOT_CONVERGED
    return _finish(report, args, started, lines, code)


def cmd_gsvd(args) -> int:
    started = time.monotonic()
    tol = _tolerance(args)
    report = _report_base(args, tol)
    ch = _load_pair(report, args.hr, args.he)
    g = gsvd(ch, tol)
    hr_rec, he_rec = g.reconstruct()
    denom = max(np.linalg.norm(ch.stacked()), 1e-300)
    resid = math.hypot(np.linalg.norm(hr_rec - ch.hr),
                       np.linalg.norm(he_rec - ch.he)) / denom
    for name, mat in (("psi_r", g.psi_r), ("psi_e", g.psi_e),
                      ("psi_t", g.psi_t), ("omega", g.omega)):
        write_matrix(_out_path(args, f"{name}.json"), mat)
    report["results"] = {
        "k": g.dims.k, "p": g.dims.p, "s": g.dims.s,
        "sigma": [float(s) for s in g.sigma],
        "reconstruction_resid": resid,
        "rank_ambiguous": g.rank_ambiguous,
    }
    lines = [
        f"dims k={g.dims.k} p={g.dims.p} s={g.dims.s}",
        "sigma " + " ".join(_fmt(s) for s in g.sigma),
        f"reconstruction_resid {_fmt(resid)}",
    ]
    code = EXIT_OK
    if args.check:
        checks = {"reconstruction": resid <= 1e-9}
        dims = subspace_dims(ch, tol)
        checks["dims_consistent"] = (dims.k, dims.p, dims.s) == \
            (g.dims.k, g.dims.p, g.dims.s)
        if g.dims.p == 0 and len(g.sigma):
            sv = np.linalg.svd(ch.hr @ he_pseudo_inverse(g), compute_uv=False)
            sv = np.sort(sv[sv > tol.rank_rel * max(sv, default=0.0)])
            ok = len(sv) == len(g.sigma) and \
                np.allclose(sv, np.sort(g.sigma), rtol=1e-8, atol=1e-8)
            checks["sigma_vs_svd"] = bool(ok)
        report["results"]["checks"] = checks
        for name, ok in checks.items():
            lines.append(f"check {name} {'pass' if ok else 'FAIL'}")
        if not all(checks.values()):
            code = EXIT_ERROR
    return _finish(report, args, started, lines, code)


def cmd_high_snr(args) -> int:
    started = time.monotonic()
    tol = _tolerance(args)
    report = _report_base(args, tol)
    ch = _load_pair(report, args.hr, args.he)
    b = high_snr_capacity(ch, args.power, tol)
    res = {
        "power": args.power, "c0_bits": b.c0_bits,
        "gsv_sum_bits": b.gsv_sum_bits, "total_bits": b.total_bits,
        "case": b.case, "flagged_empty_sr": b.flagged_empty_sr,
    }
    if args.emit_covariances:
        g = gsvd(ch, tol)
        kf = _out_path(args, "k_achievable.json")
        write_matrix(kf, achievability_covariance(g, args.power))
        res["k_achievable_file"] = kf
    report["results"] = res
    lines = [
        f"total_bits {_fmt(b.total_bits)}",
        f"c0_bits {_fmt(b.c0_bits)}",
        f"gsv_sum_bits {_fmt(b.gsv_sum_bits)}",
        f"case {b.case}" + (" (empty receiver-only subspace)"
                            if b.flagged_empty_sr else ""),
    ]
    return _finish(report, args, started, lines, EXIT_OK)


def cmd_masked(args) -> int:
    started = time.monotonic()
    tol = _tolerance(args)
    report = _report_base(args, tol)
    ch = _load_pair(report, args.hr, args.he)
    direct, cross = masked_mimo_rate_dual(ch, args.power, tol)
    gap = masked_mimo_gap(ch, tol)
    report["results"] = {
        "power": args.power, "masked_rate_bits": direct,
        "cross_check_delta_bits": abs(direct - cross),
        "asymptotic_gap_bits": gap,
    }
    lines = [
        f"masked_rate_bits {_fmt(direct)}",
        f"cross_check_delta_bits {_fmt(abs(direct - cross))}",
        f"asymptotic_gap_bits {_fmt(gap)}",
    ]
    if args.sweep:
        powers = np.geomspace(1e2, 1e6, args.sweep_points)
        rows = []
        for p in powers:
            sp = solve_saddle(ch, float(p), tol)
            msk, _ = masked_mimo_rate_dual(ch, float(p), tol)
            rows.append((float(p), sp.capacity_bits, msk))
        csv_path = _out_path(args, "masked_sweep.csv")
        with open(csv_path, "w") as fh:
            fh.write("power [linear],capacity [bits],masked_rate [bits]\n")
            for p, c, m in rows:
                fh.write(f"{_fmt(p)},{_fmt(c)},{_fmt(m)}\n")
        from .plots import render_sweep
        svg_path = _out_path(args, "masked_sweep.svg")
        render_sweep([r[0] for r in rows], [r[1] for r in rows],
                     [r[2] for r in rows], svg_path)
        report["results"]["sweep_csv"] = csv_path
        report["results"]["sweep_svg"] = svg_path
        lines.append(f"wrote {csv_path} {svg_path}")
    return _finish(report, args, started, lines, EXIT_OK)


def cmd_scaling(args) -> int:
    started = time.monotonic()
    tol = _tolerance(args)
    report = _report_base(args, tol)
    lines = []
    if args.scaling_cmd == "frontier":
        grid = np.linspace(0.0, 0.5, args.points)
        pts = frontier(grid)
        csv_path = _out_path(args, "frontier.csv")
        with open(csv_path, "w") as fh:
            fh.write("beta [Nt/Ne],gamma [Nr/Ne]\n")
            for b, g in pts:
                fh.write(f"{_fmt(b)},{_fmt(g)}\n")
        from .plots import render_frontier
        svg_path = _out_path(args, "frontier.svg")
        render_frontier(pts, svg_path)
        report["results"] = {"points": args.points, "csv": csv_path,
                             "svg": svg_path,
                             "endpoints": [list(pts[0]), list(pts[-1])]}
        lines += [f"wrote {csv_path} {svg_path}",
                  f"endpoints ({_fmt(pts[0][0])},{_fmt(pts[0][1])}) "
                  f"({_fmt(pts[-1][0])},{_fmt(pts[-1][1])})"]
    elif args.scaling_cmd == "allocation":
        beta, gamma = optimal_allocation()
        taus = np.linspace(0.05, 0.95, args.points)
        rhos = [min_eavesdropper_ratio(float(t)) for t in taus]
        csv_path = _out_path(args, "allocation.csv")
        with open(csv_path, "w") as fh:
            fh.write("tau [Nt/(Nt+Nr)],min_ratio [Ne/(Nt+Nr)]\n")
            for t, r in zip(taus, rhos):
                fh.write(f"{_fmt(t)},{_fmt(r)}\n")
        from .plots import render_allocation
        svg_path = _out_path(args, "allocation.svg")
        render_allocation(list(taus), rhos, svg_path)
        report["results"] = {
            "beta_opt": beta, "gamma_opt": gamma,
            "min_ratio_at_two_thirds": min_eavesdropper_ratio(2.0 / 3.0),
            "min_ratio_at_half": min_eavesdropper_ratio(0.5),
            "csv": csv_path, "svg": svg_path,
        }
        lines += [f"beta_opt {_fmt(beta)}", f"gamma_opt {_fmt(gamma)}",
                  f"min_ratio(2/3) {_fmt(report['results']['min_ratio_at_two_thirds'])}",
                  f"min_ratio(1/2) {_fmt(report['results']['min_ratio_at_half'])}",
                  f"wrote {csv_path} {svg_path}"]
    else:  # mc
        mc = monte_carlo_sigma_max(args.nt, args.nr, args.ne, args.trials,
                                   args.seed, tol)
        beta, gamma = args.nt / args.ne, args.nr / args.ne
        res = {
            "trials": mc.trials, "seed": mc.seed,
            "empirical_sigma_max_mean": mc.empirical_sigma_max_mean,
            "empirical_sigma_max_sd": mc.empirical_sigma_max_sd,
            "zero_cap_fraction": mc.zero_cap_fraction,
            "beta": beta, "gamma": gamma,
            "in_zero_region": zero_cap_region(beta, gamma),
        }
        if 0.0 <= beta < 1.0 and gamma > 0.0:
            res["asymptotic_sigma_max"] = asymptotic_sigma_max(beta, gamma)
        report["results"] = res
        lines += [f"empirical_sigma_max_mean {_fmt(mc.empirical_sigma_max_mean)}",
                  f"empirical_sigma_max_sd {_fmt(mc.empirical_sigma_max_sd)}",
                  f"zero_cap_fraction {_fmt(mc.zero_cap_fraction)}"]
        if "asymptotic_sigma_max" in res:
            lines.append(f"asymptotic_sigma_max {_fmt(res['asymptotic_sigma_max'])}")
    return _finish(report, args, started, lines, EXIT_OK)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol-rank", type=float, default=Tolerance().rank_rel,
                        help="relative rank threshold")
    common.add_argument("--tol-conv", type=float, default=Tolerance().conv_abs,
                        help="solver convergence tolerance in bits")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", default=None, metavar="DIR",
                        help="directory for report.json and artifact files")
    common.add_argument("--emit-covariances", action="store_true")
    common.add_argument("--json", action="store_true",
                        help="print the JSON report to stdout")

    parser = argparse.ArgumentParser(
        prog="mimome",
        description="Secrecy capacity of the multi-antenna Gaussian "
                    "wiretap channel")
    sub = parser.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("capacity", parents=[common],
                       help="solve the saddle problem for the secrecy capacity")
    p.add_argument("hr")
    p.add_argument("he")
    p.add_argument("--power", type=float, required=True)
    p.set_defaults(func=cmd_capacity)

    p = sub.add_parser("verify", parents=[common],
                       help="check a claimed saddle point")
    p.add_argument("hr")
    p.add_argument("he")
    p.add_argument("k_bar")
    p.add_argument("phi_bar")
    p.add_argument("--power", type=float, required=True)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("gsvd", parents=[common],
                       help="generalized singular value decomposition")
    p.add_argument("hr")
    p.add_argument("he")
    p.add_argument("--check", action="store_true",
                   help="re-verify factorization invariants")
    p.set_defaults(func=cmd_gsvd)

    p = sub.add_parser("high-snr", parents=[common],
                       help="high-power capacity asymptote")
    p.add_argument("hr")
    p.add_argument("he")
    p.add_argument("--power", type=float, required=True)
    p.set_defaults(func=cmd_high_snr)

    p = sub.add_parser("masked", parents=[common],
                       help="masked (artificial noise) baseline rate")
    p.add_argument("hr")
    p.add_argument("he")
    p.add_argument("--power", type=float, required=True)
    p.add_argument("--sweep", action="store_true",
                   help="sweep P over 1e2..1e6 and emit capacity vs masked CSV")
    p.add_argument("--sweep-points", type=int, default=9)
    p.set_defaults(func=cmd_masked)

    p = sub.add_parser("scaling", parents=[common],
                       help="many-antenna scaling laws")
    ssub = p.add_subparsers(dest="scaling_cmd", required=True)
    sp = ssub.add_parser("frontier", parents=[common])
    sp.add_argument("--points", type=int, default=100)
    sp.set_defaults(func=cmd_scaling)
    sp = ssub.add_parser("allocation", parents=[common])
    sp.add_argument("--points", type=int, default=91)
    sp.set_defaults(func=cmd_scaling)
    sp = ssub.add_parser("mc", parents=[common])
    sp.add_argument("--nt", type=int, required=True)
    sp.add_argument("--nr", type=int, required=True)
    sp.add_argument("--ne", type=int, required=True)
    sp.add_argument("--trials", type=int, required=True)
    sp.set_defaults(func=cmd_scaling)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SolverNotConverged as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    except MimomeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
