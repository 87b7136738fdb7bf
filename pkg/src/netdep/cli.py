"""Command line interface: network statistics, HAC estimation, simulation,
verification ledger, and the Monte Carlo study."""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys

import numpy as np

from . import dgp, hac, kernels, montecarlo, netstats, verify
from .graph import fixture, read_edge_list, write_edge_list


def _kernel_name(name):
    return name.replace("-", "_")


def _theta_from_flag(flag):
    """Parse --theta: 'geometric:<gamma>' or 'zero:<s0>'."""
    kind, _, arg = flag.partition(":")
    if kind == "geometric":
        return netstats.ThetaSequence.geometric(float(arg))
    if kind == "zero":
        return netstats.ThetaSequence.zero_beyond(int(arg))
    raise SystemExit(f"unsupported theta spec {flag!r}")


def _load_sample(path, mean_flag):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if not all(h.strip().startswith("y") for h in header):
            raise SystemExit("sample CSV must have header y1..yv")
        rows = [[float(x) for x in row] for row in reader if row]
    y = np.array(rows)
    known = None
    if mean_flag not in (None, "sample"):
        known = np.array([float(x) for x in mean_flag.split(",")])
    return hac.Sample(y=y, known_mean=known)


def _write_sample(path, y):
    y = np.atleast_2d(np.asarray(y))
    if y.shape[0] == 1:
        y = y.T
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([f"y{k + 1}" for k in range(y.shape[1])])
        for row in y:
            w.writerow([f"{v:.17g}" for v in row])


def _emit(obj, out):
    text = json.dumps(obj, indent=2, sort_keys=True)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _cmd_stats(args):
    g = read_edge_list(args.edgelist)
    prof = netstats.denseness_profile(g, m=args.m)
    out = {
        "n": g.n,
        "numEdges": g.num_edges,
        "stats": {
            "diameter": prof.stats.diameter,
            "avgDegree": prof.stats.avg_degree,
            "maxDegree": prof.stats.max_degree,
            "avgConnectedDistance": prof.stats.avg_connected_distance,
        },
        "deltaShell": {f"{s},{k:g}": v for (s, k), v in prof.delta_shell.items()},
        "deltaBall": {str(s): v for s, v in prof.delta_ball.items()},
        "deltaCap": {f"{s},{k:g}": v for (s, k), v in prof.delta_cap.items()},
        "cCoef": {f"{s},{k:g}": v for (s, k), v in prof.c_coef.items()},
        "m": prof.m,
    }
    if args.theta is not None:
        theta = _theta_from_flag(args.theta)
        b_n = args.bandwidth
        if b_n is None:
            b_n = kernels.bandwidth(kernels.BandwidthRule(), g.n,
                                    float(g.degrees.mean()))
        rep = netstats.condition_report(g, theta, args.p, args.m, b_n)
        out["conditions"] = {
            "p": rep.p, "mN": rep.m_n, "bN": rep.b_n,
            "ndA": rep.nd_a_value,
            "ndB": {str(k): v for k, v in rep.nd_b_value.items()},
            "nfQThreshold": rep.nf_q_threshold,
            "hacIii": rep.hac_iii_value,
        }
    _emit(out, args.out)


def _cmd_estimate(args):
    g = read_edge_list(args.edgelist)
    sample = _load_sample(args.sample, args.mean)
    bw = args.bandwidth
    if bw is None:
        bw = kernels.bandwidth(
            kernels.BandwidthRule(args.bw_constant, args.bw_epsilon),
            g.n, float(g.degrees.mean()))
    spec = kernels.KernelSpec(_kernel_name(args.kernel), bw)
    if sample.known_mean is not None:
        res = hac.hac_known_mean(g, sample, spec)
    else:
        res = hac.hac_unknown_mean(g, sample, spec)
    out = {
        "V": res.V.tolist(),
        "bandwidth": res.bandwidth_used,
        "kernel": spec.family,
        "psdFlag": bool(res.psd_flag),
        "lagOmegaTraces": {str(s): float(np.trace(om))
                           for s, om in res.lag_covariances.items()},
    }
    if sample.v == 1:
        v = res.scalar()
        if v >= 0:
            lo, hi = hac.confidence_interval(sample, v, level=args.level)
            out["ci"] = [lo, hi]
            out["mean"] = float(sample.mean()[0])
        else:
            out["ci"] = None
            out["indefinite"] = True
    _emit(out, args.out)


def _cmd_simulate(args):
    os.makedirs(args.out, exist_ok=True)
    spec = dgp.FormationSpec(args.n, getattr(args, "lambda"))
    model = dgp.LinearModelSpec(args.gamma)
    manifest = []
    for r in range(args.reps):
        rng = np.random.default_rng(np.random.SeedSequence([args.seed, r]))
        draw = dgp.form_network(spec, rng=rng)
        sample = dgp.simulate_linear(draw.graph, model, rng=rng)
        edge_path = os.path.join(args.out, f"rep{r:04d}.edges")
        csv_path = os.path.join(args.out, f"rep{r:04d}.csv")
        write_edge_list(draw.graph, edge_path)
        _write_sample(csv_path, sample.y)
        manifest.append({"rep": r, "edges": edge_path, "sample": csv_path,
                         "piN": draw.pi_n})
    _emit({"n": args.n, "lambda": getattr(args, "lambda"),
           "gamma": args.gamma, "seed": args.seed, "reps": args.reps,
           "files": manifest}, os.path.join(args.out, "manifest.json"))
    print(f"wrote {args.reps} replications to {args.out}")


def _cmd_verify(args):
    ledger = {}
    ring = fixture("ring", 60)
    model = dgp.LinearModelSpec(0.5)
    psi_entries = []
    ok = True
    for s in range(1, 7):
        chk = verify.psi_bound_check(
            ring, model, [0], [s], s, reps=args.reps, seed=args.seed)
        psi_entries.append({"s": s, "cov": chk.mc_cov, "se": chk.mc_se,
                            "bound": chk.bound, "impliedC": chk.implied_c,
                            "violated": chk.violated})
        ok = ok and not chk.violated
    ledger["psiBound"] = {"pass": ok, "entries": psi_entries}

    ring30 = fixture("ring", 30)
    diag = verify.clt_diagnostic(ring30, dgp.LinearModelSpec(0.3),
                                 reps=max(args.reps, 500), seed=args.seed)
    ledger["cltDiagnostic"] = {
        "pass": diag.ks_statistic < 2.0 * diag.ks_critical,
        "ks": diag.ks_statistic, "critical": diag.ks_critical,
    }

    lln = verify.lln_diagnostic(fixture("ring", 200), dgp.LinearModelSpec(0.5),
                                reps=max(args.reps // 4, 100), seed=args.seed)
    ledger["llnDiagnostic"] = {
        "pass": lln.l1_deviation < 0.5,
        "l1Deviation": lln.l1_deviation, "se": lln.l1_se,
    }
    ledger["allPass"] = all(v["pass"] for v in ledger.values()
                            if isinstance(v, dict))
    _emit(ledger, args.out)
    return 0 if ledger["allPass"] else 1


def _cmd_mc(args):
    if args.config:
        with open(args.config) as fh:
            raw = json.load(fh)
        cells = [montecarlo.McCell(**c) for c in raw["cells"]]
    else:
        n_cap = None if args.full else 1000
        if n_cap is not None and args.n > n_cap:
            raise SystemExit("n > 1000 requires --full")
        cells = [montecarlo.McCell(lam=getattr(args, "lambda"), n=args.n,
                                   gamma=args.gamma,
                                   bw_constant=args.bw_constant,
                                   kernel=_kernel_name(args.kernel),
                                   reps=args.reps, seed=args.seed)]
    reports = montecarlo.run_grid(cells, parallelism=args.workers,
                                  out_dir=args.out)
    for rep in reports:
        c = rep.cell
        print(f"lambda={c.lam} n={c.n} gamma={c.gamma} "
              f"coverage={rep.coverage:.4f} (se {rep.coverage_se:.4f}) "
              f"negVar={rep.neg_var_count}")
    print(f"study written to {args.out}")


def build_parser():
    p = argparse.ArgumentParser(prog="netdep",
                                description="network dependent data toolkit")
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("stats", help="denseness statistics of an edge list")
    sp.add_argument("edgelist")
    sp.add_argument("--m", type=int, default=2)
    sp.add_argument("--theta", default=None,
                    help="geometric:<gamma> or zero:<s0>")
    sp.add_argument("--p", type=float, default=8.0)
    sp.add_argument("--bandwidth", type=float, default=None)
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=_cmd_stats)

    ep = sub.add_parser("estimate", help="HAC variance estimate")
    ep.add_argument("edgelist")
    ep.add_argument("sample")
    ep.add_argument("--kernel", default="parzen",
                    choices=["parzen", "bartlett", "truncated",
                             "tukey-hanning", "tukey_hanning"])
    ep.add_argument("--bandwidth", type=float, default=None)
    ep.add_argument("--bw-constant", type=float, default=2.0)
    ep.add_argument("--bw-epsilon", type=float, default=0.05)
    ep.add_argument("--mean", default="sample",
                    help="'sample' or comma-separated known mean")
    ep.add_argument("--level", type=float, default=0.95)
    ep.add_argument("--out", default=None)
    ep.set_defaults(func=_cmd_estimate)

    mp = sub.add_parser("simulate", help="simulate networks and samples")
    mp.add_argument("--n", type=int, required=True)
    mp.add_argument("--lambda", type=float, required=True)
    mp.add_argument("--gamma", type=float, default=0.0)
    mp.add_argument("--seed", type=int, default=0)
    mp.add_argument("--reps", type=int, default=1)
    mp.add_argument("--out", required=True)
    mp.set_defaults(func=_cmd_simulate)

    vp = sub.add_parser("verify", help="empirical property ledger")
    vp.add_argument("--reps", type=int, default=1000)
    vp.add_argument("--seed", type=int, default=0)
    vp.add_argument("--out", default=None)
    vp.set_defaults(func=_cmd_verify)

    cp = sub.add_parser("mc", help="Monte Carlo coverage study")
    cp.add_argument("--config", default=None,
                    help="JSON file with a 'cells' list")
    cp.add_argument("--lambda", type=float, default=3.0)
    cp.add_argument("--n", type=int, default=500)
    cp.add_argument("--gamma", type=float, default=0.0)
    cp.add_argument("--bw-constant", type=float, default=2.0)
    cp.add_argument("--kernel", default="parzen")
    cp.add_argument("--reps", type=int, default=1000)
    cp.add_argument("--seed", type=int, default=0)
    cp.add_argument("--workers", type=int, default=1)
    cp.add_argument("--out", default="study")
    cp.add_argument("--full", action="store_true",
                    help="allow n above 1000")
    cp.set_defaults(func=_cmd_mc)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    rc = args.func(args)
    if isinstance(rc, int) and rc:
        sys.exit(rc)


if __name__ == "__main__":
    main()
