"""Command-line front end: every computation as a reproducible subcommand.

Output formats: json (one object with inputs/result/diagnostics), csv for
sweep tables, plain for a bare value.  Exit codes: 0 success, 1 numeric or
resource failure, 2 usage error.  The sieve memory budget can be overridden
with the FRIABLE_SIEVE_LIMIT environment variable.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import (
    characters,
    circle,
    core,
    dioph,
    exact,
    localfactors,
    weyl,
)
from .errors import NumericError, ResourceLimitError


@dataclass
class RunConfig:
    subcommand: str
    params: dict
    output_format: str
    seed: int
    threads: int


class UsageError(Exception):
    pass


def _sieve_budget() -> int:
    return int(os.environ.get("FRIABLE_SIEVE_LIMIT", core.DEFAULT_SIEVE_LIMIT))


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="friable",
        description="Friable-number counts, Weyl sums, local factors, and "
        "circle-method predictions.",
    )
    sub = ap.add_subparsers(dest="subcommand", required=True)

    def common(p):
        p.add_argument("--format", choices=("json", "csv", "plain"), default="json")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--threads", type=int, default=1)

    p = sub.add_parser("psi", help="Psi(x, y): count of y-friable n <= x")
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--y", type=float, required=True)
    p.add_argument("--strategy", choices=("auto", "sieve", "lattice"), default="auto")
    common(p)

    p = sub.add_parser("alpha", help="saddle point alpha(x, y) and sigma2")
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--y", type=float, required=True)
    p.add_argument("--tol", type=float, default=core.SADDLE_DEFAULT_TOL)
    common(p)

    p = sub.add_parser("rho", help="Dickman rho(u) from the delay equation")
    p.add_argument("--u", type=float, required=True)
    p.add_argument("--step", type=float, default=core.DICKMAN_DEFAULT_STEP)
    common(p)

    p = sub.add_parser("weyl", help="E_k(x, y; theta) over the friables")
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--y", type=float, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--theta", type=float, required=True)
    common(p)

    p = sub.add_parser("arcs", help="major-arc decomposition for (Q, x, k)")
    p.add_argument("--Q", type=float, required=True)
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--k", type=int, required=True)
    common(p)

    p = sub.add_parser("gauss", help="Gauss sum G_k(q, a, chi)")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--a", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--chi-index", type=int, default=0,
                   help="position of chi in the character group listing")
    common(p)

    p = sub.add_parser("hq", help="local divisor sum H_{a/q}(alpha)")
    p.add_argument("--a", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--y", type=float, required=True)
    p.add_argument("--k", type=int, required=True)
    common(p)

    p = sub.add_parser("singular", help="truncated singular series sum_{q<=Q} S(q)")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--Q", type=int, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--y", type=float, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--Q-sweep", type=int, nargs="*", default=None,
                   help="additional Q values for a CSV sweep table")
    common(p)

    p = sub.add_parser("beta", help="local factor beta_p, or beta_infty with --infty")
    p.add_argument("--p", type=int)
    p.add_argument("--infty", action="store_true")
    p.add_argument("--N", type=int, default=0)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--y", type=float, default=float("inf"))
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--tail-tol", type=float, default=1e-9)
    p.add_argument("--Delta", type=float, default=2000.0)
    common(p)

    p = sub.add_parser("predict", help="circle-method prediction vs exact count")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--y", type=float, required=True)
    p.add_argument("--x", type=float, default=None)
    p.add_argument("--prime-cutoff", type=int, default=100)
    p.add_argument("--tail-tol", type=float, default=1e-8)
    p.add_argument("--no-exact", action="store_true")
    common(p)

    p = sub.add_parser("count", help="exact ordered representation count")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--y", type=float, required=True)
    p.add_argument("--x", type=float, default=None)
    common(p)

    p = sub.add_parser("moment", help="exact moment of |E_k|^(2s), or a CSV sweep")
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--y", type=float, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--s", type=int, required=True, nargs="+")
    p.add_argument("--doublings", type=int, default=0)
    common(p)

    p = sub.add_parser("scan-minor", help="sup |E_k|/Psi off the major arcs")
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--y", type=float, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--Q", type=float, required=True, nargs="+")
    p.add_argument("--grid-size", type=int, default=2000)
    common(p)

    p = sub.add_parser("verify", help="self-test identity suites")
    p.add_argument("--suite", choices=("appendix", "moments", "erdos-turan", "all"),
                   default="all")
    common(p)
    return ap


def validate(args: argparse.Namespace) -> RunConfig:
    d = vars(args).copy()
    sc = d.pop("subcommand")
    fmt = d.pop("format")
    seed = d.pop("seed")
    threads = d.pop("threads")
    if threads < 1:
        raise UsageError("--threads must be >= 1")
    if "y" in d and d["y"] is not None and not math.isinf(d["y"]) and d["y"] < 2:
        raise UsageError("y must be >= 2")
    if "x" in d and d["x"] is not None and sc != "arcs" and d["x"] < 2:
        raise UsageError("x must be >= 2")
    if "x" in d and "y" in d and d["x"] is not None and not math.isinf(d["y"]):
        if sc in ("psi", "alpha", "weyl", "moment", "scan-minor") and d["y"] > d["x"]:
            raise UsageError("need y <= x")
    if "k" in d and d["k"] is not None and not (1 <= d["k"] <= 8):
        raise UsageError("k must be in 1..8")
    if "s" in d:
        ss = d["s"] if isinstance(d["s"], list) else [d["s"]]
        if ss is not None and any(s < 1 for s in ss):
            raise UsageError("s must be >= 1")
    if sc == "beta" and not d.get("infty") and d.get("p") is None:
        raise UsageError("beta needs --p or --infty")
    if sc == "rho" and d["u"] < 0:
        raise UsageError("u must be >= 0")
    return RunConfig(sc, d, fmt, seed, threads)


def _emit(cfg: RunConfig, result, diagnostics: dict, plain, csv_rows=None, csv_cols=None):
    if cfg.output_format == "plain":
        print(plain)
    elif cfg.output_format == "csv" and csv_rows is not None:
        w = csv.writer(sys.stdout)
        w.writerow(csv_cols)
        for row in csv_rows:
            w.writerow(row)
    else:
        doc = {
            "inputs": {"subcommand": cfg.subcommand, **cfg.params,
                       "seed": cfg.seed, "threads": cfg.threads},
            "result": result,
            "diagnostics": diagnostics,
        }
        print(json.dumps(doc, default=_jsonable, sort_keys=True))


def _jsonable(obj):
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if hasattr(obj, "__dict__"):
        return obj.__dict__
    return str(obj)


def dispatch(cfg: RunConfig) -> int:
    t0 = time.time()
    d = cfg.params
    budget = _sieve_budget()

    if cfg.subcommand == "psi":
        pars = core.FriableParams(d["x"], d["y"])
        val = core.psi(pars, sieve_budget=budget, strategy=d["strategy"])
        _emit(cfg, val, {"timings": {"s": time.time() - t0}}, val)

    elif cfg.subcommand == "alpha":
        sd = core.saddle_alpha(core.FriableParams(d["x"], d["y"]), tol=d["tol"])
        res = {"alpha": sd.alpha, "sigma2": sd.sigma2,
               "zeta_alpha_y": sd.zeta_alpha_y, "residual": sd.residual}
        _emit(cfg, res, {"tolerances": {"saddle": d["tol"]},
                         "timings": {"s": time.time() - t0}}, sd.alpha)

    elif cfg.subcommand == "rho":
        table = core.build_dickman_table(max(d["u"] + 1.0, 5.0), d["step"])
        val = core.dickman_rho(d["u"], table)
        _emit(cfg, val, {"tolerances": {"grid_step": d["step"]},
                         "timings": {"s": time.time() - t0}}, val)

    elif cfg.subcommand == "weyl":
        pars = core.FriableParams(d["x"], d["y"])
        val = weyl.weyl_sum(pars, d["k"], d["theta"])
        psi_n = core.psi(pars)
        _emit(cfg, val, {"psi": psi_n, "abs_over_psi": abs(val) / psi_n,
                         "timings": {"s": time.time() - t0}}, val)

    elif cfg.subcommand == "arcs":
        arcs = weyl.arc_decompose(d["Q"], d["x"], d["k"])
        res = {"n_arcs": len(arcs.arcs), "total_measure": arcs.total_measure,
               "overlap_warning": arcs.overlap_warning}
        rows = [(a, q, hw) for a, q, hw in arcs.arcs]
        _emit(cfg, res, {"timings": {"s": time.time() - t0}}, len(arcs.arcs),
              csv_rows=rows, csv_cols=("a", "q", "half_width"))

    elif cfg.subcommand == "gauss":
        group = characters.character_group(d["q"])
        if not (0 <= d["chi_index"] < len(group)):
            raise UsageError(f"chi-index out of range 0..{len(group) - 1}")
        chi = group[d["chi_index"]]
        val = characters.gauss_sum_k(d["q"], d["a"], chi, d["k"])
        _emit(cfg, val, {"conductor": chi.conductor,
                         "bound": characters.gauss_bound(
                             d["q"], math.gcd(d["a"], d["q"]), chi, d["k"]),
                         "timings": {"s": time.time() - t0}}, val)

    elif cfg.subcommand == "hq":
        val = weyl.h_aq(d["a"], d["q"], d["alpha"], d["y"], d["k"])
        _emit(cfg, val, {"timings": {"s": time.time() - t0}}, val)

    elif cfg.subcommand == "singular":
        qs = sorted(set([d["Q"]] + (d["Q_sweep"] or [])))
        rows = []
        for Q in qs:
            ts = localfactors.singular_series_truncated(
                d["N"], Q, d["alpha"], d["y"], d["k"], d["s"])
            rows.append((Q, ts.value, ts.tail_estimate))
        main = rows[[q for q, _, _ in rows].index(d["Q"])]
        _emit(cfg, {"value": main[1], "tail_estimate": main[2]},
              {"tails": {"Q": main[2]}, "timings": {"s": time.time() - t0}},
              main[1], csv_rows=rows, csv_cols=("Q", "partial_sum", "tail_estimate"))

    elif cfg.subcommand == "beta":
        if d["infty"]:
            closed = localfactors.beta_infty_closed(d["alpha"], d["k"], d["s"])
            num = localfactors.beta_infty_numeric(d["alpha"], d["k"], d["s"], d["Delta"])
            res = {"closed": closed, "numeric": num.value,
                   "tail_estimate": num.tail_estimate}
            _emit(cfg, res, {"tails": {"Delta": num.tail_estimate},
                             "timings": {"s": time.time() - t0}}, closed)
        else:
            fac = localfactors.beta_p(d["p"], d["N"], d["alpha"], d["y"],
                                      d["k"], d["s"], d["tail_tol"])
            res = {"value": fac.value, "tail_bound": fac.tail_bound,
                   "levels": fac.levels}
            _emit(cfg, res, {"tails": {"geometric": fac.tail_bound},
                             "tolerances": {"tail_tol": d["tail_tol"]},
                             "timings": {"s": time.time() - t0}}, fac.value)

    elif cfg.subcommand == "predict":
        query = circle.RepresentationQuery(d["N"], d["k"], d["s"], d["y"], d["x"])
        rep = circle.predict(query, prime_cutoff=d["prime_cutoff"],
                             tail_tol=d["tail_tol"],
                             attach_exact=not d["no_exact"])
        res = {"predicted": rep.predicted, "exact": rep.exact, "ratio": rep.ratio,
               "alpha": rep.alpha, "psi": rep.psi, "beta_infty": rep.beta_infty,
               "series_certified": rep.series_certified,
               "beta_p": {str(p): v for p, (v, _) in rep.beta_p_partial.items()}}
        _emit(cfg, res, {"tails": {str(p): t for p, (_, t) in rep.beta_p_partial.items()},
                         **{"timings": {"s": time.time() - t0}}}, rep.predicted)

    elif cfg.subcommand == "count":
        query = circle.RepresentationQuery(d["N"], d["k"], d["s"], d["y"], d["x"])
        val = circle.count_exact(query)
        _emit(cfg, val, {"timings": {"s": time.time() - t0}}, val)

    elif cfg.subcommand == "moment":
        pars = core.FriableParams(d["x"], d["y"])
        if d["doublings"] > 0 or len(d["s"]) > 1:
            rep = circle.moment_scaling_report(pars, d["k"], d["s"],
                                               doublings=d["doublings"])
            rows = [(r["x"], r["y"], r["k"], r["s"], r["moment"], r["psi"],
                     r["normalized_ratio"]) for r in rep["rows"]]
            _emit(cfg, {"rows": rep["rows"],
                        "bounded": {str(k): v for k, v in rep["bounded"].items()}},
                  {"timings": {"s": time.time() - t0}},
                  "\n".join(str(r[4]) for r in rows),
                  csv_rows=rows,
                  csv_cols=("x", "y", "k", "s", "moment", "psi", "normalized_ratio"))
        else:
            val = circle.moment_exact(pars, d["k"], d["s"][0])
            _emit(cfg, val, {"timings": {"s": time.time() - t0}}, val)

    elif cfg.subcommand == "scan-minor":
        pars = core.FriableParams(d["x"], d["y"])
        sweep = weyl.minor_arc_sweep(pars, d["k"], d["Q"],
                                     grid_size=d["grid_size"],
                                     keep_rows=cfg.output_format == "csv",
                                     threads=cfg.threads)
        reports = sweep["reports"]
        res = {"sups": {str(r.Q): r.sup_ratio for r in reports},
               "argmax": {str(r.Q): r.argmax_theta for r in reports},
               "c_hat": sweep["c_hat"]}
        rows = []
        for r in reports:
            for theta, q, delta, ratio in r.rows:
                rows.append((r.Q, theta, q, delta, ratio))
        _emit(cfg, res, {"timings": {"s": time.time() - t0}},
              reports[0].sup_ratio if reports else 0.0,
              csv_rows=rows,
              csv_cols=("Q", "theta", "q", "delta", "abs_E_over_psi"))

    elif cfg.subcommand == "verify":
        ok = run_verify_suites(d["suite"], cfg.seed)
        return 0 if ok else 1

    return 0


def run_verify_suites(suite: str, seed: int) -> bool:
    """Exact-identity self-tests; prints one pass/fail line per check."""
    checks: list[tuple[str, bool]] = []

    if suite in ("appendix", "all"):
        ok = True
        for p, m in [(2, 3), (3, 2), (5, 1)]:
            for alpha in (Fraction(1), Fraction(1, 2)):
                for friable in (True, False):
                    ok &= exact.projection_identity_holds(p, m, alpha, friable)
        checks.append(("appendix:projection-identity", ok))
        ok = True
        for p, m in [(2, 3), (3, 2), (5, 2), (7, 1)]:
            for k, s in [(1, 2), (2, 3)]:
                res = exact.divisor_sum_identity(p, m, 1, Fraction(1, 2), True, k, s)
                ok &= res["equal"]
        checks.append(("appendix:divisor-sum-identity", ok))
        ok = True
        for q in (2, 3, 4, 6, 9, 12):
            for a in range(1, q):
                if math.gcd(a, q) != 1:
                    continue
                for k in (1, 2):
                    lhs = weyl.h_aq(a, q, 0.8, 50.0, k)
                    rhs = localfactors.s_xy_qa(q, a, 0.8, 50.0, k)
                    ok &= abs(lhs - rhs) <= 1e-9
        checks.append(("appendix:h-equals-weighted-sum", ok))

    if suite in ("moments", "all"):
        ok = True
        for x, y, k, s in [(20, 5, 1, 2), (30, 30, 2, 2), (12, 3, 3, 2)]:
            pars = core.FriableParams(x, y)
            mom = circle.moment_exact(pars, k, s)
            ns = core.enumerate_friable(pars)
            vals = [int(n) ** k for n in ns]
            from collections import Counter

            sums = Counter()
            for v1 in vals:
                for v2 in vals:
                    sums[v1 + v2] += 1
            ok &= mom == sum(c * c for c in sums.values())
        checks.append(("moments:convolution-vs-loop", ok))
        ok = True
        for N, k, s, x in [(10, 1, 2, 10), (25, 2, 2, 5), (30, 1, 3, 20)]:
            q = circle.RepresentationQuery(N, k, s, 2.0 if x < 4 else min(x, 5), x)
            ok &= circle.count_exact(q) == circle.representation_count_convolution(q)
        checks.append(("moments:parseval-coefficient", ok))

    if suite in ("erdos-turan", "all"):
        rng = np.random.default_rng(seed)
        ok = True
        for _ in range(200):
            pts = rng.random(int(rng.integers(5, 200)))
            lo = float(rng.random())
            hi = lo + float(rng.random()) * 0.9
            J = int(rng.integers(1, 40))
            _, _, holds = dioph.erdos_turan_check(pts, (lo, hi % 1.0), J)
            ok &= holds
        checks.append(("erdos-turan:random-instances", ok))

    all_ok = True
    for name, ok in checks:
        print(f"{'PASS' if ok else 'FAIL'}  {name}")
        all_ok &= ok
    return all_ok


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        cfg = validate(args)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    try:
        return dispatch(cfg)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (ValueError, ResourceLimitError, NumericError) as e:
        if cfg.output_format == "json":
            print(json.dumps({"error": {"type": type(e).__name__, "message": str(e)}}))
        else:
            print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
