"""Command line interface: single runs, benchmark suites, references.

Subcommands
-----------
solve      run one method on one problem, writing a trace CSV and a summary
           JSON into --out (summary also printed to stdout)
bench      run a suite (fig4 | fig5 | highdim); one CSV per method plus a
           combined summary JSON
reference  print the certified reference optimum for a problem

Options may come from a TOML file (--config); command-line flags win.  The
environment variable ``HC_SOLVERS_THREADS`` caps benchmark parallelism.
Trace CSVs are byte-identical across reruns except for the leading ``#``
timestamp comment.

Exit codes: 0 success (and within tolerance when a reference is available),
1 tolerance failure, 2 configuration error, 3 solver error.
"""

from __future__ import annotations

import argparse
import csv
import datetime
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

try:
    import tomllib  # python >= 3.11
except ModuleNotFoundError:  # pragma: no cover - depends on interpreter
    import tomli as tomllib

from . import bench as bench_mod
from .bundle import ada_ls, s_star_bl
from .core import SolveReport, TraceRecord
from .errors import ConfigError, HcSolversError
from .ippm import init_feasible, ippm_run, schedule_nonsmooth, schedule_smooth
from .problems import grid_oracle, make_problem
from .reference import reference_convex, reference_value

METHODS = ("ippm-swsg", "ippm-acgd", "s-starbl", "s-bl-adals", "ref-convex",
           "grid")
PROBLEMS = ("cnls", "cgp2d", "cgp-rand")

_CSV_COLUMNS = ["oracle_calls", "f1", "f2", "penalty", "eta", "iter_kind"]


def _write_trace(path: Path, trace) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(f"# written {datetime.datetime.now().isoformat()}\n")
        writer = csv.writer(fh)
        writer.writerow(_CSV_COLUMNS)
        for rec in trace:
            writer.writerow(rec.as_row())


def _summary(report: SolveReport, seed, f1_star_ref, wall_ms) -> dict:
    gap = None if f1_star_ref is None else report.f1_final - f1_star_ref
    return {
        "method": report.method,
        "problem": report.problem,
        "seed": seed,
        "f1_final": report.f1_final,
        "f2_final": report.f2_final,
        "f1_star_ref": f1_star_ref,
        "gap": gap,
        "oracle_calls_total": report.oracle_calls_total,
        "wall_ms": wall_ms,
    }


def _load_config(args) -> dict:
    cfg = {}
    if args.config:
        try:
            with open(args.config, "rb") as fh:
                cfg.update(tomllib.load(fh))
        except (OSError, tomllib.TOMLDecodeError) as exc:
            raise ConfigError(f"bad config file: {exc}") from exc
    for item in args.set or []:
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        key, _, val = item.partition("=")
        try:
            cfg[key] = json.loads(val)
        except json.JSONDecodeError:
            cfg[key] = val
    for key in ("eps", "tau", "budget", "lambda", "eta0", "alpha",
                "t_in", "n_outer", "resolution"):
        flag = getattr(args, key.replace("-", "_"), None)
        if flag is not None:
            cfg[key] = flag
    return cfg


def _run_solve(method, problem_name, seed, cfg) -> SolveReport:
    problem = make_problem(problem_name, seed=seed)
    eps = float(cfg.get("eps", 1e-2))
    tau = float(cfg.get("tau", 1e-2))
    budget = cfg.get("budget")
    budget = None if budget is None else int(budget)
    if method == "grid":
        res = float(cfg.get("resolution", 1e-3))
        x, val = grid_oracle(problem, res, constraint_slack=cfg.get("slack", 0.0),
                             count=True)
        return SolveReport(method="grid", problem=problem.name, x_final=x,
                           f1_final=val, f2_final=problem.peek_f2(x),
                           oracle_calls_total=problem.counter.total,
                           trace=[TraceRecord(problem.counter.total, val,
                                              problem.peek_f2(x), val,
                                              iter_kind="grid")])
    if method == "ref-convex":
        ref = reference_convex(problem, eps=min(eps, 1e-6))
        x = np.asarray(ref["x_star"], dtype=float)
        return SolveReport(method="ref-convex", problem=problem.name,
                           x_final=x, f1_final=ref["f1_star_ref"],
                           f2_final=ref["f2_at_ref"], oracle_calls_total=0,
                           trace=[TraceRecord(0, ref["f1_star_ref"],
                                              ref["f2_at_ref"],
                                              ref["f1_star_ref"],
                                              iter_kind="reference")],
                           extras={"lambda_dual": ref["lambda_dual"],
                                   "gap": ref["gap"]})
    if problem_name == "cgp-rand":
        ref = reference_value(problem, seed=seed, allow_solve=False)
        if ref is None and method in ("s-starbl", "s-bl-adals"):
            ref = reference_value(problem, seed=seed)
        return bench_mod.run_highdim(problem, method, f1_star_ref=ref)
    if method == "ippm-swsg":
        if problem_name == "cnls":
            return bench_mod.run_cnls_ippm_swsg(
                problem, eps=eps, tau=tau,
                n_outer=int(cfg.get("n_outer", 30)),
                t_in=int(cfg.get("t_in", 4000)),
                budget=budget or 2_000_000)
        base = schedule_nonsmooth(problem.meta, eps, tau)
        base = base.with_overrides(n_outer=int(cfg.get("n_outer", 30)),
                                   t_in=int(cfg.get("t_in", 2000)),
                                   budget=budget)
        x0 = init_feasible(problem, problem.domain.center(), tau)
        return ippm_run(problem, x0, base)
    if method == "ippm-acgd":
        base = schedule_smooth(problem.meta, eps, tau)
        base = base.with_overrides(n_outer=int(cfg.get("n_outer", 20)),
                                   t_in=int(cfg.get("t_in", 80)),
                                   budget=budget)
        x0 = init_feasible(problem, problem.domain.center(), tau)
        return ippm_run(problem, x0, base)
    if method == "s-starbl":
        level = cfg.get("f1_star", problem.f1_star)
        if level is None:
            level = reference_value(problem, seed=seed)
        x0 = init_feasible(problem, problem.domain.center(), tau)
        return s_star_bl(problem, x0, float(level),
                         int(cfg.get("t_in", 600)),
                         alpha=float(cfg.get("alpha", 0.3)),
                         tau=float(cfg.get("bundle_tau", 1e-6)),
                         budget=budget, stop_level=0.9 * eps)
    if method == "s-bl-adals":
        x0 = init_feasible(problem, problem.domain.center(), tau)
        return ada_ls(problem, x0, eta0=float(cfg.get("eta0", 0.0)), eps=eps,
                      lam=float(cfg.get("lambda", 1.0)), beta=0.5,
                      alpha=float(cfg.get("alpha", 0.3)),
                      t_steps=int(cfg.get("t_in", 120)),
                      n_epochs=int(cfg.get("n_outer", 14)),
                      tau=float(cfg.get("bundle_tau", 1e-6)), budget=budget)
    raise ConfigError(f"unknown method {method!r}")


def cmd_solve(args) -> int:
    cfg = _load_config(args)
    t0 = time.perf_counter()
    report = _run_solve(args.method, args.problem, args.seed, cfg)
    wall_ms = int(1000 * (time.perf_counter() - t0))
    problem = make_problem(args.problem, seed=args.seed)
    ref = reference_value(problem, seed=args.seed, allow_solve=False)
    summary = _summary(report, args.seed, ref, wall_ms)
    out = Path(args.out) if args.out else None
    if out:
        _write_trace(out / f"{args.problem}_{args.method}.csv", report.trace)
        with open(out / f"{args.problem}_{args.method}.json", "w") as fh:
            json.dump(summary, fh, indent=2)
            fh.write("\n")
    print(json.dumps(summary, indent=2))
    eps = float(cfg.get("eps", 1e-2))
    tau = float(cfg.get("tau", 1e-2))
    if ref is not None and args.method not in ("ref-convex", "grid"):
        if summary["gap"] > eps or summary["f2_final"] > tau:
            return 1
    return 0


def cmd_bench(args) -> int:
    if args.suite not in bench_mod.SUITES:
        raise ConfigError(f"unknown suite {args.suite!r}")
    prob_name, methods = bench_mod.SUITES[args.suite]
    out = Path(args.out)
    threads = max(1, int(os.environ.get("HC_SOLVERS_THREADS", "1")))

    def one(method):
        t0 = time.perf_counter()
        rep = bench_mod.run_suite_method(args.suite, method, seed=args.seed)
        wall = int(1000 * (time.perf_counter() - t0))
        return method, rep, wall

    results = []
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(one, methods))
    else:
        results = [one(m) for m in methods]

    problem = make_problem(prob_name, seed=args.seed)
    ref = reference_value(problem, seed=args.seed, allow_solve=False)
    summaries = []
    for method, rep, wall in results:
        _write_trace(out / f"{args.suite}_{method}.csv", rep.trace)
        summaries.append(_summary(rep, args.seed, ref, wall))
    with open(out / f"{args.suite}_summary.json", "w") as fh:
        json.dump(summaries, fh, indent=2)
        fh.write("\n")
    print(json.dumps(summaries, indent=2))
    return 0


def cmd_reference(args) -> int:
    problem = make_problem(args.problem, seed=args.seed)
    val = reference_value(problem, seed=args.seed)
    print(json.dumps({"problem": args.problem, "seed": args.seed,
                      "f1_star_ref": val}, indent=2))
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hcsolve")
    sub = ap.add_subparsers(dest="command", required=True)

    sv = sub.add_parser("solve", help="run one method on one problem")
    sv.add_argument("--method", required=True, choices=METHODS)
    sv.add_argument("--problem", required=True, choices=PROBLEMS)
    sv.add_argument("--seed", type=int, default=42)
    sv.add_argument("--eps", type=float)
    sv.add_argument("--tau", type=float)
    sv.add_argument("--budget", type=int)
    sv.add_argument("--eta0", type=float)
    sv.add_argument("--alpha", type=float)
    sv.add_argument("--t-in", type=int, dest="t_in")
    sv.add_argument("--n-outer", type=int, dest="n_outer")
    sv.add_argument("--resolution", type=float)
    sv.add_argument("--lambda", type=float, dest="lambda_")
    sv.add_argument("--config")
    sv.add_argument("--set", action="append")
    sv.add_argument("--out")
    sv.set_defaults(func=cmd_solve)

    bn = sub.add_parser("bench", help="run a benchmark suite")
    bn.add_argument("suite", choices=sorted(bench_mod.SUITES))
    bn.add_argument("--seed", type=int, default=42)
    bn.add_argument("--out", required=True)
    bn.set_defaults(func=cmd_bench)

    rf = sub.add_parser("reference", help="print a certified reference value")
    rf.add_argument("--problem", required=True, choices=PROBLEMS)
    rf.add_argument("--seed", type=int, default=42)
    rf.set_defaults(func=cmd_reference)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if getattr(args, "lambda_", None) is not None:
        setattr(args, "lambda", args.lambda_)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except HcSolversError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
