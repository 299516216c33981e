"""Command-line front end.

Exit codes: 0 ok, 2 usage or bad input, 3 infeasible output or a violated
bound, 4 oracle budget exceeded.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
import warnings
from dataclasses import asdict, dataclass
from fractions import Fraction

from . import model
from .aga import scaled_152_pipeline
from .kftra import pk_solve
from .lp import build_primal, lp_optimum, write_lp
from .model import (InstanceError, check_feasible, cost, generate_euclidean, generate_graph_metric,
                    load_instance, load_solution)
from .oracle import BudgetExceeded, exact_ilp
from .primal_dual import apd_solve, pd_solve
from .reduction import reduce_solve
from .ulpr import ulpr_solve

EXIT_USAGE, EXIT_VIOLATION, EXIT_BUDGET = 2, 3, 4
ALGORITHMS = ("ulpr", "pd", "apd", "aga152", "reduce", "pk")
# certified factor per algorithm and whether it needs uniform requirements
BOUNDS = {"ulpr": (4, False), "reduce": (4, False), "pd": (Fraction(161, 100), True),
          "apd": (Fraction(161, 100), True), "aga152": (Fraction(152, 100), True), "pk": (4, True)}
TOL = 1e-6


@dataclass
class RunReport:
    instance_id: str
    algorithm: str
    cost: int
    lp_bound: float
    oracle_cost: int | None
    ratio_lp: float | None
    ratio_oracle: float | None
    wall_time: float
    seed: int | None
    feasibility: str


def _ratio(a, b):
    if b is None:
        return None
    return 1.0 if b == 0 and a == 0 else (float(Fraction(a) / Fraction(b)) if b else float("inf"))


def run_algorithm(inst, alg, seed=0, trace_fh=None):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        if alg == "ulpr":
            return ulpr_solve(inst)
        if alg in ("pd", "apd"):
            sol, trace = (pd_solve if alg == "pd" else apd_solve)(inst)
            if trace_fh is not None:
                trace.dump(trace_fh)
            return sol
        if alg == "aga152":
            return scaled_152_pipeline(inst)
        if alg == "reduce":
            return reduce_solve(inst, ulpr_solve)
        if alg == "pk":
            return pk_solve(inst, seed=seed)
    raise ValueError(f"unknown algorithm {alg}")


def make_report(inst, inst_id, alg, sol, seconds, seed=None, oracle_cost=None):
    bad = check_feasible(inst, sol, enforce_k=(alg == "pk"))
    lp = lp_optimum(inst, with_k=(alg == "pk"))
    c = cost(inst, sol)
    return RunReport(inst_id, alg, c, float(lp), oracle_cost, _ratio(c, lp), _ratio(c, oracle_cost),
                     round(seconds, 6), seed, "ok" if not bad else str(bad[0]))


def _write(path, text):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def cmd_gen(args):
    kw = dict(seed=args.seed, uniform=args.uniform, k=args.k)
    if args.family == "graph":
        inst = generate_graph_metric(args.nf, args.nc, args.rmax, args.Rmax, f_range=(args.fmin, args.fmax),
                                     w_max=args.wmax, **kw)
    else:
        inst = generate_euclidean(args.nf, args.nc, args.rmax, args.Rmax, f_range=(args.fmin, args.fmax),
                                  grid=args.grid, scale=args.scale, **kw)
    _write(args.out, model.instance_to_json(inst))
    if args.out not in (None, "-"):
        print(f"wrote {args.out}: {inst.n_f} sites, {inst.n_c} clients, sum R = {sum(inst.R)}")
    return 0


def cmd_solve(args):
    inst = load_instance(args.instance)
    if args.k is not None:
        inst = inst.with_k(args.k)
    if args.lp_export:
        write_lp(build_primal(inst, with_k=inst.k is not None), args.lp_export)
    if args.verify_only:
        sol = load_solution(args.verify_only)
        bad = check_feasible(inst, sol, enforce_k=inst.k is not None)
        for v in bad:
            print(f"violation: {v}", file=sys.stderr)
        print(json.dumps({"feasible": not bad, "cost": cost(inst, sol) if not bad else None}))
        return EXIT_VIOLATION if bad else 0
    if args.alg == "pk" and inst.k is None:
        print("error: --alg pk needs --k (or k in the instance)", file=sys.stderr)
        return EXIT_USAGE
    seeds = list(range(args.seed, args.seed + args.seeds)) if args.seeds else [args.seed]
    trace_fh = open(args.trace, "w") if args.trace else None
    try:
        reports, sol = [], None
        for s in seeds:
            t0 = time.perf_counter()
            sol = run_algorithm(inst, args.alg, s, trace_fh)
            reports.append(make_report(inst, args.instance, args.alg, sol, time.perf_counter() - t0, s))
    finally:
        if trace_fh:
            trace_fh.close()
    bad = [r for r in reports if r.feasibility != "ok"]
    if bad:
        print(f"error: infeasible output: {bad[0].feasibility}", file=sys.stderr)
        return EXIT_VIOLATION
    if args.out:
        _write(args.out, model.dumps(sol.to_dict(inst)))
    out = [asdict(r) for r in reports]
    if args.seeds and args.seeds > 1:
        costs = [r.cost for r in reports]
        mean = sum(costs) / len(costs)
        summary = {"mean_cost": mean, "min_cost": min(costs), "max_cost": max(costs),
                   "lp_bound": reports[0].lp_bound, "margin_4x": 4 * reports[0].lp_bound - mean}
        print(json.dumps({"runs": out, "summary": summary}, indent=1))
    else:
        print(json.dumps(out, indent=1))
    return 0


def cmd_oracle(args):
    inst = load_instance(args.instance)
    try:
        res = exact_ilp(inst, enforce_k=args.enforce_k, budget=args.budget)
    except BudgetExceeded as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_BUDGET
    if args.out:
        _write(args.out, model.dumps(res.solution.to_dict(inst)))
    print(json.dumps({"cost": res.cost, "nodes": res.nodes, "y": list(res.solution.y)}))
    return 0


def bench_corpus(args):
    for n in range(args.count):
        seed = args.seed + n
        kw = dict(seed=seed, uniform=args.uniform, k="random" if "pk" in args.alg else None)
        if args.family == "graph" or (args.family == "mixed" and n % 2):
            yield f"graph-{seed}", generate_graph_metric(args.nf, args.nc, args.rmax, args.Rmax, **kw)
        else:
            yield f"euclid-{seed}", generate_euclidean(args.nf, args.nc, args.rmax, args.Rmax, **kw)


def _bench_one(job):
    inst_id, inst, algs, use_oracle, seeds = job
    oc = exact_ilp(inst).cost if use_oracle else None
    out = []
    for alg in algs:
        for s in (range(seeds) if alg == "pk" else [None]):
            t0 = time.perf_counter()
            sol = run_algorithm(inst, alg, s or 0)
            out.append(make_report(inst, inst_id, alg, sol, time.perf_counter() - t0, s,
                                   oc if alg != "pk" else None))
    return out


def _violations(reports, uniform_ids):
    msgs = []
    by_alg = {}
    for r in reports:
        by_alg.setdefault(r.algorithm, []).append(r)
        if r.feasibility != "ok":
            msgs.append(f"{r.algorithm} on {r.instance_id}: {r.feasibility}")
    for alg, rs in by_alg.items():
        bound, needs_uniform = BOUNDS[alg]
        groups = {}
        for r in rs:
            groups.setdefault(r.instance_id, []).append(r)
        for inst_id, g in groups.items():
            if needs_uniform and inst_id not in uniform_ids:
                continue
            mean = sum(r.cost for r in g) / len(g)
            if mean > float(bound) * g[0].lp_bound * (1 + TOL) + TOL:
                msgs.append(f"{alg} on {inst_id}: cost {mean} > {float(bound)} x LP {g[0].lp_bound}")
    return msgs


def cmd_bench(args):
    args.alg = args.alg or ["ulpr"]
    corpus = list(bench_corpus(args))
    jobs = [(i, inst, args.alg, args.oracle, args.seeds) for i, inst in corpus]
    try:
        if args.jobs > 1 and jobs:
            from concurrent.futures import ProcessPoolExecutor
            with ProcessPoolExecutor(args.jobs) as ex:
                results = list(ex.map(_bench_one, jobs))
        else:
            results = [_bench_one(j) for j in jobs]
    except BudgetExceeded as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_BUDGET
    reports = [r for rs in results for r in rs]
    # results come back in corpus order; keep that order stable by instance id
    order = {i: n for n, (i, _) in enumerate(corpus)}
    reports.sort(key=lambda r: (order[r.instance_id], args.alg.index(r.algorithm), r.seed or 0))
    print(f"{'algorithm':<8} {'runs':>5} {'max/LP':>8} {'mean/LP':>8} {'max/OPT':>8}")
    for alg in args.alg:
        rs = [r for r in reports if r.algorithm == alg]
        if not rs:
            continue
        ratios = [r.ratio_lp for r in rs]
        ro = [r.ratio_oracle for r in rs if r.ratio_oracle is not None]
        print(f"{alg:<8} {len(rs):>5} {max(ratios):>8.4f} {sum(ratios) / len(ratios):>8.4f} "
              f"{(max(ro) if ro else float('nan')):>8.4f}")
    if args.json:
        _write(args.json, json.dumps([asdict(r) for r in reports], indent=1) + "\n")
    msgs = _violations(reports, {i for i, inst in corpus if inst.uniform})
    for m in msgs:
        print(f"violation: {m}", file=sys.stderr)
    return EXIT_VIOLATION if msgs else 0


def build_parser():
    p = argparse.ArgumentParser(prog="ftra", description="Fault-tolerant resource allocation solvers")
    sub = p.add_subparsers(dest="cmd", required=True)

    g = sub.add_parser("gen", help="generate a random instance")
    g.add_argument("--family", choices=("euclid", "graph"), default="euclid")
    g.add_argument("--nf", type=int, default=5)
    g.add_argument("--nc", type=int, default=5)
    g.add_argument("--rmax", type=int, default=3)
    g.add_argument("--Rmax", type=int, default=3)
    g.add_argument("--fmin", type=int, default=0)
    g.add_argument("--fmax", type=int, default=100)
    g.add_argument("--grid", type=int, default=100)
    g.add_argument("--scale", type=int, default=10)
    g.add_argument("--wmax", type=int, default=3)
    g.add_argument("--uniform", action="store_true")
    g.add_argument("--k", type=int)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", "-o")
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("solve", help="run one algorithm on an instance file")
    s.add_argument("instance")
    s.add_argument("--alg", choices=ALGORITHMS, default="apd")
    s.add_argument("--k", type=int)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--seeds", type=int, help="pk: run this many consecutive seeds and summarize")
    s.add_argument("--trace", help="pd/apd: write the event log as JSON lines")
    s.add_argument("--out", "-o", help="write the solution JSON here")
    s.add_argument("--verify-only", metavar="SOLUTION", help="only check a solution file")
    s.add_argument("--lp-export", metavar="FILE", help="also write the LP relaxation in LP format")
    s.set_defaults(func=cmd_solve)

    o = sub.add_parser("oracle", help="exact optimum by enumeration")
    o.add_argument("instance")
    o.add_argument("--budget", type=int, default=10**7)
    o.add_argument("--enforce-k", action="store_true")
    o.add_argument("--out", "-o")
    o.set_defaults(func=cmd_oracle)

    b = sub.add_parser("bench", help="ratio certification on a generated corpus")
    b.add_argument("--count", type=int, default=20)
    b.add_argument("--family", choices=("euclid", "graph", "mixed"), default="mixed")
    b.add_argument("--nf", type=int, default=6)
    b.add_argument("--nc", type=int, default=6)
    b.add_argument("--rmax", type=int, default=3)
    b.add_argument("--Rmax", type=int, default=3)
    b.add_argument("--uniform", action="store_true")
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--alg", action="append", choices=ALGORITHMS)
    b.add_argument("--oracle", action="store_true")
    b.add_argument("--seeds", type=int, default=10, help="pk seeds per instance")
    b.add_argument("--jobs", type=int, default=1)
    b.add_argument("--json", help="write the RunReport array here")
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InstanceError, FileNotFoundError, json.JSONDecodeError, KeyError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
