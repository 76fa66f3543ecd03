"""Command line entry point: solve, oracle, verify, generate, bench.

Exit codes: 0 success, 1 input error, 2 a solver's resilience promise
visibly failed (not-resilient / no usable cover), 3 the falsifier found a
counterexample.  One command per invocation; output files are written via
temp-and-rename so a crash never leaves a partial file.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from math import comb

from . import kci
from .analysis import check_structure, find_cluster_capturing_centers
from .core import (Instance, InstanceViolation, StabilityParams, cost,
                   epsilon_distance)
from .generators import (ConstructionCheckFailed, InfeasibleParams,
                         RejectionBudgetExceeded, gen_bad_center_18,
                         gen_eps_padding, gen_from_dominating_set,
                         gen_planted_asymmetric, gen_planted_symmetric,
                         gen_random_metric, named_graph)
from .oracle import (DEFAULT_SUBSET_BUDGET, BudgetExceeded,
                     brute_force_optimal, falsify_resilience)
from .solvers import (SOLVERS, NoCandidateWorks, NeedsMoreCenters,
                      SolverBudgetExceeded, VerifierStuck, sweep_radius)

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_PROMISE = 2
EXIT_FALSIFIED = 3


class _InputError(Exception):
    pass


def _read_instance(path, slack=0.0):
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as e:
        raise _InputError(f"cannot read {path}: {e}")
    try:
        return kci.parse_instance(text, slack=slack)
    except (kci.KciFormatError, InstanceViolation) as e:
        raise _InputError(f"{path}: {e}")


def _read_clustering(path):
    try:
        with open(path) as fh:
            return kci.parse_clustering(fh.read())
    except (OSError, ValueError, KeyError) as e:
        raise _InputError(f"cannot read clustering {path}: {e}")


def cmd_solve(args):
    instance = _read_instance(args.input, slack=args.slack)
    if args.algo not in SOLVERS:
        raise _InputError(f"unknown solver {args.algo!r}; "
                          f"known: {', '.join(sorted(SOLVERS))}")
    entry = SOLVERS[args.algo]
    fn = entry["fn"]
    chosen_r = args.r
    try:
        if entry["needs_r"] and args.r is None:
            outcome, chosen_r = sweep_radius(
                instance, args.k,
                lambda inst, k, r: fn(inst, k, r, args.epsilon))
        else:
            outcome = fn(instance, args.k, chosen_r, args.epsilon)
    except NoCandidateWorks:
        print("status not-resilient (no candidate radius works)")
        return EXIT_PROMISE
    except (NeedsMoreCenters, VerifierStuck, SolverBudgetExceeded) as e:
        print(f"status not-resilient ({e})")
        return EXIT_PROMISE
    if not outcome.ok or outcome.clustering is None:
        print(f"status {outcome.status}")
        return EXIT_PROMISE
    if chosen_r is not None:
        print(f"r {chosen_r!r}")
    print(f"radius {outcome.clustering.radius!r}")
    print(f"status {outcome.status}")
    out = args.out or args.input + ".clustering.json"
    kci.write_atomic(out, kci.emit_clustering(outcome.clustering))
    return EXIT_OK


def cmd_oracle(args):
    instance = _read_instance(args.input, slack=args.slack)
    try:
        res = brute_force_optimal(instance.dist, args.k, budget=args.budget)
    except BudgetExceeded as e:
        raise _InputError(str(e))
    print(f"radius {res.optimal_radius!r}")
    print(f"optimal-center-sets {len(res.optimal_center_sets)}")
    print(f"partition-unique {'true' if res.partition_unique else 'false'}")
    if args.out:
        kci.write_atomic(args.out,
                         kci.emit_clustering(res.clustering(instance.dist)))
    return EXIT_OK


def cmd_verify(args):
    instance = _read_instance(args.instance, slack=args.slack)
    truth = _read_clustering(args.truth)
    if truth.n != instance.n:
        raise _InputError(f"truth has {truth.n} points, instance {instance.n}")
    r_star = args.r if args.r is not None else truth.radius
    params = StabilityParams(alpha=args.alpha, epsilon=args.epsilon)
    structure = check_structure(instance, truth, r_star, alpha=args.alpha)
    ccc = find_cluster_capturing_centers(instance, truth, r_star)
    fals = falsify_resilience(instance, truth.k, params,
                              budget=args.budget, seed=args.seed,
                              oracle_budget=args.oracle_budget)
    report = {
        "r_star": r_star,
        "alpha": args.alpha,
        "epsilon": args.epsilon,
        "structure": kci.to_jsonable(structure),
        "cluster_capturing": kci.to_jsonable(ccc),
        "falsifier": {"status": fals.status, "tried": fals.tried,
                      "opt_unique": fals.opt_unique},
    }
    if fals.status == "falsified":
        report["counterexample"] = {
            "alpha": fals.perturbation.alpha,
            "dprime_kci": kci.emit_instance(
                Instance(instance.mode, fals.perturbation.dprime)),
            "opt_clustering": kci.clustering_to_dict(fals.opt_clustering),
            "violating_clustering": kci.clustering_to_dict(
                fals.violating_clustering),
            "epsilon_distance": fals.eps_dist,
        }
    out = args.out or args.instance + ".report.json"
    kci.write_atomic(out, json.dumps(report, indent=2) + "\n")
    print(f"falsifier {fals.status}")
    return EXIT_FALSIFIED if fals.status == "falsified" else EXIT_OK


def _emit_planted(planted, prefix):
    kci.write_atomic(prefix + ".kci", kci.emit_instance(planted.instance))
    kci.write_atomic(prefix + ".truth.json",
                     kci.emit_clustering(planted.truth))
    kci.write_atomic(prefix + ".guarantee.json",
                     json.dumps(kci.to_jsonable(planted.guarantee), indent=2)
                     + "\n")
    print(f"wrote {prefix}.kci {prefix}.truth.json {prefix}.guarantee.json")


def cmd_generate(args):
    prefix = args.out_prefix or args.family
    try:
        if args.family == "planted-sym":
            planted = gen_planted_symmetric(args.n, args.k, args.r,
                                            args.alpha, args.seed)
            _emit_planted(planted, prefix)
        elif args.family == "planted-asym":
            planted = gen_planted_asymmetric(args.n, args.k, args.r,
                                             args.alpha, args.skew, args.seed)
            _emit_planted(planted, prefix)
        elif args.family == "bad-center-18":
            planted = gen_bad_center_18(args.alpha)
            _emit_planted(planted, prefix)
        elif args.family == "eps-padding":
            if args.base is None:
                raise _InputError("--base is required for eps-padding")
            base = _read_instance(args.base)
            planted = gen_eps_padding(base, args.k, args.alpha, args.epsilon)
            _emit_planted(planted, prefix)
        elif args.family == "dom-set":
            n_vertices, edges = named_graph(args.graph)
            instance = gen_from_dominating_set(n_vertices, edges, args.k)
            kci.write_atomic(prefix + ".kci", kci.emit_instance(instance))
            print(f"wrote {prefix}.kci")
        elif args.family == "random":
            instance = gen_random_metric(args.n, args.mode, args.seed)
            kci.write_atomic(prefix + ".kci", kci.emit_instance(instance))
            print(f"wrote {prefix}.kci")
        else:
            raise _InputError(f"unknown family {args.family!r}")
    except (InfeasibleParams, RejectionBudgetExceeded,
            ConstructionCheckFailed, ValueError) as e:
        raise _InputError(f"generation failed: {e}")
    return EXIT_OK


_BENCH_FAMILIES = ("planted-sym", "planted-asym", "bad-center-18")


def _bench_instance(family, params, seed):
    if family == "planted-sym":
        return gen_planted_symmetric(params["n"], params["k"], params["r"],
                                     params["alpha"], seed)
    if family == "planted-asym":
        return gen_planted_asymmetric(params["n"], params["k"], params["r"],
                                      params["alpha"], params["skew"], seed)
    if family == "bad-center-18":
        return gen_bad_center_18(params["alpha"])
    raise _InputError(f"bench family must be one of {_BENCH_FAMILIES}, "
                      f"got {family!r}")


def _bench_row(row, timing, oracle_budget):
    family = row["family"]
    params = row.get("params", {})
    seed = int(row.get("seed", 0))
    solver_id = row["solver"]
    params_str = ";".join(f"{key}={params[key]}" for key in sorted(params))
    start = time.perf_counter()
    try:
        planted = _bench_instance(family, params, seed)
        instance, truth = planted.instance, planted.truth
        entry = SOLVERS[solver_id]
        fn = entry["fn"]
        epsilon = params.get("epsilon")
        if entry["needs_r"]:
            outcome = fn(instance, truth.k, truth.radius, epsilon)
        else:
            outcome = fn(instance, truth.k, None, epsilon)
        if not outcome.ok or outcome.clustering is None:
            raise RuntimeError(outcome.status)
        eps_dist = epsilon_distance(outcome.clustering, truth)
        if comb(instance.n, truth.k) <= oracle_budget:
            opt = brute_force_optimal(instance.dist, truth.k)
            ratio = (outcome.clustering.radius / opt.optimal_radius
                     if opt.optimal_radius > 0 else 1.0)
            ratio_str = repr(ratio)
        else:
            ratio_str = ""
        status = outcome.status
        eps_str = repr(eps_dist)
    except Exception as e:  # per-row failures go in the CSV, not up the stack
        status = f"error:{type(e).__name__}"
        eps_str = ""
        ratio_str = ""
    wall_ms = (time.perf_counter() - start) * 1000.0
    wall_str = f"{wall_ms:.3f}" if timing else ""
    return (f"{family},{params_str},{seed},{solver_id},"
            f"{eps_str},{ratio_str},{wall_str},{status}")


def cmd_bench(args):
    try:
        with open(args.manifest) as fh:
            manifest = json.load(fh)
    except (OSError, ValueError) as e:
        raise _InputError(f"cannot read manifest {args.manifest}: {e}")
    if not isinstance(manifest, list):
        raise _InputError("manifest must be a JSON list of rows")
    lines = ["family,params,seed,solver,eps_dist,radius_ratio,wall_ms,status"]
    for row in manifest:
        lines.append(_bench_row(row, timing=not args.no_timing,
                                oracle_budget=args.oracle_budget))
    text = "\n".join(lines) + "\n"
    if args.out:
        kci.write_atomic(args.out, text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="kcenter-pr",
        description="k-center clustering under perturbation resilience")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="run a recovery algorithm on a KCI file")
    p.add_argument("input")
    p.add_argument("--algo", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--r", type=float, default=None,
                   help="optimal radius; swept over all distances if absent")
    p.add_argument("--epsilon", type=float, default=None)
    p.add_argument("--slack", type=float, default=0.0)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_solve)

    p = sub.add_parser("oracle", help="brute-force optimal clustering")
    p.add_argument("input")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--budget", type=int, default=DEFAULT_SUBSET_BUDGET)
    p.add_argument("--slack", type=float, default=0.0)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_oracle)

    p = sub.add_parser("verify",
                       help="structure checks + resilience falsifier")
    p.add_argument("instance")
    p.add_argument("truth")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--epsilon", type=float, default=0.0)
    p.add_argument("--r", type=float, default=None,
                   help="optimal radius; defaults to the truth radius")
    p.add_argument("--budget", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--oracle-budget", type=int, default=DEFAULT_SUBSET_BUDGET)
    p.add_argument("--slack", type=float, default=0.0)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("generate", help="seeded instances with planted truth")
    p.add_argument("family", choices=["planted-sym", "planted-asym",
                                      "bad-center-18", "dom-set",
                                      "eps-padding", "random"])
    p.add_argument("--n", type=int, default=12)
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--r", type=float, default=1.0)
    p.add_argument("--alpha", type=float, default=2.0)
    p.add_argument("--skew", type=float, default=1.2)
    p.add_argument("--epsilon", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mode", choices=["symmetric", "asymmetric"],
                   default="symmetric")
    p.add_argument("--graph", default="star5",
                   help="named graph: star<n>, path<n>, cycle<n>, "
                        "complete<n>, empty<n>")
    p.add_argument("--base", default=None,
                   help="base KCI file (eps-padding family)")
    p.add_argument("--out-prefix", default=None)
    p.set_defaults(fn=cmd_generate)

    p = sub.add_parser("bench", help="run a manifest of solver rows to CSV")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", default=None)
    p.add_argument("--no-timing", action="store_true",
                   help="blank the wall_ms column for byte-identical output")
    p.add_argument("--oracle-budget", type=int, default=DEFAULT_SUBSET_BUDGET)
    p.set_defaults(fn=cmd_bench)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except _InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
