"""``degnet`` command line: relax, round, label, reduce, brute-force and verify."""
from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .experiments import run_records, snd_runs, snd_summary, summary_line
from .graph import id_key
from .gst import DecompositionInvalid, default_reps, prepare, run_reduction, search_cstar
from .instances import (InstanceError, fraction_text, load_decomposition, load_instance, load_labeling,
                        to_fraction)
from .oracles import OracleTooLarge, brute_gst, brute_labeling, brute_snd
from .relaxation import SND, SPANNING_TREE, ConvexProgramInfeasible, GoodPolytope, solve_convex_program
from .treelabel import (InfeasibleInstance, SuperTreeTooLarge, build_supertree, check_fractional,
                        solve_fractional, verify_guarantees)

EXIT_OK = 0
EXIT_INVARIANT = 1
EXIT_INPUT = 2
EXIT_INFEASIBLE = 3


def _encode(value):
    if isinstance(value, Fraction):
        return fraction_text(value)
    if isinstance(value, (set, frozenset)):
        return sorted(value, key=id_key)
    if hasattr(value, "_asdict"):
        return value._asdict()
    if hasattr(value, "__dict__"):
        return {k: v for k, v in vars(value).items() if not k.startswith("_")}
    raise TypeError(f"cannot encode {type(value).__name__}")


def _clean(value):
    """Replace non-finite floats, which JSON cannot carry, by strings."""
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    if isinstance(value, dict):
        return {str(k): _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    return value


def report_text(report: dict) -> str:
    return json.dumps(_clean(json.loads(json.dumps(report, default=_encode))), indent=2, sort_keys=True) + "\n"


def _config(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "out")}


def _table(lines: list[dict]) -> str:
    rows = []
    for line in lines:
        mark = "PASS" if line["ok"] else "FAIL"
        kind = line.get("kind", "hard")
        rows.append(f"{mark}  [{kind}] {line['check']}: measured {_short(line['measured'])}, "
                    f"bound {_short(line['bound'])}  ({line['invariant']})")
    return "\n".join(rows)


def _short(value):
    if isinstance(value, float):
        return f"{value:.6g}"
    return value


def _finish(args, command: str, result: dict, lines: list[dict]) -> int:
    report = {"command": command, "config": _config(args), "seed": getattr(args, "seed", None),
              "version": __version__, "lines": lines, "result": result}
    text = report_text(report)
    if args.out:
        Path(args.out).write_text(text)
    if lines:
        print(_table(lines))
    hard_ok = all(line["ok"] for line in lines if line.get("kind", "hard") == "hard")
    print("all hard invariants held" if hard_ok else "HARD INVARIANT FAILED")
    return EXIT_OK if hard_ok else EXIT_INVARIANT


def _hard(name, ok, measured, bound, invariant):
    out = summary_line(name, ok, measured, bound, invariant)
    out["kind"] = "hard"
    return out


def _stat(name, ok, measured, bound, invariant):
    out = summary_line(name, ok, measured, bound, invariant)
    out["kind"] = "statistical"
    return out


# -- subcommands -----------------------------------------------------------------------------


def _relax(args):
    inst = load_instance(args.instance)
    mode = args.mode or inst.mode
    poly = GoodPolytope(inst.graph, inst.requirements, mode)
    sol = solve_convex_program(inst.graph, inst.requirements, inst.p, budget=inst.power_budget(),
                               eps=to_fraction(args.eps), polytope=poly)
    return inst, poly, sol


def cmd_snd_relax(args) -> int:
    inst, poly, sol = _relax(args)
    if args.dump_lp:
        Path(args.dump_lp).write_text(sol.lp.dump() + "\n")
    result = {"x": {str(e): v for e, v in sol.x.items()}, "objective": sol.objective,
              "degree_cost": sol.degree_cost, "budget": sol.budget, "rounds": sol.rounds, "cuts": sol.cuts,
              "mode": poly.mode}
    lines = [
        _hard("point in polytope", poly.contains(sol.x), True, True, "x lies in the good polytope"),
        _hard("degree cost", sol.degree_cost <= (1 + sol.eps) * sol.budget, float(sol.degree_cost),
              float((1 + sol.eps) * sol.budget), "sum_v f(x(delta(v))) <= (1+eps) A^p"),
    ]
    print(f"objective {float(sol.objective):.6g} (exact {fraction_text(sol.objective)}), "
          f"degree cost {float(sol.degree_cost):.6g} of budget {float(sol.budget):.6g}")
    return _finish(args, "snd-relax", result, lines)


def cmd_snd_round(args) -> int:
    inst, poly, sol = _relax(args)
    fallback = args.fallback_beta
    runs = snd_runs(inst.graph, inst.requirements, poly.mode, sol.x, args.runs, args.seed, inst.p,
                    fallback_beta=fallback)
    s = snd_summary(inst.graph, sol.x, inst.p, sol.budget, poly.alpha, poly.beta, runs, sol.eps)
    lines = [
        _hard("rounding aborts", s["integrality_violations"] == 0, s["integrality_violations"], 0,
              "every fractional extreme point has a ROUND or RELAX event"),
        _hard("requirements met", s["infeasible_outputs"] == 0, s["infeasible_outputs"], 0,
              "every rounded subgraph satisfies the connectivity requirements"),
        _hard("degree certificates", s["certificate_violations"] == 0, s["certificate_violations"], 0,
              "deg(v) <= alpha x0(delta(v)) + beta (alpha + beta below 1)"),
    ]
    if fallback is not None:
        lines.append(_stat(f"certificates at beta={poly.beta}", s["strict_certificate_violations"] == 0,
                           s["strict_certificate_violations"], 0, "certificates without the fallback slack"))
    if "cost" in s:
        lines.append(_stat("mean cost", s["cost"]["ok"], s["cost"]["mean"], s["cost"]["bound"] + s["cost"]["slack"],
                           "E[c(H)] <= alpha c.x0 (+3 sigma)"))
        lines.append(_stat("mean degree power sum", s["moment"]["ok"], s["moment"]["mean"],
                           s["moment"]["bound"] + s["moment"]["slack"],
                           "E[sum d^p] <= alpha (alpha+beta)^(p-1) (1+eps) A^p (+3 sigma)"))
    result = {"x0": {str(e): v for e, v in sol.x.items()}, "summary": s, "runs": run_records(runs),
              "alpha": poly.alpha, "beta": poly.beta, "mode": poly.mode}
    return _finish(args, "snd-round", result, lines)


def cmd_treelabel(args) -> int:
    inst = load_labeling(args.instance)
    st = build_supertree(inst, args.max_nodes)
    frac = solve_fractional(st, spread=args.spread, seed=args.seed)
    bad = check_fractional(st, frac)
    rep = verify_guarantees(st, frac, args.trials, seed=args.seed)
    lines = [
        _hard("fractional point satisfies every row", not bad, len(bad), 0, "flow, packing and cost rows"),
        _hard("sampled subtrees consistent", rep.inconsistent == 0, rep.inconsistent, 0,
              "every rounding output is a consistent subtree"),
        _hard("alpha table", rep.alpha_ok, rep.alpha_ok, True, "alpha_h <= 1 + 1/(2D-h)"),
        _stat("coverage", rep.coverage_ok(0.02), min(rep.coverage_lower, default=1.0), 1 / rep.D - 0.02,
              "99% lower bound of Pr[group covered] >= 1/D - 0.02"),
        _stat("exponential cost moment", rep.moment_ok(), max(rep.exp_moment, default=0.0), 1 + 1 / rep.D,
              "E[exp(s cost_i)] <= 1 + 1/D (+99% CI)"),
        _stat("node marginals", rep.marginals_ok(), rep.max_marginal_z, 4.0, "Pr[p sampled] = x_p within 4 sigma"),
    ]
    result = {"supertree_size": st.size, "depth": rep.D, "lp_rows": frac.rows, "lp_cuts": frac.cuts,
              "coverage": rep.coverage, "coverage_lower": rep.coverage_lower, "exp_moment": rep.exp_moment,
              "exp_half_width": rep.exp_half_width, "max_marginal_z": rep.max_marginal_z}
    return _finish(args, "treelabel", result, lines)


def cmd_gst(args) -> int:
    inst = load_instance(args.instance)
    td = load_decomposition(args.decomposition)
    prob = inst.gst_problem()
    if args.cstar is not None:
        cstar = to_fraction(args.cstar)
        red, st, frac = prepare(prob, td, cstar, spread=args.spread, seed=args.seed)
    else:
        cstar, (red, st, frac) = search_cstar(prob, td, args.grid)
    reps = args.reps or default_reps(red.td.depth, len(prob.graph.vertices))
    res = run_reduction(red, st, frac, reps, seed=args.seed)
    lines = [
        _hard("partitions of sampled labelings", res.partition_failures == 0, res.partition_failures, 0,
              "labels equal recomputed down/up partitions"),
        _hard("covered groups are connected", res.cover_mismatches == 0, res.cover_mismatches, 0,
              "a covered group reaches the root in the run's subgraph"),
        _stat("all groups connected", res.all_connected, sum(res.connected), len(res.connected),
              f"union of M={reps} runs connects every group"),
        _stat("cost ratio", res.cost_ratio <= 4 * reps, res.cost_ratio, 4 * reps, "c(H)/C* <= 4M"),
        _stat("degree ratio", res.degree_ratio <= 4 * reps, res.degree_ratio, 4 * reps, "max d_H(v)/db_v <= 4M"),
    ]
    result = {"edges": sorted(res.edges, key=id_key), "cstar": cstar, "reps": reps, "cost": res.cost,
              "cost_ratio": res.cost_ratio, "degree_ratio": res.degree_ratio, "connected": res.connected,
              "supertree_size": res.supertree_size, "label_counts": res.label_counts, "runs": res.runs}
    return _finish(args, "gst", result, lines)


def cmd_oracle(args) -> int:
    if args.problem == "tl":
        res = brute_labeling(load_labeling(args.instance))
        witness = res.witness
    else:
        inst = load_instance(args.instance)
        if args.problem == "snd":
            res = brute_snd(inst.graph, inst.requirements, inst.p, budget=inst.power_budget())
        else:
            prob = inst.gst_problem()
            res = brute_gst(prob.graph, prob.root, prob.groups, prob.degree_bounds)
        witness = res.witness
    result = {"value": res.value if res.feasible else "inf", "witness": witness, "enumerated": res.enumerated,
              "feasible": res.feasible}
    print(f"{args.problem} oracle: value {fraction_text(res.value) if res.feasible else 'infeasible'} "
          f"after {res.enumerated} candidates")
    code = _finish(args, f"oracle {args.problem}", result, [])
    return code if res.feasible else EXIT_INFEASIBLE


def cmd_verify(args) -> int:
    from .verify import run_suite
    lines = run_suite(args.suite, args.seed)
    return _finish(args, "verify", {"suite": args.suite}, lines)


# -- argument parsing ------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="degnet", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, instance=True):
        if instance:
            p.add_argument("--instance", required=True, help="instance JSON file")
        p.add_argument("--seed", type=int, default=0, help="master seed")
        p.add_argument("--out", help="write the JSON report here")

    p = sub.add_parser("snd-relax", help="solve the degree-constrained convex relaxation")
    common(p)
    p.add_argument("--eps", default="1/1000000", help="relative tolerance on the degree budget")
    p.add_argument("--mode", choices=[SND, SPANNING_TREE], help="override the instance's polytope")
    p.add_argument("--dump-lp", metavar="PATH", help="write the final linear program in text form")
    p.set_defaults(func=cmd_snd_relax)

    p = sub.add_parser("snd-round", help="relax, then round repeatedly")
    common(p)
    p.add_argument("--runs", type=int, default=100)
    p.add_argument("--eps", default="1/1000000")
    p.add_argument("--mode", choices=[SND, SPANNING_TREE])
    p.add_argument("--fallback-beta", type=int, default=None,
                   help="retry RELAX with this support slack instead of aborting")
    p.set_defaults(func=cmd_snd_round)

    p = sub.add_parser("treelabel", help="fractional labeling and recursive rounding")
    common(p)
    p.add_argument("--trials", type=int, default=2000)
    p.add_argument("--spread", type=int, default=4, help="average this many extra LP vertices")
    p.add_argument("--max-nodes", type=int, default=200_000)
    p.set_defaults(func=cmd_treelabel)

    p = sub.add_parser("gst", help="group Steiner tree through the labeling reduction")
    common(p)
    p.add_argument("--decomposition", required=True, help="tree decomposition JSON file")
    p.add_argument("--reps", type=int, default=None, help="rounding repetitions (default ceil(4 D ln n))")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--cstar", help="use this cost guess instead of searching")
    group.add_argument("--grid", type=float, default=0.1, help="geometric step of the cost guesses")
    p.add_argument("--spread", type=int, default=0)
    p.set_defaults(func=cmd_gst)

    p = sub.add_parser("oracle", help="brute-force optimum")
    p.add_argument("problem", choices=["snd", "tl", "gst"])
    common(p)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("verify", help="run the verification suite on the bundled instances")
    common(p, instance=False)
    p.add_argument("--suite", choices=["all", "snd", "tl", "gst"], default="all")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InstanceError, DecompositionInvalid, OracleTooLarge, SuperTreeTooLarge, ValueError) as err:
        print(f"degnet: error: {err}", file=sys.stderr)
        return EXIT_INPUT
    except (ConvexProgramInfeasible, InfeasibleInstance) as err:
        print(f"degnet: infeasible: {err}", file=sys.stderr)
        return EXIT_INFEASIBLE


if __name__ == "__main__":
    sys.exit(main())
