"""Ensembles of rounding runs and their summary statistics."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Mapping

from .graph import Graph, Requirements, degree_power_sum, degrees
from .relaxation import GoodPolytope
from .rounding import IntegralityViolation, RoundingEngine, degree_certificates
from .stats import parallel_map, thread_count, trial_rng, upper_bound_check


@dataclass
class SNDRun:
    run: int
    cost: str
    degrees: list
    iterations: int
    rounds: int
    relaxes: int
    fallbacks: int
    feasible: bool
    certificate_ok: bool        # at the polytope's (alpha, beta)
    strict_certificate_ok: bool  # at (alpha, beta) with the fallback slack ignored
    power_sum: int
    error: str = ""


def _snd_chunk(job) -> list[SNDRun]:
    g, r, mode, x0, fallback_beta, seed, stream, runs = job
    poly = GoodPolytope(g, r, mode)
    engine = RoundingEngine(poly, fallback_beta=fallback_beta)
    out = []
    for run in runs:
        try:
            res = engine.run(x0, trial_rng(seed, run, stream), record=False)
        except IntegralityViolation as err:
            out.append(SNDRun(run, "inf", [], 0, 0, 0, 0, False, False, False, 0, str(err)))
            continue
        edges = sorted(res.edges, key=lambda e: g.index[e])
        deg = degrees(g, edges)
        beta = fallback_beta if (fallback_beta is not None and res.fallbacks) else poly.beta
        certs = degree_certificates(g, x0, edges, poly.alpha, beta)
        strict = degree_certificates(g, x0, edges, poly.alpha, poly.beta)
        out.append(SNDRun(
            run=run, cost=str(g.cost(edges)), degrees=[deg[v] for v in g.vertices],
            iterations=res.iterations,
            rounds=sum(1 for e in res.events if e.kind == "round"),
            relaxes=sum(1 for e in res.events if e.kind == "relax"),
            fallbacks=res.fallbacks, feasible=poly.integral_ok(edges),
            certificate_ok=all(c.ok for c in certs), strict_certificate_ok=all(c.ok for c in strict),
            power_sum=0))
    return out


def snd_runs(g: Graph, r: Requirements | None, mode: str, x0: Mapping, runs: int, seed: int,
             p: int, stream: int = 0, fallback_beta=None, workers: int | None = None) -> list[SNDRun]:
    """``runs`` independent rounding runs from ``x0``; run ``i`` uses ``trial_rng(seed, i, stream)``.

    The result does not depend on the number of worker processes.
    """
    workers = thread_count() if workers is None else workers
    chunks = max(1, min(runs, 4 * workers)) if workers > 1 else 1
    bounds = [runs * k // chunks for k in range(chunks + 1)]
    jobs = [(g, r, mode, dict(x0), fallback_beta, seed, stream, range(bounds[k], bounds[k + 1]))
            for k in range(chunks)]
    out = [run for chunk in parallel_map(_snd_chunk, jobs, workers) for run in chunk]
    for run in out:
        run.power_sum = int(degree_power_sum(dict(enumerate(run.degrees)), p)) if run.degrees else 0
    return out


def snd_summary(g: Graph, x0: Mapping, p: int, budget, alpha, beta, runs: list[SNDRun],
                eps=Fraction(1, 10 ** 6), k_sigma: float = 3.0) -> dict:
    """Bound lines for an ensemble: feasibility, certificates, mean cost and mean degree power sum."""
    done = [r for r in runs if not r.error]
    lp_cost = sum((g.costs[e] * Fraction(x0[e]) for e in x0), Fraction(0))
    cost_bound = alpha * lp_cost
    moment_bound = alpha * (alpha + beta) ** (p - 1) * (1 + Fraction(eps)) * Fraction(budget)
    costs = [float(Fraction(r.cost)) for r in done]
    powers = [r.power_sum for r in done]
    out = {
        "runs": len(runs),
        "integrality_violations": len(runs) - len(done),
        "infeasible_outputs": sum(1 for r in done if not r.feasible),
        "certificate_violations": sum(1 for r in done if not r.certificate_ok),
        "strict_certificate_violations": sum(1 for r in done if not r.strict_certificate_ok),
        "runs_with_fallback": sum(1 for r in done if r.fallbacks),
        "lp_cost": str(lp_cost),
        "cost_bound": float(cost_bound),
        "moment_bound": float(moment_bound),
    }
    if done:
        out["cost"] = upper_bound_check(costs, float(cost_bound), k_sigma)
        out["moment"] = upper_bound_check(powers, float(moment_bound), k_sigma)
        out["max_iterations"] = max(r.iterations for r in done)
    return out


def run_records(runs: list[SNDRun]) -> list[dict]:
    return [asdict(r) for r in runs]


def summary_line(name: str, ok: bool, measured, bound, invariant: str) -> dict:
    """One pass/fail line of a report."""
    if isinstance(measured, float) and not math.isfinite(measured):
        measured = str(measured)
    return {"check": name, "ok": bool(ok), "measured": measured, "bound": bound, "invariant": invariant}
