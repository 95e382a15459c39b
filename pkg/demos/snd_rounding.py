"""Relax a bundled degree-bounded network design instance, round it a few hundred times
and compare the outcome with the brute-force optimum.

Run from the repository root: python3 demos/snd_rounding.py
"""
from fractions import Fraction

from degnet.experiments import snd_runs, snd_summary
from degnet.instances import load_instance
from degnet.oracles import brute_snd
from degnet.relaxation import GoodPolytope, solve_convex_program
from degnet.verify import data_files

path = data_files("snd_")[2]
inst = load_instance(path)
g, r = inst.graph, inst.requirements
poly = GoodPolytope(g, r, inst.mode)
sol = solve_convex_program(g, r, inst.p, budget=inst.power_budget(), polytope=poly)
print(f"{path.name}: {len(g.vertices)} vertices, {len(g.edges)} edges, p={inst.p}")
print(f"relaxation value {float(sol.objective):.3f} after {sol.cuts} cuts")
fractional = {e: v for e, v in sol.x.items() if 0 < v < 1}
print(f"fractional edges: {len(fractional)} of {len(g.edges)}")

opt = brute_snd(g, r, inst.p, budget=inst.power_budget())
print(f"brute-force optimum {float(opt.value):.3f}")

runs = snd_runs(g, r, inst.mode, sol.x, 300, seed=1, p=inst.p)
s = snd_summary(g, sol.x, inst.p, sol.budget, poly.alpha, poly.beta, runs, sol.eps)
print(f"300 runs: {s['infeasible_outputs']} infeasible, {s['certificate_violations']} degree certificate failures")
print(f"mean cost {s['cost']['mean']:.3f} against alpha * c.x = {s['cost_bound']:.3f}")
print(f"mean sum of d^p {s['moment']['mean']:.2f} against {s['moment_bound']:.2f}")
best = min(Fraction(run.cost) for run in runs)
print(f"cheapest rounded subgraph {float(best):.3f}")
