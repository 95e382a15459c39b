"""Solve the fractional labeling LP on a bundled tree-labeling instance and sample the
recursive rounding, printing coverage and cost-moment estimates per group.

Run from the repository root: python3 demos/tree_labeling.py
"""
from degnet.instances import load_labeling
from degnet.treelabel import build_supertree, check_fractional, solve_fractional, verify_guarantees
from degnet.verify import data_files

for path in data_files("tl_"):
    inst = load_labeling(path)
    st = build_supertree(inst)
    frac = solve_fractional(st, spread=4, seed=0)
    assert not check_fractional(st, frac)
    rep = verify_guarantees(st, frac, 2000, seed=0)
    print(f"{path.name}: super-tree with {st.size} nodes, depth D={rep.D}")
    for i, (cov, lo, mom) in enumerate(zip(rep.coverage, rep.coverage_lower, rep.exp_moment)):
        print(f"  group {i}: covered {cov:.3f} (99% lower {lo:.3f}, target 1/D={1 / rep.D:.3f}),"
              f" E[exp(s cost)] {mom:.3f} (target {1 + 1 / rep.D:.3f})")
    print(f"  largest marginal z-score {rep.max_marginal_z:.2f}, inconsistent samples {rep.inconsistent}")
