"""Group Steiner tree with degree bounds on a treewidth-2 graph: reduce to tree labeling,
search the cost guess, round M times and report the union.

Run from the repository root: python3 demos/group_steiner.py
"""
from degnet.gst import solve_gst
from degnet.instances import load_decomposition, load_instance
from degnet.oracles import brute_gst
from degnet.verify import data_files

for path in data_files("gst_"):
    inst = load_instance(path)
    td = load_decomposition(path.with_name(path.name[:-5] + "_td.json"))
    prob = inst.gst_problem()
    opt = brute_gst(prob.graph, prob.root, prob.groups, prob.degree_bounds)
    res = solve_gst(prob, td, seed=0)
    print(f"{path.name}: n={len(prob.graph.vertices)}, {len(prob.groups)} groups, optimum {float(opt.value):.2f}")
    print(f"  cost guess C*={float(res.cstar):.2f}, depth {res.depth}, super-tree {res.supertree_size} nodes,"
          f" M={res.reps}")
    print(f"  union: cost {float(res.cost):.2f} (ratio {res.cost_ratio:.2f}), degree ratio {res.degree_ratio:.2f},"
          f" groups connected {sum(res.connected)}/{len(res.connected)}")
