import math
import random
from fractions import Fraction as F

import pytest

from degnet.generators import random_tw2_gst
from degnet.graph import Graph
from degnet.gst import (BagLabel, DecompositionInvalid, GSTProblem, Reduction, TreeDecomposition,
                        assign_edges_to_bags, cost_candidates, default_reps, prepare, run_reduction, solve_gst,
                        verify_partitions)
from degnet.oracles import brute_gst, consistent_labelings
from degnet.partition import Partition


def path_problem():
    g = Graph(["r", "a", "b"], [(0, "r", "a"), (1, "a", "b")], {0: 2, 1: 3})
    td = TreeDecomposition({0: ["r", "a"], 1: ["a", "b"]}, {1: 0}, 0)
    return GSTProblem(g, "r", [["b"]], {"r": 2, "a": 2, "b": 2}), td


def three_bag_problem():
    g = Graph(range(5), [(0, 0, 1), (1, 0, 2), (2, 1, 2), (3, 1, 3), (4, 2, 3), (5, 2, 4), (6, 3, 4)],
              {0: 2, 1: 3, 2: 1, 3: 2, 4: 4, 5: 1, 6: 2})
    td = TreeDecomposition({0: [0, 1, 2], 1: [1, 2, 3], 2: [2, 3, 4]}, {1: 0, 2: 1}, 0)
    return GSTProblem(g, 0, [[3], [4]], {v: 2 for v in range(5)}), td


def test_edges_go_to_the_highest_bag():
    g = Graph(range(4), [(0, 0, 1), (1, 1, 2), (2, 2, 3)])
    td = TreeDecomposition({"a": [0, 1, 2], "b": [1, 2], "c": [2, 3]}, {"b": "a", "c": "b"}, "a")
    at = assign_edges_to_bags(g, td)
    assert at == {"a": [0, 1], "b": [], "c": [2]}
    assert sum(len(v) for v in at.values()) == len(g.edges)


def test_uncovered_edge_is_rejected():
    g = Graph(range(3), [(0, 0, 1), (1, 0, 2)])
    td = TreeDecomposition({0: [0, 1], 1: [1, 2]}, {1: 0}, 0)
    with pytest.raises(DecompositionInvalid):
        td.validate(g)
    with pytest.raises(DecompositionInvalid):
        assign_edges_to_bags(g, td)


def test_disconnected_vertex_bags_are_rejected():
    g = Graph(range(3), [(0, 0, 1)])
    td = TreeDecomposition({0: [0, 1], 1: [2], 2: [0, 2]}, {1: 0, 2: 1}, 0)
    with pytest.raises(DecompositionInvalid):
        td.validate(g)


def test_binarize_splits_wide_bags():
    td = TreeDecomposition({0: [0], 1: [0, 1], 2: [0, 2], 3: [0, 3], 4: [0, 4]}, {1: 0, 2: 0, 3: 0, 4: 0}, 0)
    b = td.binarized()
    assert all(len(k) <= 2 for k in b.children.values())
    assert len(b.bags) == 7 and b.depth == 3


def test_two_vertex_bag_labels():
    g = Graph(["r", "v"], [(0, "r", "v")], {0: 1})
    td = TreeDecomposition({0: ["r", "v"]}, {}, 0)
    red = Reduction(GSTProblem(g, "r", [["v"]], {}), td, F(1), literal=True)
    labs = red.labels[0]
    assert {lab.forest for lab in labs} == {(), (0,)}
    whole = Partition([["r", "v"]])
    for lab in labs:
        if lab.forest:
            assert lab.down == lab.up == whole
        else:
            # single bag is both root and leaf: both partitions equal CC(F) on the bag
            assert lab.down == lab.up == Partition([["r"], ["v"]])


def test_expensive_forests_are_dropped():
    prob, td = path_problem()
    red = Reduction(prob, td, F(2))
    assert all(1 not in lab.forest for b in red.labels for lab in red.labels[b])
    red3 = Reduction(prob, td, F(3))
    assert any(1 in lab.forest for b in red3.labels for lab in red3.labels[b])


def test_degree_bounds_drop_forests():
    g = Graph(range(3), [(0, 0, 1), (1, 0, 2)])
    td = TreeDecomposition({0: [0, 1, 2]}, {}, 0)
    red = Reduction(GSTProblem(g, 0, [[1], [2]], {0: 1}), td, F(5))
    assert all(len(lab.forest) <= 1 for lab in red.labels[0])


def test_leaf_labels_have_down_equal_to_forest_components():
    prob, td = three_bag_problem()
    red = Reduction(prob, td, F(20), literal=False)
    for b in red.td.bags:
        if not red.td.children[b]:
            for lab in red.labels[b]:
                assert lab.down == red.cc_of(lab.forest).restrict(red.td.bags[b])


def test_constructive_matches_literal():
    prob, td = path_problem()
    lit = Reduction(prob, td, F(5), literal=True)
    con = Reduction(prob, td, F(5))
    assert con.gamma.keys() == lit.gamma.keys()
    for b in con.gamma:
        assert con.gamma[b] <= lit.gamma[b]
    key = lambda lab: sorted((str(b), repr(l)) for b, l in lab.items())
    assert sorted(map(key, consistent_labelings(con.instance))) == sorted(map(key, consistent_labelings(lit.instance)))


def test_all_discrete_tuple_is_allowed():
    prob, td = path_problem()
    red = Reduction(prob, td, F(5), literal=True)
    t = red.td
    lab = {b: BagLabel(b, (), Partition.discrete(t.bags[b]), Partition.discrete(t.bags[b])) for b in t.bags}
    assert red.tuple_ok((lab[0], lab[1]))
    assert verify_partitions(red, lab)


def test_tuple_violating_the_down_rule_is_rejected():
    prob, td = path_problem()
    red = Reduction(prob, td, F(5), literal=True)
    t = red.td
    parent = BagLabel(0, (), Partition([["r", "a"]]), Partition.discrete(t.bags[0]))
    child = BagLabel(1, (), Partition.discrete(t.bags[1]), Partition.discrete(t.bags[1]))
    assert not red.tuple_ok((parent, child))


def test_partitions_on_every_consistent_labeling():
    prob, td = three_bag_problem()
    red = Reduction(prob, td, F(20))
    labelings = consistent_labelings(red.instance)
    assert len(labelings) > 10
    assert all(verify_partitions(red, lab) for lab in labelings)


def test_mutated_partition_fails_partitions():
    prob, td = three_bag_problem()
    red = Reduction(prob, td, F(20))
    labelings = consistent_labelings(red.instance)
    lab = next(l for l in labelings if red.subgraph(l))
    b = red.td.root
    old = lab[b]
    merged = Partition([sorted(red.td.bags[b])])
    wrong = merged if old.up != merged else Partition.discrete(red.td.bags[b])
    bad = dict(lab)
    bad[b] = BagLabel(b, old.forest, old.down, wrong)
    assert not verify_partitions(red, bad)


def test_cost_tables():
    prob, td = three_bag_problem()
    red = Reduction(prob, td, F(3))
    inst = red.instance
    assert len(inst.costs) == 1 + len(prob.graph.vertices)
    full = [l for ls in inst.labels.values() for l in ls if prob.graph.cost(l.forest) == 3]
    assert full and all(inst.costs[0][l] == 1 for l in full)
    assert all(0 <= c <= 1 for t in inst.costs for c in t.values())


def test_covering_label_at_the_root_bag():
    prob, td = path_problem()
    red = Reduction(GSTProblem(prob.graph, "r", [["a"]], {}), td, F(5))
    root_labels = red.labels[red.td.root]
    assert any(red.covers(l, frozenset(["a"])) for l in root_labels if 0 in l.forest)
    assert red.instance.groups[0]


def test_path_example():
    prob, td = path_problem()
    res = solve_gst(prob, td, seed=1)
    assert res.cstar == 5 and res.edges == frozenset({0, 1}) and res.cost == 5
    assert res.all_connected and res.partition_failures == 0


def test_single_edge_example():
    g = Graph(["r", "s"], [(0, "r", "s")], {0: 4})
    td = TreeDecomposition({0: ["r", "s"]}, {}, 0)
    res = solve_gst(GSTProblem(g, "r", [["s"]], {"r": 2, "s": 2}), td)
    assert res.edges == frozenset({0}) and res.cost == 4 and res.cstar == 4


def test_cstar_search_matches_oracle():
    prob, td = three_bag_problem()
    opt = brute_gst(prob.graph, prob.root, prob.groups, prob.degree_bounds)
    res = solve_gst(prob, td, seed=0)
    assert res.cstar <= opt.value


def test_cost_candidates():
    g = Graph(range(3), [(0, 0, 1), (1, 1, 2)], {0: 2, 1: 3})
    assert cost_candidates(g) == [0, 2, 3, 5]
    big = Graph(range(14), [(i, i, i + 1) for i in range(13)], {i: 1 for i in range(13)})
    cands = cost_candidates(big, grid=0.5)
    assert cands[0] == 0 and cands[1] == 1 and cands[-1] == 13
    assert all(b > a for a, b in zip(cands, cands[1:]))


def test_default_reps():
    assert default_reps(0, 1) == math.ceil(4 * math.log(2))
    assert default_reps(3, 10) == math.ceil(12 * math.log(10))


@pytest.mark.parametrize("seed", [0, 1])
def test_random_runs_keep_invariants(seed):
    prob, td = random_tw2_gst(random.Random(seed), 7)
    opt = brute_gst(prob.graph, prob.root, prob.groups, prob.degree_bounds)
    if not opt.feasible:
        pytest.skip("infeasible draw")
    red, st_, frac = prepare(prob, td, opt.value, spread=2, seed=seed)
    res = run_reduction(red, st_, frac, 10, seed)
    assert res.partition_failures == 0 and res.cover_mismatches == 0
