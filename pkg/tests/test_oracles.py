import math
import random
from fractions import Fraction as F

import pytest

from degnet.generators import random_connected_graph, random_label_tree, random_requirements
from degnet.graph import Graph, Requirements, degree_power_sum, degrees, verify_requirements
from degnet.oracles import OracleTooLarge, brute_gst, brute_labeling, brute_snd, consistent_labelings
from degnet.relaxation import ConvexProgramInfeasible, solve_convex_program
from degnet.treelabel import InfeasibleInstance, LabelTreeInstance, build_supertree, solve_fractional


def test_triangle_snd(triangle):
    r = Requirements.uniform(triangle.vertices)
    res = brute_snd(triangle, r, 1, budget=4)
    assert res.value == 2 and res.witness == [0, 1] and res.enumerated == 8


def test_budget_too_small(triangle):
    r = Requirements.uniform(triangle.vertices)
    assert brute_snd(triangle, r, 1, budget=3).value == math.inf
    assert not brute_snd(triangle, r, 2, A=2).feasible


def test_snd_cap():
    g = Graph(range(2), [(i, 0, 1) for i in range(19)])
    with pytest.raises(OracleTooLarge):
        brute_snd(g, Requirements({(0, 1): 1}), 1, budget=100)


@pytest.mark.parametrize("seed", range(8))
def test_snd_witness_and_dominance(seed):
    rng = random.Random(seed)
    n = rng.randint(4, 6)
    g = random_connected_graph(rng, n, rng.randint(n, 9))
    r = random_requirements(rng, n, 2, 1)
    p = rng.randint(1, 3)
    full = degree_power_sum(degrees(g, [e.id for e in g.edges]), p)
    budget = full * F(rng.randint(5, 10), 10)
    opt = brute_snd(g, r, p, budget=budget)
    try:
        sol = solve_convex_program(g, r, p, budget=budget)
    except ConvexProgramInfeasible:
        assert not opt.feasible
        return
    if opt.feasible:
        assert verify_requirements(g, opt.witness, r)
        assert degree_power_sum(degrees(g, opt.witness), p) <= budget
        assert g.cost(opt.witness) == opt.value
        assert sol.objective <= opt.value


def test_unique_labeling():
    inst = LabelTreeInstance("r", {"r": ["a"]}, {"r": ["1", "2"], "a": ["3", "4"]},
                             {"r": [("1", "3"), ("2", "4")]}, [["4"]])
    assert brute_labeling(inst).witness == {"r": "2", "a": "4"}


def test_expensive_labels_are_infeasible():
    inst = LabelTreeInstance("r", {"r": ["a"]}, {"r": ["1"], "a": ["2", "3"]},
                             {"r": [("1", "2"), ("1", "3")]}, [], [{"1": F(2, 3), "2": F(1, 2), "3": F(1, 2)}])
    assert not brute_labeling(inst).feasible


def test_labeling_cap():
    labels = {u: [f"{u}{i}" for i in range(10)] for u in "rab"}
    inst = LabelTreeInstance("r", {"r": ["a", "b"]}, labels)
    with pytest.raises(OracleTooLarge):
        brute_labeling(inst, cap=999)
    assert consistent_labelings(inst) == []


def test_labeling_lp_dominance_on_random_instances():
    rng = random.Random(2024)
    feasible = 0
    for _ in range(200):
        inst, _ = random_label_tree(rng, rng.randint(1, 3), density=rng.choice([0.2, 0.5]),
                                    groups=rng.randint(1, 3), cost_types=2)
        scale = rng.choice([1, 2, 4])
        inst.costs = [{l: min(F(1), c * scale) for l, c in t.items()} for t in inst.costs]
        oracle = brute_labeling(inst)
        if oracle.witness is not None:
            assert inst.is_valid(oracle.witness)
        try:
            solve_fractional(build_supertree(inst))
            lp = True
        except InfeasibleInstance:
            lp = False
        if oracle.feasible:
            feasible += 1
            assert lp
    assert 0 < feasible < 200


def test_gst_adjacent_group():
    g = Graph(range(3), [(0, 0, 1), (1, 0, 1), (2, 0, 2)], {0: 5, 1: 2, 2: 1})
    res = brute_gst(g, 0, [[1]], {})
    assert res.value == 2 and res.witness == [1]


def test_gst_zero_root_bound():
    g = Graph(range(3), [(0, 0, 1), (1, 1, 2)])
    assert not brute_gst(g, 0, [[2]], {0: 0}).feasible
    assert brute_gst(g, 0, [], {0: 0}).value == 0


def test_gst_degree_bound_changes_optimum():
    # star centre 0 with groups at 1, 2, 3; a path 1-2-3 costs more but keeps degrees low
    g = Graph(range(4), [(0, 0, 1), (1, 0, 2), (2, 0, 3), (3, 1, 2), (4, 2, 3)],
              {0: 1, 1: 1, 2: 1, 3: 2, 4: 2})
    groups = [[1], [2], [3]]
    assert brute_gst(g, 0, groups, {}).value == 3
    res = brute_gst(g, 0, groups, {0: 1})
    assert res.value == 5 and res.witness == [0, 3, 4]
