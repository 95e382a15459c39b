import itertools
import math
import random
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, strategies as st

from degnet.generators import random_label_tree
from degnet.oracles import brute_labeling, consistent_labelings
from degnet.treelabel import (COPIER, LEAF, SELECTOR, InfeasibleInstance, LabelTreeInstance, SuperTree,
                              SuperTreeTooLarge, alpha_table, alpha_table_ok, build_supertree, check_fractional,
                              recursive_rounding, solve_fractional, verify_guarantees, wilson_interval)
from degnet.stats import trial_rng


def figure_instance(groups=(), costs=()):
    """Root with children a, b; a has children c, d. Tuples starting with 1 at the root
    are (1,4,6), (1,5,6), (1,5,7); tuples starting with 5 at a are (5,9,11), (5,9,12), (5,10,11)."""
    return LabelTreeInstance(
        "r", {"r": ["a", "b"], "a": ["c", "d"]},
        {"r": ["1"], "a": ["4", "5"], "b": ["6", "7"], "c": ["9", "10"], "d": ["11", "12"]},
        {"r": [("1", "4", "6"), ("1", "5", "6"), ("1", "5", "7")],
         "a": [("4", "9", "11"), ("5", "9", "11"), ("5", "9", "12"), ("5", "10", "11")]},
        list(groups), list(costs))


def selector(st_, parent, label):
    return next(q for q in st_.children[parent] if st_.label[q] == label)


def test_figure_selector_has_three_copiers():
    st_ = build_supertree(figure_instance())
    one = selector(st_, 0, "1")
    kids = st_.children[one]
    assert len(kids) == 3 and all(st_.kind[c] == COPIER for c in kids)
    assert sorted(st_.label[c] for c in kids) == [("1", "4", "6"), ("1", "5", "6"), ("1", "5", "7")]
    for c in kids:
        assert len(st_.children[c]) == 2
    five = [q for c in kids for q in st_.children[c] if st_.label[q] == "5"]
    assert all(len(st_.children[q]) == 3 for q in five)


def test_figure_labeling_from_subtree():
    inst = figure_instance()
    st_ = build_supertree(inst)
    labeling = {"r": "1", "a": "5", "b": "7", "c": "9", "d": "12"}
    nodes = st_.to_subtree(labeling)
    assert st_.is_consistent_subtree(nodes)
    assert st_.to_labeling(nodes) == labeling


def test_figure_size_matches_count():
    inst = figure_instance()
    st_ = build_supertree(inst)
    assert st_.size == SuperTree.count_nodes(inst)
    # root, selector 1, three copiers; below them a 4-selector with one copier and two leaves,
    # two 5-selectors with three copiers and six leaves each, and three leaves for b
    assert st_.size == 1 + 1 + 3 + (1 + 1 + 2) + 2 * (1 + 3 + 6) + 3


def test_single_node_tree():
    st_ = build_supertree(LabelTreeInstance("r", {}, {"r": ["a"]}))
    assert st_.size == 2 and st_.kind[1] == LEAF and st_.kind[0] == SELECTOR


def test_complete_gamma_copier_count():
    labels = {"r": ["x", "y"], "v": ["1", "2", "3"], "w": ["4", "5"]}
    gamma = {"r": list(itertools.product(labels["r"], labels["v"], labels["w"]))}
    st_ = build_supertree(LabelTreeInstance("r", {"r": ["v", "w"]}, labels, gamma))
    for q in st_.children[0]:
        assert len(st_.children[q]) == 3 * 2


def test_dead_labels_are_pruned():
    inst = figure_instance()
    # label 10 at c appears only under label 5 at a; label 12 likewise. Label 7 at b needs a = 5.
    st_ = build_supertree(inst)
    assert st_.pruned == 0
    inst2 = LabelTreeInstance("r", {"r": ["a"]}, {"r": ["1", "2"], "a": ["3"]}, {"r": [("1", "3")]})
    assert build_supertree(inst2).pruned == 1


def test_size_cap():
    with pytest.raises(SuperTreeTooLarge):
        build_supertree(figure_instance(), max_nodes=5)


def test_instance_validation():
    with pytest.raises(ValueError):
        LabelTreeInstance("r", {"r": ["a"]}, {"r": ["x"], "a": ["x"]})
    with pytest.raises(ValueError):
        LabelTreeInstance("r", {"r": ["a", "b", "c"]}, {"r": ["1"], "a": ["2"], "b": ["3"], "c": ["4"]})
    with pytest.raises(ValueError):
        LabelTreeInstance("r", {}, {"r": ["1"]}, costs=[{"1": F(3, 2)}])


@pytest.mark.parametrize("seed", range(5))
def test_round_trip_on_every_consistent_labeling(seed):
    inst, _ = random_label_tree(random.Random(seed), 3, density=0.3)
    st_ = build_supertree(inst)
    labelings = consistent_labelings(inst)
    assert labelings
    for lab in labelings:
        nodes = st_.to_subtree(lab)
        assert st_.is_consistent_subtree(nodes)
        assert st_.to_labeling(nodes) == lab
        for i in range(len(inst.costs)):
            assert st_.subtree_cost(nodes, i) == inst.cost(lab, i)
        for t, grp in enumerate(st_.groups):
            assert inst.covers(lab, t) == (not set(grp).isdisjoint(nodes))


def test_unique_labeling_gives_integral_point():
    inst = LabelTreeInstance("r", {"r": ["a", "b"]}, {"r": ["1", "2"], "a": ["3", "4"], "b": ["5"]},
                             {"r": [("1", "3", "5"), ("2", "4", "5")]}, [["3"]])
    assert brute_labeling(inst).witness == {"r": "1", "a": "3", "b": "5"}
    st_ = build_supertree(inst)
    frac = solve_fractional(st_)
    chosen = st_.to_subtree({"r": "1", "a": "3", "b": "5"})
    assert frac.x == [F(1) if p in chosen else F(0) for p in range(st_.size)]
    assert all(recursive_rounding(st_, frac, trial_rng(0, i)) == chosen for i in range(20))


def test_no_constraints_feasible():
    st_ = build_supertree(figure_instance())
    frac = solve_fractional(st_)
    assert not check_fractional(st_, frac)


def test_uncoverable_group_is_infeasible():
    inst = LabelTreeInstance("r", {"r": ["a"]}, {"r": ["1"], "a": ["2", "3"]}, {"r": [("1", "2")]}, [["3"]])
    with pytest.raises(InfeasibleInstance):
        solve_fractional(build_supertree(inst))


def test_cost_rows_make_lp_infeasible():
    inst = figure_instance(groups=[["10"]], costs=[{"5": F(1, 2), "10": F(1, 2), "11": F(1, 2)}])
    assert not brute_labeling(inst).feasible
    with pytest.raises(InfeasibleInstance):
        solve_fractional(build_supertree(inst))


def test_selector_split_frequencies():
    inst = LabelTreeInstance("r", {}, {"r": ["1", "2"]})
    st_ = build_supertree(inst)
    frac = solve_fractional(st_, spread=0)
    frac.x = [F(1), F(1, 2), F(1, 2)]
    n = 10_000
    hits = sum(1 in recursive_rounding(st_, frac, trial_rng(4, i)) for i in range(n))
    assert abs(hits / n - 0.5) <= 0.02


@pytest.mark.parametrize("seed", range(4))
def test_spread_point_satisfies_rows_and_marginals(seed):
    inst, _ = random_label_tree(random.Random(seed), 3, density=0.5, cost_types=2)
    st_ = build_supertree(inst)
    frac = solve_fractional(st_, spread=4, seed=seed)
    assert not check_fractional(st_, frac)
    rep = verify_guarantees(st_, frac, 1000, seed=seed)
    assert rep.inconsistent == 0 and rep.marginals_ok()
    assert rep.coverage_ok(0.02) and rep.moment_ok()


def test_lp_feasible_iff_valid_labeling_exists():
    rng = random.Random(11)
    agree = 0
    for _ in range(60):
        inst, _ = random_label_tree(rng, rng.randint(1, 3), density=0.3, cost_types=2)
        # perturb costs so that some instances become infeasible
        inst.costs = [{l: min(F(1), c * rng.choice([1, 2, 3])) for l, c in t.items()} for t in inst.costs]
        oracle = brute_labeling(inst)
        try:
            solve_fractional(build_supertree(inst))
            lp = True
        except InfeasibleInstance:
            lp = False
        if oracle.feasible:
            assert lp
        agree += lp == oracle.feasible
    assert agree >= 1


def test_alpha_table_examples():
    for D in range(1, 11):
        assert alpha_table(D)[0] == pytest.approx(1 + 1 / (2 * D), rel=1e-15)
        assert alpha_table_ok(D)
    assert alpha_table(1)[1] == pytest.approx(math.exp(0.5), rel=1e-12)
    assert alpha_table(1)[1] <= 2


def test_alpha_table_rejects_large_start():
    assert not all(a <= 1 + 1 / (2 * 3 - h) for h, a in enumerate(alpha_table(3, s=0.5)))


def test_wilson_interval_examples():
    lo, hi = wilson_interval(50, 100)
    assert lo < 0.5 < hi
    assert wilson_interval(0, 0) == (0.0, 1.0)
    assert wilson_interval(100, 100)[1] == pytest.approx(1.0)


@given(st.integers(0, 2 ** 32 - 1))
def test_rounding_output_is_always_consistent(seed):
    inst = figure_instance(groups=[["10", "12"]])
    st_ = build_supertree(inst)
    frac = solve_fractional(st_, spread=3, seed=1)
    nodes = recursive_rounding(st_, frac, np.random.default_rng(seed))
    assert st_.is_consistent_subtree(nodes)
    inst.is_consistent(st_.to_labeling(nodes))
