import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from degnet.graph import (Graph, Requirements, connected_components, degree_power_sum, degrees, lp_norm,
                          max_flow, verify_requirements)
from conftest import brute_min_cut


@st.composite
def small_graphs(draw, max_n=6, max_m=9):
    n = draw(st.integers(2, max_n))
    m = draw(st.integers(0, max_m))
    edges = []
    for i in range(m):
        u = draw(st.integers(0, n - 1))
        v = draw(st.integers(0, n - 2))
        if v >= u:
            v += 1
        edges.append((i, u, v))
    costs = {i: draw(st.integers(0, 5)) for i in range(m)}
    return Graph(range(n), edges, costs)


def test_graph_rejects_bad_input():
    with pytest.raises(ValueError):
        Graph([0, 1], [(0, 0, 0)])
    with pytest.raises(ValueError):
        Graph([0, 1], [(0, 0, 2)])
    with pytest.raises(ValueError):
        Graph([0, 1], [(0, 0, 1), (0, 1, 0)])
    with pytest.raises(ValueError):
        Graph([0, 1], [(0, 0, 1)], {0: -1})


def test_parallel_edges_count_twice_in_degree():
    g = Graph([0, 1], [("a", 0, 1), ("b", 0, 1)])
    assert degrees(g, ["a", "b"]) == {0: 2, 1: 2}
    assert max_flow(g, {"a": 1, "b": 1}, 0, 1)[0] == 2


def test_max_flow_single_edge():
    g = Graph(["s", "t"], [(0, "s", "t")])
    value, cut = max_flow(g, {0: 1}, "s", "t")
    assert value == 1
    assert cut == {"s"}


def test_max_flow_disconnected():
    g = Graph(["s", "t", "x"], [(0, "s", "x")])
    assert max_flow(g, {0: 1}, "s", "t")[0] == 0


def test_max_flow_square_opposite_corners(square):
    value, cut = max_flow(square, {e.id: 1 for e in square.edges}, "a", "c")
    assert value == 2 == brute_min_cut(square, {e.id: 1 for e in square.edges}, "a", "c")
    assert "a" in cut and "c" not in cut


def test_max_flow_errors(square):
    with pytest.raises(ValueError):
        max_flow(square, {e.id: 1 for e in square.edges}, "a", "a")
    with pytest.raises((KeyError, ValueError)):
        max_flow(square, {e.id: 1 for e in square.edges}, "a", "zz")


@given(small_graphs(), st.data())
def test_max_flow_matches_cut_enumeration(g, data):
    caps = {e.id: Fraction(data.draw(st.integers(0, 4)), data.draw(st.integers(1, 3))) for e in g.edges}
    s, t = data.draw(st.sampled_from([(a, b) for a in g.vertices for b in g.vertices if a != b]))
    value, cut = max_flow(g, caps, s, t)
    assert value == brute_min_cut(g, caps, s, t)
    assert s in cut and t not in cut
    assert sum((caps[e] for e in g.cut_edges(set(cut))), Fraction(0)) == value


def test_verify_requirements_examples(square):
    k4 = Graph(range(4), [(i, a, b) for i, (a, b) in enumerate([(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)])])
    r = Requirements.uniform(k4.vertices, 1)
    assert verify_requirements(k4, [0, 1, 2], r)          # star spanning tree
    assert not verify_requirements(k4, [3, 4, 5], r)      # vertex 0 isolated
    r2 = Requirements()
    r2.set("a", "c", 2)
    assert verify_requirements(square, [0, 1, 2, 3], r2)
    assert not verify_requirements(square, [0, 1, 2], r2)


def test_requirements_are_symmetric():
    r = Requirements()
    r.set(1, 0, 3)
    assert r.get(0, 1) == r.get(1, 0) == 3
    assert r.cut_requirement({0}) == 3
    with pytest.raises(ValueError):
        r.set(2, 2, 1)


def test_lp_norm_examples():
    assert lp_norm({0: 2, 1: 2, 2: 2}, 1) == 6
    assert lp_norm({0: 3, 1: 4}, 2) == pytest.approx(5)
    assert lp_norm(dict(enumerate([1, 1, 1, 1])), 3) == pytest.approx(4 ** (1 / 3))
    assert degree_power_sum({0: 3, 1: 4}, 2) == 25
    with pytest.raises(ValueError):
        lp_norm({0: 1}, 0)


@given(small_graphs(), st.data())
def test_degree_sum_is_twice_edge_count(g, data):
    chosen = data.draw(st.lists(st.sampled_from([e.id for e in g.edges]), unique=True)) if g.edges else []
    deg = degrees(g, chosen)
    assert sum(deg.values()) == 2 * len(chosen)
    assert lp_norm(deg, 1) == 2 * len(chosen)


@given(small_graphs())
def test_verify_requirements_agrees_with_components(g):
    ids = [e.id for e in g.edges]
    comp = connected_components(g, ids)
    r = Requirements.uniform(g.vertices, 1)
    assert verify_requirements(g, ids, r) == (len(set(comp.values())) == 1)
