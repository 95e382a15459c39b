"""Seeded random instance families used by the tests, the demos and the verification suite."""
from __future__ import annotations

import itertools
import random
from fractions import Fraction

from .graph import Graph, Requirements
from .treelabel import LabelTreeInstance


def random_connected_graph(rng: random.Random, n: int, m: int, max_cost: int = 9) -> Graph:
    """A random spanning tree plus ``m - n + 1`` random extra edges (parallel edges allowed)."""
    if m < n - 1:
        raise ValueError("need at least n - 1 edges")
    edges = [(i - 1, rng.randrange(i), i) for i in range(1, n)]
    while len(edges) < m:
        a, b = rng.sample(range(n), 2)
        edges.append((len(edges), a, b))
    costs = {e[0]: rng.randint(1, max_cost) for e in edges}
    return Graph(range(n), edges, costs)


def random_requirements(rng: random.Random, n: int, pairs: int, max_r: int = 2) -> Requirements:
    r = Requirements()
    for _ in range(pairs):
        a, b = rng.sample(range(n), 2)
        r.set(a, b, max(r.get(a, b), rng.randint(1, max_r)))
    return r


def random_label_tree(rng: random.Random, depth: int, labels: int = 2, density: float = 0.5,
                      groups: int = 2, cost_types: int = 1, one_child: float = 0.3,
                      path: bool = False) -> tuple[LabelTreeInstance, dict]:
    """Random tree labeling instance with a planted valid labeling (returned as well).

    The tree has the given depth; each internal node gets one child with
    probability ``one_child`` (always one with ``path``). Allowed tuples are the
    planted tuple plus each other tuple with probability ``density``. Every group
    holds one planted leaf label and two random leaf labels; costs are scaled so the planted
    labeling costs at most 1 in every table.
    """
    children: dict = {}
    names: dict = {}

    def grow(u: str, d: int) -> None:
        names[u] = [f"{u}.{i}" for i in range(labels)]
        if d < depth:
            kids = (u + "a",) if path or rng.random() < one_child else (u + "a", u + "b")
            children[u] = kids
            for v in kids:
                grow(v, d + 1)

    grow("r", 0)
    planted = {u: rng.choice(ls) for u, ls in names.items()}
    gamma = {}
    for u, kids in children.items():
        want = (planted[u],) + tuple(planted[v] for v in kids)
        tuples = {want}
        for tup in itertools.product(names[u], *[names[v] for v in kids]):
            if rng.random() < density:
                tuples.add(tup)
        gamma[u] = sorted(tuples)
    every = [l for u in sorted(names) for l in names[u]]
    chosen = list(planted.values())
    leaves = sorted(u for u in names if u not in children)
    deep = [l for u in leaves for l in names[u]]
    group_list = []
    for _ in range(groups):
        group = {planted[rng.choice(leaves)]}
        group.update(rng.sample(deep, min(2, len(deep))))
        group_list.append(sorted(group))
    tables = []
    for _ in range(cost_types):
        raw = {l: rng.randint(0, 4) for l in every}
        planted_total = sum(raw[l] for l in chosen)
        scale = max(planted_total, max(raw.values()), 1)
        tables.append({l: Fraction(c, scale) for l, c in raw.items()})
    inst = LabelTreeInstance("r", children, names, gamma, group_list, tables)
    return inst, planted


def random_tw2_gst(rng: random.Random, n: int, keep: float = 0.6, groups: int = 2, group_size: int = 2,
                   max_cost: int = 9, degree_bound: int = 2):
    """Random partial 2-tree with its width-2 decomposition and a group Steiner instance on it.

    Vertex ``v >= 2`` is attached to an edge slot ``(a, b)`` of an earlier bag, creating
    the bag ``{a, b, v}`` under the shallowest bag holding both. One of ``(a, v), (b, v)``
    is always kept so the graph stays connected; the others survive with probability ``keep``.
    Returns ``(problem, decomposition)``; the root is vertex 0.
    """
    from .gst import GSTProblem, TreeDecomposition
    bags = {0: frozenset({0, 1})}
    parent = {0: None}
    depth = {0: 0}
    slots = [(0, 1)]
    pairs = [(0, 1)]
    for v in range(2, n):
        a, b = rng.choice(slots)
        home = min((k for k, vs in bags.items() if a in vs and b in vs), key=lambda k: (depth[k], k))
        k = len(bags)
        bags[k] = frozenset({a, b, v})
        parent[k] = home
        depth[k] = depth[home] + 1
        slots += [(a, v), (b, v)]
        first = rng.random() < 0.5
        pairs.append((a, v) if first else (b, v))
        if rng.random() < keep:
            pairs.append((b, v) if first else (a, v))
    edges = [(i, a, b) for i, (a, b) in enumerate(pairs)]
    costs = {i: rng.randint(1, max_cost) for i in range(len(edges))}
    g = Graph(range(n), edges, costs)
    others = list(range(1, n))
    group_list = [sorted(rng.sample(others, min(group_size, len(others)))) for _ in range(groups)]
    bounds = {v: degree_bound for v in range(n)}
    return GSTProblem(g, 0, group_list, bounds), TreeDecomposition(bags, parent, 0)


def random_snd_instance(rng: random.Random, n: int, m: int, p: int, mode: str = "snd", pairs: int = 3,
                        max_r: int = 2, max_cost: int = 9, tightness=(Fraction(1, 2), Fraction(7, 10),
                                                                       Fraction(9, 10), Fraction(1))):
    """Random feasible degree-constrained instance and its convex program solution.

    The budget is the first of ``tightness * (degree cost of the unconstrained optimum)``
    for which the convex program is feasible, raised if needed to the degree power sum of
    a minimal feasible subgraph (found by deleting edges, most expensive first), so the
    instance always has an integral solution while the degree constraint usually binds.
    Requirement pairs whose demand exceeds the edge connectivity are redrawn.
    Returns ``(instance, solution)``.
    """
    from .graph import degree_power_sum, degrees, verify_requirements
    from .instances import Instance
    from .relaxation import ConvexProgramInfeasible, GoodPolytope, solve_convex_program
    g = random_connected_graph(rng, n, m, max_cost)
    all_ids = [e.id for e in g.edges]
    if mode == "snd":
        while True:
            r = random_requirements(rng, n, pairs, max_r)
            if verify_requirements(g, all_ids, r):
                break
    else:
        r = Requirements.uniform(g.vertices, 1)
    poly = GoodPolytope(g, r, mode)
    witness = list(all_ids)
    for eid in sorted(all_ids, key=lambda e: (-g.costs[e], e)):
        rest = [e for e in witness if e != eid]
        if poly.integral_ok(rest) or (mode != "snd" and verify_requirements(g, rest, r)):
            witness = rest
    floor = degree_power_sum(degrees(g, witness), p)
    free = solve_convex_program(g, r, p, budget=Fraction(len(g.edges) * 2) ** p * n, polytope=poly)
    for factor in tightness:
        budget = max(free.degree_cost * factor, floor)
        try:
            sol = solve_convex_program(g, r, p, budget=budget, polytope=poly)
            break
        except ConvexProgramInfeasible:
            continue
    return Instance(g, r, p=p, budget=budget, mode=mode), sol
