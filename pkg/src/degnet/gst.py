"""Degree-bounded group Steiner tree on bounded-treewidth graphs via tree labeling."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Iterable, Mapping

from .graph import Graph, connected_components, degrees, id_key
from .partition import Partition, UnionFind, all_partitions, cc
from .stats import trial_rng
from .treelabel import (InfeasibleInstance, LabelTreeInstance, Rounder, SuperTree,
                        build_supertree, solve_fractional)


class DecompositionInvalid(ValueError):
    pass


class TreeDecomposition:
    """Rooted tree of bags. ``parent[root]`` is ``None``."""

    def __init__(self, bags: Mapping, parent: Mapping, root: Hashable):
        self.bags = {b: frozenset(vs) for b, vs in bags.items()}
        self.parent = dict(parent)
        self.root = root
        self.parent[root] = None
        if set(self.parent) != set(self.bags):
            raise DecompositionInvalid("every bag needs a parent entry")
        self.children: dict = {b: [] for b in self.bags}
        for b, p in self.parent.items():
            if p is not None:
                if p not in self.bags:
                    raise DecompositionInvalid(f"bag {b!r} has unknown parent {p!r}")
                self.children[p].append(b)
        for b in self.children:
            self.children[b].sort(key=id_key)
        order = self.preorder()
        if len(order) != len(self.bags):
            raise DecompositionInvalid("bags do not form a tree under the root")

    def preorder(self) -> list:
        out, stack, seen = [], [self.root], set()
        while stack:
            b = stack.pop()
            if b in seen:
                raise DecompositionInvalid("cycle in bag tree")
            seen.add(b)
            out.append(b)
            stack.extend(reversed(self.children[b]))
        return out

    def depth_of(self) -> dict:
        depth = {self.root: 0}
        for b in self.preorder():
            for c in self.children[b]:
                depth[c] = depth[b] + 1
        return depth

    @property
    def depth(self) -> int:
        return max(self.depth_of().values())

    @property
    def width(self) -> int:
        return max(len(vs) for vs in self.bags.values()) - 1

    def descendants(self, b) -> list:
        out, stack = [], [b]
        while stack:
            c = stack.pop()
            out.append(c)
            stack.extend(self.children[c])
        return out

    def validate(self, g: Graph) -> None:
        """Edge coverage, vertex coverage and connectivity of each vertex's bags."""
        for e in g.edges:
            if not any(e.u in vs and e.v in vs for vs in self.bags.values()):
                raise DecompositionInvalid(f"edge {e.id!r} is not covered by any bag")
        for v in g.vertices:
            holding = {b for b, vs in self.bags.items() if v in vs}
            if not holding:
                raise DecompositionInvalid(f"vertex {v!r} is in no bag")
            tops = [b for b in holding if self.parent[b] not in holding]
            if len(tops) != 1:
                raise DecompositionInvalid(f"bags containing {v!r} are not connected")

    def with_vertex(self, v) -> "TreeDecomposition":
        return TreeDecomposition({b: vs | {v} for b, vs in self.bags.items()}, self.parent, self.root)

    def binarized(self) -> "TreeDecomposition":
        """Split bags with more than two children by chaining copies of the bag."""
        bags, parent = dict(self.bags), dict(self.parent)
        fresh = itertools.count()
        for b in self.preorder():
            kids = list(self.children[b])
            holder = b
            while len(kids) > 2:
                copy = ("dup", b, next(fresh))
                while copy in bags:
                    copy = ("dup", b, next(fresh))
                bags[copy] = bags[b]
                parent[copy] = holder
                parent[kids[0]] = holder
                kids = kids[1:]
                for k in kids:
                    parent[k] = copy
                holder = copy
        return TreeDecomposition(bags, parent, self.root)


def assign_edges_to_bags(g: Graph, td: TreeDecomposition) -> dict:
    """Each edge goes to the highest bag holding both of its endpoints."""
    depth = td.depth_of()
    out: dict = {b: [] for b in td.bags}
    for e in g.edges:
        holding = [b for b, vs in td.bags.items() if e.u in vs and e.v in vs]
        if not holding:
            raise DecompositionInvalid(f"edge {e.id!r} is not covered by any bag")
        top = min(holding, key=lambda b: (depth[b], id_key(b)))
        out[top].append(e.id)
    return out


@dataclass(frozen=True)
class BagLabel:
    bag: Hashable
    forest: tuple
    down: Partition
    up: Partition

    def __repr__(self) -> str:
        return f"<{self.bag}|{list(self.forest)}|{self.down}|{self.up}>"


@dataclass
class GSTProblem:
    """Group Steiner tree instance with per-vertex degree bounds."""

    graph: Graph
    root: Hashable
    groups: list
    degree_bounds: dict

    def __post_init__(self):
        self.groups = [frozenset(s) for s in self.groups]
        for v in self.graph.vertices:
            self.degree_bounds.setdefault(v, math.inf)

    def is_feasible(self, edge_ids: Iterable) -> bool:
        edges = list(edge_ids)
        deg = degrees(self.graph, edges)
        if any(deg[v] > self.degree_bounds[v] for v in self.graph.vertices):
            return False
        return all(self.connected(edges, t) for t in range(len(self.groups)))

    def connected(self, edge_ids, t: int) -> bool:
        comp = connected_components(self.graph, edge_ids)
        return any(comp[s] == comp[self.root] for s in self.groups[t])


class Reduction:
    """The labeling instance for one cost guess ``cstar``.

    Labels are only generated when they occur in some consistent labeling:
    realizable ``(F_b, down_b)`` pairs are collected bottom-up and the allowed
    tuples top-down from the root, applying the join/restriction rules.
    """

    def __init__(self, problem: GSTProblem, td: TreeDecomposition, cstar, literal: bool = False):
        g = problem.graph
        td.validate(g)
        self.problem = problem
        self.td = td.with_vertex(problem.root).binarized()
        self.cstar = Fraction(cstar)
        self.edges_at = assign_edges_to_bags(g, self.td)
        self.forests = {b: self._forests(b) for b in self.td.bags}
        if literal:
            labels, gamma = self._literal()
        else:
            labels, gamma = self._constructive()
        self.labels = labels
        self.gamma = gamma
        self.instance = self._instance()

    # -- label pieces -------------------------------------------------------------------------

    def _forests(self, b) -> list[tuple]:
        g, prob = self.problem.graph, self.problem
        ids = self.edges_at[b]
        out = []
        for size in range(len(ids) + 1):
            for combo in itertools.combinations(ids, size):
                if g.cost(combo) > self.cstar:
                    continue
                uf = UnionFind()
                acyclic = True
                for eid in combo:
                    e = g.edge_by_id[eid]
                    if not uf.union(e.u, e.v):
                        acyclic = False
                        break
                if not acyclic:
                    continue
                deg = degrees(g, combo)
                if any(deg[v] > prob.degree_bounds[v] for v in g.vertices):
                    continue
                out.append(tuple(sorted(combo, key=id_key)))
        return out

    def cc_of(self, forest: Iterable) -> Partition:
        g = self.problem.graph
        return cc((g.edge_by_id[e].u, g.edge_by_id[e].v) for e in forest)

    def _down_pairs(self) -> dict:
        td = self.td
        pairs: dict = {}
        for b in reversed(td.preorder()):
            X = td.bags[b]
            kids = td.children[b]
            found = set()
            kid_downs = [sorted({d for _, d in pairs[c]}, key=repr) for c in kids]
            for forest in self.forests[b]:
                base = self.cc_of(forest)
                for combo in itertools.product(*kid_downs):
                    found.add((forest, base.join(*combo).restrict(X)))
            pairs[b] = found
        return pairs

    def _constructive(self):
        td = self.td
        pairs = self._down_pairs()
        labels: dict = {b: set() for b in td.bags}
        gamma: dict = {b: set() for b in td.bags}
        X = td.bags
        for forest, down in pairs[td.root]:
            labels[td.root].add(BagLabel(td.root, forest, down, self.cc_of(forest).restrict(X[td.root])))
        for b in td.preorder():
            kids = td.children[b]
            if not kids:
                continue
            kid_pairs = [sorted(pairs[c], key=repr) for c in kids]
            for lab in sorted(labels[b], key=repr):
                base = self.cc_of(lab.forest)
                for combo in itertools.product(*kid_pairs):
                    downs = [d for _, d in combo]
                    if base.join(*downs).restrict(X[b]) != lab.down:
                        continue
                    tail = []
                    for i, (c, (forest, down)) in enumerate(zip(kids, combo)):
                        others = [d for j, d in enumerate(downs) if j != i]
                        up = lab.up.join(*others, self.cc_of(forest)).restrict(X[c])
                        tail.append(BagLabel(c, forest, down, up))
                    for c, child in zip(kids, tail):
                        labels[c].add(child)
                    gamma[b].add((lab,) + tuple(tail))
        return labels, gamma

    def _literal(self):
        """Every label allowed by the label rules and every tuple satisfying the join rules."""
        td = self.td
        labels: dict = {}
        for b in td.bags:
            X = td.bags[b]
            parts = all_partitions(sorted(X, key=id_key))
            labels[b] = set()
            for forest in self.forests[b]:
                base = self.cc_of(forest).restrict(X)
                downs = [base] if not td.children[b] else [p for p in parts if base.refines(p)]
                ups = [base] if b == td.root else [p for p in parts if base.refines(p)]
                for d in downs:
                    for u in ups:
                        labels[b].add(BagLabel(b, forest, d, u))
        gamma: dict = {b: set() for b in td.bags}
        for b in td.bags:
            kids = td.children[b]
            if not kids:
                continue
            for tup in itertools.product(labels[b], *[labels[c] for c in kids]):
                if self.tuple_ok(tup):
                    gamma[b].add(tup)
        return labels, gamma

    def tuple_ok(self, tup) -> bool:
        """The join/restriction rules for one parent label and its child labels."""
        lab, kids = tup[0], tup[1:]
        X = self.td.bags
        if self.cc_of(lab.forest).join(*[k.down for k in kids]).restrict(X[lab.bag]) != lab.down:
            return False
        for i, k in enumerate(kids):
            others = [o.down for j, o in enumerate(kids) if j != i]
            if lab.up.join(*others, self.cc_of(k.forest)).restrict(X[k.bag]) != k.up:
                return False
        return True

    # -- labeling instance ----------------------------------------------------------------------

    def covers(self, lab: BagLabel, group: frozenset) -> bool:
        r = self.problem.root
        both = lab.down.join(lab.up)
        return any(s in self.td.bags[lab.bag] and both.same(s, r) for s in group)

    def _instance(self) -> LabelTreeInstance:
        td, prob, g = self.td, self.problem, self.problem.graph
        labels = {b: sorted(self.labels[b], key=repr) for b in td.bags}
        every = [l for b in td.bags for l in labels[b]]
        groups = [[l for l in every if self.covers(l, grp)] for grp in prob.groups]
        tables = [{}]
        for l in every:
            c = g.cost(l.forest)
            tables[0][l] = c / self.cstar if self.cstar else Fraction(0)
        for v in g.vertices:
            db = prob.degree_bounds[v]
            table = {}
            for l in every:
                d = sum(1 for e in l.forest if v in (g.edge_by_id[e].u, g.edge_by_id[e].v))
                if d:
                    table[l] = Fraction(d) / Fraction(db) if db != math.inf else Fraction(0)
            tables.append(table)
        children = {b: tuple(td.children[b]) for b in td.bags}
        return LabelTreeInstance(td.root, children, labels, self.gamma, groups, tables)

    # -- results ----------------------------------------------------------------------------------

    def subgraph(self, labeling: Mapping) -> frozenset:
        return frozenset(e for lab in labeling.values() for e in lab.forest)

    def true_partitions(self, h: Iterable) -> dict:
        """Down/up partitions of every bag recomputed from the subgraph ``h``."""
        g, td = self.problem.graph, self.td
        h = set(h)
        owner = {e: b for b, es in self.edges_at.items() for e in es}
        out = {}
        for b in td.bags:
            below = set(td.descendants(b))
            down_edges = [e for e in h if owner[e] in below]
            up_edges = [e for e in h if owner[e] not in below or owner[e] == b]
            out[b] = (_components_on(g, down_edges, td.bags[b]), _components_on(g, up_edges, td.bags[b]))
        return out


def _components_on(g: Graph, edge_ids, ground) -> Partition:
    comp = connected_components(g, edge_ids)
    blocks: dict = {}
    for v in ground:
        blocks.setdefault(comp[v], []).append(v)
    return Partition(blocks.values())


def verify_partitions(red: Reduction, labeling: Mapping) -> bool:
    """Do the partitions carried by a consistent labeling match the subgraph they define?"""
    truth = red.true_partitions(red.subgraph(labeling))
    return all(truth[b] == (lab.down, lab.up) for b, lab in labeling.items())


def default_reps(depth: int, n: int) -> int:
    return max(1, math.ceil(4 * max(depth, 1) * math.log(max(n, 2))))


def cost_candidates(g: Graph, grid: float = 0.1, exact_limit: int = 12) -> list[Fraction]:
    """Cost guesses: every subset sum for small graphs, else ``{0} + min_cost * (1 + grid)^j``."""
    costs = [g.costs[e.id] for e in g.edges]
    if len(costs) <= exact_limit:
        sums = {Fraction(0)}
        for c in costs:
            sums |= {s + c for s in sums}
        return sorted(sums)
    total = sum(costs, Fraction(0))
    positive = [c for c in costs if c > 0]
    out = [Fraction(0)]
    if positive:
        step = Fraction(grid).limit_denominator(10 ** 6) if isinstance(grid, float) else Fraction(grid)
        guess = min(positive)
        while guess < total:
            out.append(guess)
            guess = guess * (1 + step)
        out.append(total)
    return out


@dataclass
class GSTResult:
    edges: frozenset
    cstar: Fraction
    reps: int
    depth: int
    supertree_size: int
    connected: list
    cost: Fraction
    cost_ratio: float
    degree_ratio: float
    partition_failures: int
    cover_mismatches: int
    runs: list = field(default_factory=list)
    label_counts: dict = field(default_factory=dict)

    @property
    def all_connected(self) -> bool:
        return all(self.connected)


def prepare(problem: GSTProblem, td: TreeDecomposition, cstar, spread: int = 0, seed: int = 0,
            max_nodes: int = 200_000):
    red = Reduction(problem, td, cstar)
    st = build_supertree(red.instance, max_nodes)
    frac = solve_fractional(st, spread=spread, seed=seed)
    return red, st, frac


def search_cstar(problem: GSTProblem, td: TreeDecomposition, grid: float = 0.1,
                 max_nodes: int = 200_000) -> tuple[Fraction, tuple]:
    """Smallest guess in the candidate list whose labeling LP is feasible (binary search)."""
    cands = cost_candidates(problem.graph, grid)
    lo, hi = 0, len(cands) - 1
    best = None
    while lo <= hi:
        mid = (lo + hi) // 2
        try:
            found = prepare(problem, td, cands[mid], max_nodes=max_nodes)
        except InfeasibleInstance:
            lo = mid + 1
            continue
        best = (cands[mid], found)
        hi = mid - 1
    if best is None:
        raise InfeasibleInstance("no cost guess admits a feasible labeling LP")
    return best


def run_reduction(red: Reduction, st: SuperTree, frac, reps: int, seed: int = 0, stream: int = 0) -> GSTResult:
    """Round ``reps`` times, union the subgraphs and measure the outcome."""
    prob, g = red.problem, red.problem.graph
    rounder = Rounder(st, frac)
    union: set = set()
    claim_fail = cover_fail = 0
    runs = []
    for i in range(reps):
        nodes = rounder.sample(trial_rng(seed, i, stream))
        labeling = st.to_labeling(nodes)
        h = red.subgraph(labeling)
        parts_ok = verify_partitions(red, labeling)
        claim_fail += not parts_ok
        covered = [red.instance.covers(labeling, t) for t in range(len(prob.groups))]
        actual = [prob.connected(h, t) for t in range(len(prob.groups))]
        cover_fail += sum(1 for c, a in zip(covered, actual) if c and not a)
        runs.append({"cost": str(g.cost(h)), "covered": covered, "partitions_ok": parts_ok})
        union |= h
    deg = degrees(g, list(union))
    ratios = []
    for v in g.vertices:
        db = prob.degree_bounds.get(v, math.inf)
        if deg[v] and db != math.inf:
            ratios.append(deg[v] / db if db else math.inf)
    cost = g.cost(union)
    return GSTResult(
        edges=frozenset(union), cstar=red.cstar, reps=reps, depth=red.td.depth,
        supertree_size=st.size,
        connected=[prob.connected(union, t) for t in range(len(prob.groups))],
        cost=cost, cost_ratio=float(cost / red.cstar) if red.cstar else (0.0 if cost == 0 else math.inf),
        degree_ratio=max(ratios, default=0.0), partition_failures=claim_fail,
        cover_mismatches=cover_fail, runs=runs,
        label_counts={str(b): len(ls) for b, ls in red.labels.items()})


def solve_gst(problem: GSTProblem, td: TreeDecomposition, seed: int = 0, cstar=None, grid: float = 0.1,
              reps: int | None = None, max_nodes: int = 200_000) -> GSTResult:
    if cstar is None:
        cstar, (red, st, frac) = search_cstar(problem, td, grid, max_nodes)
    else:
        red, st, frac = prepare(problem, td, cstar, max_nodes=max_nodes)
    if reps is None:
        reps = default_reps(red.td.depth, len(problem.graph.vertices))
    return run_reduction(red, st, frac, reps, seed)
