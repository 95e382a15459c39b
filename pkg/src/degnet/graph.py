"""Undirected multigraphs, degree vectors, exact max-flow and requirement checks."""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Iterable, Mapping

Vertex = Hashable


def id_key(value):
    """Sort key that orders ints numerically and everything else by its string form."""
    if isinstance(value, bool) or not isinstance(value, int):
        return (1, str(value))
    return (0, value)


@dataclass(frozen=True)
class Edge:
    id: Hashable
    u: Vertex
    v: Vertex

    def other(self, w: Vertex) -> Vertex:
        return self.v if w == self.u else self.u


class Graph:
    """Undirected multigraph with edge costs. Parallel edges keep distinct ids."""

    def __init__(self, vertices: Iterable[Vertex], edges: Iterable, costs: Mapping | None = None):
        self.vertices: list = list(vertices)
        if len(set(self.vertices)) != len(self.vertices):
            raise ValueError("duplicate vertex ids")
        vset = set(self.vertices)
        self.edges: list[Edge] = []
        for item in edges:
            e = item if isinstance(item, Edge) else Edge(*item)
            if e.u not in vset or e.v not in vset:
                raise ValueError(f"edge {e.id!r} has an unknown endpoint")
            if e.u == e.v:
                raise ValueError(f"edge {e.id!r} is a self-loop")
            self.edges.append(e)
        self.edge_by_id = {e.id: e for e in self.edges}
        if len(self.edge_by_id) != len(self.edges):
            raise ValueError("duplicate edge ids")
        costs = costs or {}
        self.costs: dict = {}
        for e in self.edges:
            c = Fraction(costs.get(e.id, 1))
            if c < 0:
                raise ValueError(f"edge {e.id!r} has a negative cost")
            self.costs[e.id] = c
        self.index = {e.id: i for i, e in enumerate(self.edges)}
        self.incident: dict = {v: [] for v in self.vertices}
        for e in self.edges:
            self.incident[e.u].append(e.id)
            self.incident[e.v].append(e.id)

    def __repr__(self) -> str:
        return f"Graph(|V|={len(self.vertices)}, |E|={len(self.edges)})"

    def cost(self, edge_ids: Iterable) -> Fraction:
        return sum((self.costs[e] for e in edge_ids), Fraction(0))

    def delta(self, v: Vertex) -> list:
        return self.incident[v]

    def cut_edges(self, side: set) -> list:
        return [e.id for e in self.edges if (e.u in side) != (e.v in side)]

    def induced_edges(self, side: set) -> list:
        return [e.id for e in self.edges if e.u in side and e.v in side]

    def subgraph(self, edge_ids: Iterable) -> "Graph":
        keep = set(edge_ids)
        return Graph(self.vertices, [e for e in self.edges if e.id in keep],
                     {e: c for e, c in self.costs.items() if e in keep})


class Requirements:
    """Connection requirements ``r[u, v]`` keyed on unordered vertex pairs."""

    def __init__(self, pairs: Mapping | Iterable = ()):
        self._r: dict[frozenset, int] = {}
        items = pairs.items() if isinstance(pairs, Mapping) else pairs
        for key, value in items:
            u, v = tuple(key)
            self.set(u, v, value)

    @classmethod
    def uniform(cls, vertices: Iterable[Vertex], value: int = 1) -> "Requirements":
        vs = list(vertices)
        return cls({(a, b): value for i, a in enumerate(vs) for b in vs[i + 1:]})

    def set(self, u: Vertex, v: Vertex, value: int) -> None:
        if u == v:
            raise ValueError("requirement on a single vertex is undefined")
        if int(value) != value or value < 0:
            raise ValueError("requirements are nonnegative integers")
        self._r[frozenset((u, v))] = int(value)

    def get(self, u: Vertex, v: Vertex) -> int:
        return self._r.get(frozenset((u, v)), 0)

    def pairs(self) -> list[tuple[Vertex, Vertex, int]]:
        out = []
        for key, val in self._r.items():
            if val > 0:
                u, v = sorted(key, key=repr)
                out.append((u, v, val))
        return sorted(out, key=repr)

    def cut_requirement(self, side: set) -> int:
        """``R(S)``: the largest requirement separated by ``side``."""
        best = 0
        for key, val in self._r.items():
            u, v = tuple(key)
            if (u in side) != (v in side) and val > best:
                best = val
        return best

    def is_uniform_one(self, vertices: Iterable[Vertex]) -> bool:
        vs = list(vertices)
        return all(self.get(a, b) == 1 for i, a in enumerate(vs) for b in vs[i + 1:])


def degrees(g: Graph, x: Mapping | Iterable) -> dict:
    """Degree vector of an edge set, or fractional degrees ``x(delta(v))`` of an edge vector."""
    if isinstance(x, Mapping):
        return {v: sum((Fraction(x.get(e, 0)) for e in g.incident[v]), Fraction(0)) for v in g.vertices}
    chosen = list(x)
    deg = {v: 0 for v in g.vertices}
    for eid in chosen:
        e = g.edge_by_id[eid]
        deg[e.u] += 1
        deg[e.v] += 1
    return deg


def degree_power_sum(d: Mapping, p: int) -> Fraction:
    """Exact ``sum_v d(v)**p``."""
    if int(p) != p or p < 1:
        raise ValueError("p must be a positive integer")
    return sum((Fraction(val) ** int(p) for val in d.values()), Fraction(0))


def lp_norm(d: Mapping, p: int) -> float:
    """``(sum_v d(v)**p) ** (1/p)`` as a float; see :func:`degree_power_sum` for the exact sum."""
    return float(degree_power_sum(d, p)) ** (1.0 / int(p))


def max_flow_directed(nodes: Iterable, arcs: Iterable[tuple], s, t) -> tuple[Fraction, frozenset]:
    """Edmonds-Karp with exact capacities on a directed network.

    ``arcs`` holds ``(tail, head, capacity)``; ``math.inf`` capacities are allowed.
    Returns the flow value and the source side of one minimum cut.
    """
    nodes = list(nodes)
    node_set = set(nodes)
    if s not in node_set or t not in node_set:
        raise KeyError("unknown source or sink")
    if s == t:
        raise ValueError("source and sink must differ")
    head, cap, adj = [], [], {v: [] for v in nodes}
    for a, b, c in arcs:
        if a not in node_set or b not in node_set:
            raise KeyError("arc with unknown endpoint")
        if c == math.inf:
            c = math.inf
        else:
            c = Fraction(c)
            if c < 0:
                raise ValueError("negative capacity")
        adj[a].append(len(head)); head.append(b); cap.append(c)
        adj[b].append(len(head)); head.append(a); cap.append(Fraction(0))
    value = Fraction(0)
    while True:
        parent = {s: None}
        queue = deque([s])
        while queue and t not in parent:
            a = queue.popleft()
            for k in adj[a]:
                if cap[k] > 0 and head[k] not in parent:
                    parent[head[k]] = k
                    queue.append(head[k])
        if t not in parent:
            return value, frozenset(parent)
        path, v = [], t
        while parent[v] is not None:
            k = parent[v]
            path.append(k)
            v = head[k ^ 1]
        push = min(cap[k] for k in path)
        if push == math.inf:
            raise ValueError("infinite capacity path from source to sink")
        for k in path:
            cap[k] -= push
            cap[k ^ 1] += push
        value += push


def max_flow(g: Graph, capacities: Mapping, s: Vertex, t: Vertex) -> tuple[Fraction, frozenset]:
    """Maximum s-t flow in ``g`` with undirected edge capacities; returns value and min-cut side of s."""
    if s not in g.incident or t not in g.incident:
        raise KeyError("unknown vertex id")
    arcs = []
    for e in g.edges:
        c = Fraction(capacities.get(e.id, 0))
        if c:
            arcs.append((e.u, e.v, c))
            arcs.append((e.v, e.u, c))
    return max_flow_directed(g.vertices, arcs, s, t)


def _components(vertices: Iterable, g: Graph, edge_ids: Iterable) -> dict:
    parent = {v: v for v in vertices}

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for eid in edge_ids:
        e = g.edge_by_id[eid]
        ra, rb = find(e.u), find(e.v)
        if ra != rb:
            parent[ra] = rb
    return {v: find(v) for v in parent}


def connected_components(g: Graph, edge_ids: Iterable) -> dict:
    """Map each vertex to a component representative for the subgraph ``(V, edge_ids)``."""
    return _components(g.vertices, g, edge_ids)


def verify_requirements(g: Graph, h_edges: Iterable, r: Requirements) -> bool:
    """True iff ``(V, h_edges)`` has ``r[u, v]`` edge-disjoint u-v paths for every pair."""
    h = list(h_edges)
    for eid in h:
        if eid not in g.edge_by_id:
            raise KeyError(f"unknown edge {eid!r}")
    pairs = r.pairs()
    if not pairs:
        return True
    comp = _components(g.vertices, g, h)
    if any(comp[u] != comp[v] for u, v, _ in pairs):
        return False
    unit = {eid: 1 for eid in h}
    for u, v, need in pairs:
        if need <= 1:
            continue
        value, _ = max_flow(g, unit, u, v)
        if value < need:
            return False
    return True
