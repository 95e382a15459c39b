"""Cut relaxations for survivable network design and the degree-norm convex program."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .graph import Graph, Requirements, degrees, max_flow, max_flow_directed
from .lp import LinearProgram, Row, SimplexSession, Status

SND = "snd"
SPANNING_TREE = "mst"

ENUMERATE_LIMIT = 12


class ConvexProgramInfeasible(Exception):
    """No point of the polytope meets the degree budget; the guess of A is too small."""


def f_value(x, p: int) -> Fraction:
    """Degree cost: linear on [0, 1], ``x**p`` above 1."""
    x = Fraction(x)
    if x < 0:
        raise ValueError("degree must be nonnegative")
    return x if x <= 1 else x ** int(p)


def f_subgradient(x, p: int) -> Fraction:
    """A subgradient of :func:`f_value`; at the kink ``x = 1`` the value ``p`` is used."""
    x = Fraction(x)
    if x < 0:
        raise ValueError("degree must be nonnegative")
    if x < 1:
        return Fraction(1)
    return int(p) * x ** (int(p) - 1)


def power_budget(A, p: int) -> Fraction:
    """Exact ``A**p``. Floats are snapped to the nearest small-denominator rational."""
    if isinstance(A, (int, Fraction)):
        return Fraction(A) ** int(p)
    if isinstance(A, str):
        return Fraction(A) ** int(p)
    return Fraction(float(A) ** int(p)).limit_denominator(10 ** 9)


class GoodPolytope:
    """Upward-closed cut relaxation (``snd``) or the spanning tree polytope (``mst``).

    ``snd``: ``x(delta(S)) >= R(S)`` for every vertex set ``S``, with ``(alpha, beta) = (2, 3)``.
    ``mst``: ``x(E) = |V| - 1`` and ``x(E(S)) <= |S| - 1``, with ``(alpha, beta) = (1, 1)``.
    Rows are enumerated up to ``enumerate_limit`` vertices and separated by max-flow beyond.
    """

    def __init__(self, graph: Graph, requirements: Requirements | None = None, mode: str = SND,
                 enumerate_limit: int = ENUMERATE_LIMIT):
        if mode not in (SND, SPANNING_TREE):
            raise ValueError(f"unknown mode {mode!r}")
        self.graph = graph
        self.mode = mode
        if requirements is None:
            requirements = Requirements.uniform(graph.vertices, 1)
        if mode == SPANNING_TREE and not requirements.is_uniform_one(graph.vertices):
            raise ValueError("spanning tree mode needs r = 1 on every pair")
        self.requirements = requirements
        self.alpha, self.beta = (2, 3) if mode == SND else (1, 1)
        self.enumerated = len(graph.vertices) <= enumerate_limit
        self._rows: list[Row] | None = None
        self._pairs = requirements.pairs()

    @property
    def num_edges(self) -> int:
        return len(self.graph.edges)

    # -- rows ----------------------------------------------------------------------------

    def _edge_mask_rows(self) -> list[Row]:
        g = self.graph
        verts = g.vertices
        n = len(verts)
        bit = {v: 1 << i for i, v in enumerate(verts)}
        ends = [(bit[e.u], bit[e.v]) for e in g.edges]
        best: dict[tuple, Fraction] = {}
        if self.mode == SND:
            pair_bits = [(bit[u], bit[v], r) for u, v, r in self._pairs]
            for rest in range(1 << (n - 1)):
                mask = 1 | (rest << 1)
                if mask == (1 << n) - 1:
                    continue
                need = 0
                for bu, bv, r in pair_bits:
                    if bool(mask & bu) != bool(mask & bv) and r > need:
                        need = r
                if need == 0:
                    continue
                key = tuple(i for i, (a, b) in enumerate(ends) if bool(mask & a) != bool(mask & b))
                if best.get(key, -1) < need:
                    best[key] = Fraction(need)
            rows = [Row(tuple((i, Fraction(1)) for i in key), ">=", need, f"cut{list(key)}")
                    for key, need in sorted(best.items())]
        else:
            rows = [Row(tuple((i, Fraction(1)) for i in range(len(ends))), "==", Fraction(n - 1), "tree")]
            for mask in range(1, (1 << n) - 1):
                size = bin(mask).count("1")
                if size < 2:
                    continue
                key = tuple(i for i, (a, b) in enumerate(ends) if mask & a and mask & b)
                if not key:
                    continue
                if key not in best or best[key] > size - 1:
                    best[key] = Fraction(size - 1)
            rows += [Row(tuple((i, Fraction(1)) for i in key), "<=", cap, f"span{list(key)}")
                     for key, cap in sorted(best.items())]
        return rows

    def rows(self) -> list[Row]:
        """Explicit rows of the polytope (everything, when enumerated; else only the tree equality)."""
        if self._rows is None:
            if self.enumerated:
                self._rows = self._edge_mask_rows()
            elif self.mode == SPANNING_TREE:
                m = self.num_edges
                self._rows = [Row(tuple((i, Fraction(1)) for i in range(m)), "==",
                                  Fraction(len(self.graph.vertices) - 1), "tree")]
            else:
                self._rows = []
        return self._rows

    def separate(self, x) -> list[Row]:
        """Violated rows at ``x`` (a sequence over edges in graph order)."""
        if self.enumerated:
            return [r for r in self.rows() if not r.satisfied(x)]
        if self.mode == SND:
            return self._separate_cuts(x)
        return self._separate_subtours(x)

    def _separate_cuts(self, x) -> list[Row]:
        g = self.graph
        caps = {e.id: x[i] for i, e in enumerate(g.edges)}
        found: dict[tuple, Row] = {}
        for u, v, r in self._pairs:
            value, side = max_flow(g, caps, u, v)
            if value < r:
                side = set(side)
                key = tuple(g.index[e] for e in g.cut_edges(side))
                need = self.requirements.cut_requirement(side)
                found[key] = Row(tuple((i, Fraction(1)) for i in key), ">=", Fraction(need), f"cut{list(key)}")
        return list(found.values())

    def _separate_subtours(self, x) -> list[Row]:
        g = self.graph
        out = [r for r in self.rows() if not r.satisfied(x)]
        d = {v: Fraction(0) for v in g.vertices}
        for i, e in enumerate(g.edges):
            d[e.u] += x[i]
            d[e.v] += x[i]
        src, snk = object(), object()
        found: dict[tuple, Row] = {}
        for k in g.vertices:
            arcs, const = [], Fraction(0)
            for v in g.vertices:
                w = 1 - d[v] / 2
                if w >= 0:
                    arcs.append((v, snk, w))
                else:
                    const += w
                    arcs.append((src, v, -w))
            for i, e in enumerate(g.edges):
                if x[i]:
                    arcs.append((e.u, e.v, x[i] / 2))
                    arcs.append((e.v, e.u, x[i] / 2))
            arcs.append((src, k, math.inf))
            value, side = max_flow_directed(list(g.vertices) + [src, snk], arcs, src, snk)
            if value + const < 1:
                side = set(side) - {src}
                key = tuple(g.index[e] for e in g.induced_edges(side))
                if key and len(side) >= 2:
                    found[key] = Row(tuple((i, Fraction(1)) for i in key), "<=",
                                     Fraction(len(side) - 1), f"span{list(key)}")
        return out + list(found.values())

    # -- programs ------------------------------------------------------------------------

    def linear_program(self, bounds: Mapping | None = None, extra_vars: int = 0) -> LinearProgram:
        """LP over ``P`` (and ``Q_B`` when finite ``bounds`` are given), edges first."""
        g = self.graph
        m = self.num_edges
        names = [f"x[{e.id}]" for e in g.edges] + [f"t{j}" for j in range(extra_vars)]
        lp = LinearProgram(m + extra_vars, [1] * m + [None] * extra_vars, names)
        for row in self.rows():
            lp.add_row(row, row.sense, row.rhs)
        if not self.enumerated:
            lp.separators.append(self.separate)
        if bounds:
            for v in g.vertices:
                b = bounds.get(v, math.inf)
                if b != math.inf and g.incident[v]:
                    lp.add_row({g.index[e]: 1 for e in g.incident[v]}, "<=", Fraction(b), f"deg[{v}]")
        return lp

    def contains(self, x) -> bool:
        """Membership test; ``x`` is a vector in edge order or a map from edge id."""
        if isinstance(x, Mapping):
            x = [x[e.id] for e in self.graph.edges]
        return all(0 <= v <= 1 for v in x) and not self.separate(list(x))

    def integral_ok(self, edge_ids) -> bool:
        """Requirement check for an integral point (spanning trees in ``mst`` mode)."""
        from .graph import connected_components, verify_requirements
        chosen = list(edge_ids)
        if self.mode == SPANNING_TREE:
            comp = connected_components(self.graph, chosen)
            return len(set(comp.values())) == 1 and len(chosen) == len(self.graph.vertices) - 1
        return verify_requirements(self.graph, chosen, self.requirements)


@dataclass
class ConvexProgramSolution:
    x: dict
    objective: Fraction
    degree_cost: Fraction
    budget: Fraction
    p: int
    eps: Fraction
    cuts: int = 0
    rounds: int = 0
    degrees: dict = field(default_factory=dict)
    lp: LinearProgram | None = field(default=None, repr=False, compare=False)

    def vector(self, g: Graph) -> list[Fraction]:
        return [self.x[e.id] for e in g.edges]


def solve_convex_program(g: Graph, r: Requirements | None, p: int, A=None, eps=Fraction(1, 10 ** 6),
                         mode: str = SND, budget=None, max_rounds: int = 500,
                         polytope: GoodPolytope | None = None) -> ConvexProgramSolution:
    """Minimise ``c.x`` over ``P`` subject to ``sum_v f(x(delta(v))) <= A**p``.

    Kelley's cutting planes: the degree cost of each vertex is bounded below by an
    epigraph variable ``t_v``, tangent rows of ``f`` are added at the incumbent
    degree profile, and the loop stops once the true degree cost is within a
    factor ``1 + eps`` of the budget.
    """
    if int(p) != p or p < 1:
        raise ValueError("p must be a positive integer")
    p = int(p)
    eps = Fraction(eps).limit_denominator(10 ** 12) if isinstance(eps, float) else Fraction(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    if budget is None:
        if A is None:
            raise ValueError("either A or budget is required")
        budget = power_budget(A, p)
    budget = Fraction(budget)
    poly = polytope or GoodPolytope(g, r, mode)
    m, n = len(g.edges), len(g.vertices)
    lp = poly.linear_program(extra_vars=n)
    t_index = {v: m + j for j, v in enumerate(g.vertices)}
    for v in g.vertices:
        coefs = {g.index[e]: 1 for e in g.incident[v]}
        coefs[t_index[v]] = -1
        lp.add_row(coefs, "<=", 0, f"lin[{v}]")
    lp.add_row({t_index[v]: 1 for v in g.vertices}, "<=", budget, "budget")
    lp.set_objective({g.index[e.id]: g.costs[e.id] for e in g.edges})
    session = SimplexSession(lp)
    tangents = 0
    limit = (1 + eps) * budget
    for rounds in range(1, max_rounds + 1):
        res = session.solve()
        if res.status == Status.INFEASIBLE:
            raise ConvexProgramInfeasible(f"no point of P has degree cost <= {budget}")
        if res.status != Status.OPTIMAL:
            raise RuntimeError(f"convex program: LP {res.status.value}")
        x = res.x
        xmap = {e.id: x[g.index[e.id]] for e in g.edges}
        deg = degrees(g, xmap)
        cost = sum((f_value(deg[v], p) for v in g.vertices), Fraction(0))
        if cost <= limit:
            obj = sum((g.costs[e] * xmap[e] for e in xmap), Fraction(0))
            return ConvexProgramSolution(xmap, obj, cost, budget, p, eps,
                                         cuts=session.cuts, rounds=rounds, degrees=deg, lp=session.lp)
        new_rows = []
        for v in g.vertices:
            dv, tv = deg[v], x[t_index[v]]
            if f_value(dv, p) <= tv:
                continue
            a = dv.limit_denominator(1 << 20)
            if a <= 1 < dv or f_value(a, p) + f_subgradient(a, p) * (dv - a) <= tv:
                a = dv
            slope = f_subgradient(a, p)
            coefs = {g.index[e]: slope for e in g.incident[v]}
            coefs[t_index[v]] = -1
            new_rows.append(Row.make(coefs, "<=", slope * a - f_value(a, p), f"tan[{v}]@{a}"))
        tangents += len(new_rows)
        session.add_rows(new_rows)
    raise RuntimeError("convex program did not reach the requested tolerance")


def initial_bounds(g: Graph, x: Mapping) -> dict:
    """Degree bounds ``B_v = max(x(delta(v)), 1)``."""
    deg = degrees(g, x)
    return {v: max(deg[v], Fraction(1)) for v in g.vertices}
