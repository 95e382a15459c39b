"""Exhaustive reference solvers for small instances."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

from .graph import Graph, Requirements, degree_power_sum, degrees, id_key, verify_requirements
from .partition import UnionFind
from .treelabel import LabelTreeInstance

EDGE_CAP = 18
LABELING_CAP = 10 ** 6


class OracleTooLarge(ValueError):
    pass


@dataclass
class OracleResult:
    value: Fraction | float  # math.inf when infeasible
    witness: object
    enumerated: int

    @property
    def feasible(self) -> bool:
        return self.value != math.inf


def _subsets_by_rank(m: int):
    """All subsets of ``range(m)``, ordered by size then lexicographically."""
    for size in range(m + 1):
        yield from itertools.combinations(range(m), size)


def brute_snd(g: Graph, r: Requirements, p: int, A=None, budget=None, cap: int = EDGE_CAP) -> OracleResult:
    """Cheapest subgraph meeting the requirements with ``sum_v d(v)^p <= A^p``.

    Ties go to the lexicographically smallest sorted list of edge ids.
    """
    from .relaxation import power_budget
    m = len(g.edges)
    if m > cap:
        raise OracleTooLarge(f"{m} edges exceeds the cap of {cap}")
    if budget is None:
        budget = power_budget(A, p)
    budget = Fraction(budget)
    best, witness, count = math.inf, None, 0
    for combo in _subsets_by_rank(m):
        count += 1
        ids = [g.edges[i].id for i in combo]
        cost = g.cost(ids)
        if cost > best:
            continue
        if degree_power_sum(degrees(g, ids), p) > budget:
            continue
        if not verify_requirements(g, ids, r):
            continue
        key = sorted(ids, key=id_key)
        if cost < best or [id_key(e) for e in key] < [id_key(e) for e in witness]:
            best, witness = cost, key
    return OracleResult(best, witness, count)


def brute_gst(g: Graph, root, groups, degree_bounds, cap: int = EDGE_CAP) -> OracleResult:
    """Cheapest subgraph joining ``root`` to every group within the degree bounds."""
    m = len(g.edges)
    if m > cap:
        raise OracleTooLarge(f"{m} edges exceeds the cap of {cap}")
    groups = [frozenset(s) for s in groups]
    index = {v: i for i, v in enumerate(g.vertices)}
    ends = [(index[e.u], index[e.v]) for e in g.edges]
    costs = [g.costs[e.id] for e in g.edges]
    db = [degree_bounds.get(v, math.inf) for v in g.vertices]
    ridx = index[root]
    gidx = [[index[s] for s in grp] for grp in groups]
    best, witness, count = math.inf, None, 0
    for combo in _subsets_by_rank(m):
        count += 1
        cost = sum((costs[i] for i in combo), Fraction(0))
        if cost > best:
            continue
        deg = [0] * len(db)
        for i in combo:
            a, b = ends[i]
            deg[a] += 1
            deg[b] += 1
        if any(d > lim for d, lim in zip(deg, db)):
            continue
        uf = UnionFind(range(len(db)))
        for i in combo:
            uf.union(*ends[i])
        rr = uf.find(ridx)
        if not all(any(uf.find(s) == rr for s in grp) for grp in gidx):
            continue
        ids = sorted((g.edges[i].id for i in combo), key=id_key)
        if cost < best or [id_key(e) for e in ids] < [id_key(e) for e in witness]:
            best, witness = cost, ids
    return OracleResult(best, witness, count)


def brute_labeling(inst: LabelTreeInstance, cap: int = LABELING_CAP) -> OracleResult:
    """First valid labeling in lexicographic order (node order, then label order), if any.

    The value is 0 for a feasible instance and ``math.inf`` otherwise.
    """
    nodes = inst.nodes()
    total = 1
    for u in nodes:
        total *= len(inst.labels[u])
    if total > cap:
        raise OracleTooLarge(f"{total} labelings exceeds the cap of {cap}")
    options = [sorted(inst.labels[u], key=id_key) for u in nodes]
    count = 0
    for combo in itertools.product(*options):
        count += 1
        labeling = dict(zip(nodes, combo))
        if inst.is_valid(labeling):
            return OracleResult(Fraction(0), labeling, count)
    return OracleResult(math.inf, None, count)


def consistent_labelings(inst: LabelTreeInstance, cap: int = LABELING_CAP) -> list[dict]:
    """Every consistent labeling, by plain enumeration of the label product."""
    nodes = inst.nodes()
    total = 1
    for u in nodes:
        total *= len(inst.labels[u])
    if total > cap:
        raise OracleTooLarge(f"{total} labelings exceeds the cap of {cap}")
    out = []
    for combo in itertools.product(*[inst.labels[u] for u in nodes]):
        labeling = dict(zip(nodes, combo))
        if inst.is_consistent(labeling):
            out.append(labeling)
    return out
