"""Randomized iterative rounding of a fractional point of a good polytope."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping

from .graph import Graph, degrees, id_key
from .lp import ConvexCombination, caratheodory_decompose, sample_extreme
from .relaxation import GoodPolytope

INF = math.inf


class IntegralityViolation(Exception):
    """A fractional extreme point admits neither a ROUND nor a RELAX event."""


@dataclass(frozen=True)
class Event:
    kind: str  # "integral", "round" or "relax"
    target: object = None
    value: Fraction | None = None
    fallback: bool = False


def detect_event(g: Graph, x: Mapping, bounds: Mapping, alpha, beta, fallback_beta=None) -> Event:
    """Classify an extreme point: integral, an edge to round, or a vertex to relax.

    Rounding is preferred. Among eligible edges the largest ``x_e`` wins, then
    the smallest id; among relaxable vertices the smallest support wins, then
    the smallest id. With ``fallback_beta`` set, a point with no event under
    ``beta`` is retried with the looser slack and the event is marked ``fallback``.
    """
    frac = [e for e in g.edges if 0 < x[e.id] < 1]
    if not frac:
        return Event("integral")
    lo = 1 / Fraction(alpha)
    eligible = [e for e in frac if x[e.id] >= lo]
    if eligible:
        e = min(eligible, key=lambda e: (-x[e.id], id_key(e.id)))
        return Event("round", e.id, x[e.id])
    relax = _relax_candidate(g, x, bounds, beta)
    if relax is None and fallback_beta is not None:
        relax = _relax_candidate(g, x, bounds, fallback_beta)
        if relax is not None:
            return Event("relax", relax[0], Fraction(relax[1]), fallback=True)
    if relax is None:
        raise IntegralityViolation("fractional extreme point with no ROUND or RELAX event: "
                                   + repr({e: str(val) for e, val in x.items() if val}))
    return Event("relax", relax[0], Fraction(relax[1]))


def _relax_candidate(g: Graph, x: Mapping, bounds: Mapping, beta):
    best = None
    for v in g.vertices:
        b = bounds[v]
        if b == INF:
            continue
        load = sum((x[e] for e in g.incident[v]), Fraction(0))
        if load != b:
            continue
        support = sum(1 for e in g.incident[v] if x[e] > 0)
        if support <= b + beta:
            key = (support, id_key(v))
            if best is None or key < best[0]:
                best = (key, v, support)
    return None if best is None else best[1:]


@dataclass
class TraceStep:
    t: int
    x: tuple
    xbar: tuple
    bounds: tuple
    event: Event


@dataclass
class RoundingResult:
    edges: frozenset
    x: dict
    iterations: int
    events: list[Event] = field(default_factory=list)
    trace: list[TraceStep] = field(default_factory=list)
    rounded: frozenset = frozenset()
    relaxed: frozenset = frozenset()

    @property
    def fallbacks(self) -> int:
        return sum(1 for ev in self.events if ev.fallback)


Sampler = Callable[[ConvexCombination, object], tuple]


class RoundingEngine:
    """Runs the rounding loop on one polytope, caching decompositions per state ``(x, B)``.

    The decomposition of a state is deterministic, so all randomness comes from
    the generator passed to :meth:`run` and cached results are reused safely.
    """

    def __init__(self, polytope: GoodPolytope, cache: bool = True, max_cache: int = 20000,
                 fallback_beta=None):
        self.polytope = polytope
        self.fallback_beta = fallback_beta
        self.graph = polytope.graph
        self.alpha = polytope.alpha
        self.beta = polytope.beta
        self.cache = cache
        self.max_cache = max_cache
        self._combos: dict = {}
        self._lps: dict = {}

    def _lp(self, bkey: tuple):
        lp = self._lps.get(bkey)
        if lp is None:
            bounds = dict(zip(self.graph.vertices, bkey))
            lp = self.polytope.linear_program(bounds)
            if self.cache and len(self._lps) < self.max_cache:
                self._lps[bkey] = lp
        return lp

    def decompose(self, x: tuple, bounds: Mapping) -> ConvexCombination:
        bkey = tuple(bounds[v] for v in self.graph.vertices)
        key = (x, bkey)
        comb = self._combos.get(key)
        if comb is None:
            comb = caratheodory_decompose(self._lp(bkey), x, seed=0)
            if self.cache and len(self._combos) < self.max_cache:
                self._combos[key] = comb
        return comb

    def run(self, x0: Mapping, rng, bounds: Mapping | None = None, sampler: Sampler | None = None,
            record: bool = True) -> RoundingResult:
        g = self.graph
        ids = [e.id for e in g.edges]
        x = {e: Fraction(x0[e]) for e in ids}
        if bounds is None:
            deg = degrees(g, x)
            bounds = {v: max(deg[v], Fraction(1)) for v in g.vertices}
        bounds = {v: (INF if b == INF else Fraction(b)) for v, b in bounds.items()}
        xbar = dict(x)
        rounded, relaxed = set(), set()
        events, trace = [], []
        sampler = sampler or sample_extreme
        if record:
            trace.append(TraceStep(0, tuple(x[e] for e in ids), tuple(xbar[e] for e in ids),
                                   tuple(bounds[v] for v in g.vertices), Event("start")))
        for t in range(1, 2 * (len(ids) + len(g.vertices)) + 2):
            comb = self.decompose(tuple(x[e] for e in ids), bounds)
            point = sampler(comb, rng)
            x = dict(zip(ids, point))
            for e in ids:
                if e not in rounded:
                    xbar[e] = x[e]
            event = detect_event(g, x, bounds, self.alpha, self.beta, self.fallback_beta)
            if event.kind == "round":
                e = g.edge_by_id[event.target]
                x[e.id] = Fraction(1)
                rounded.add(e.id)
                for w in (e.u, e.v):
                    if bounds[w] != INF:
                        bounds[w] = sum((x[f] for f in g.incident[w]), Fraction(0))
            elif event.kind == "relax":
                bounds[event.target] = INF
                relaxed.add(event.target)
            events.append(event)
            if record:
                trace.append(TraceStep(t, tuple(x[e] for e in ids), tuple(xbar[e] for e in ids),
                                       tuple(bounds[v] for v in g.vertices), event))
            if event.kind == "integral":
                chosen = frozenset(e for e in ids if x[e] == 1)
                return RoundingResult(chosen, x, t, events, trace, frozenset(rounded), frozenset(relaxed))
        raise RuntimeError("rounding loop exceeded its iteration bound")


def round_loop(x0: Mapping, polytope: GoodPolytope, rng, bounds: Mapping | None = None,
               sampler: Sampler | None = None) -> RoundingResult:
    """One run of the rounding loop from ``x0`` (see :class:`RoundingEngine`)."""
    return RoundingEngine(polytope, cache=False).run(x0, rng, bounds, sampler)


def cheapest_point_sampler(costs: list) -> Sampler:
    """A deliberately biased sampler that always returns the cheapest point of the combination."""
    def pick(comb: ConvexCombination, rng) -> tuple:
        rng.random()
        return min(comb.points, key=lambda pt: (sum(c * v for c, v in zip(costs, pt)), pt))
    return pick


@dataclass
class DegreeCertificate:
    vertex: object
    fractional_degree: Fraction
    degree: int
    bound: Fraction
    ok: bool


def degree_certificates(g: Graph, x0: Mapping, edges, alpha, beta) -> list[DegreeCertificate]:
    """Per-vertex check of ``deg_H(v) <= alpha*x0(delta(v)) + beta`` (``alpha + beta`` when ``x0(delta(v)) < 1``)."""
    frac = degrees(g, {e: Fraction(v) for e, v in x0.items()})
    deg = degrees(g, list(edges))
    out = []
    for v in g.vertices:
        d0 = frac[v]
        bound = alpha * d0 + beta if d0 >= 1 else Fraction(alpha + beta)
        out.append(DegreeCertificate(v, d0, deg[v], Fraction(bound), deg[v] <= bound))
    return out


@dataclass
class MartingaleReport:
    runs: int
    checks: int
    max_z: float
    violations: list
    exact_mismatches: int

    @property
    def ok(self) -> bool:
        return not self.violations and not self.exact_mismatches


def check_martingale(traces: list[list[tuple]], start: tuple, k: float = 4.0) -> MartingaleReport:
    """Compare per-iteration means of the frozen vectors against their starting values.

    ``traces`` holds one list of ``xbar`` tuples per run. Shorter runs are padded
    with their final vector. Each coordinate lies in ``[0, 1]`` with mean ``mu``
    under the null hypothesis, so its standard deviation is at most
    ``sqrt(mu (1 - mu))``; coordinates with ``mu`` in ``{0, 1}`` must match exactly.
    """
    n = len(traces)
    if n == 0:
        raise ValueError("no traces")
    length = max(len(tr) for tr in traces)
    m = len(start)
    mu = [float(v) for v in start]
    max_z, violations, exact, checks = 0.0, [], 0, 0
    for t in range(length):
        sums = [0.0] * m
        for tr in traces:
            vec = tr[t] if t < len(tr) else tr[-1]
            for i in range(m):
                sums[i] += float(vec[i])
        for i in range(m):
            mean = sums[i] / n
            var = mu[i] * (1 - mu[i])
            checks += 1
            if var <= 0:
                if abs(mean - mu[i]) > 1e-12:
                    exact += 1
                continue
            z = abs(mean - mu[i]) / math.sqrt(var / n)
            max_z = max(max_z, z)
            if z > k:
                violations.append((t, i, mean, mu[i], z))
    return MartingaleReport(n, checks, max_z, violations, exact)
