"""Tree labeling: super-tree construction, its LP relaxation and randomized rounding."""
from __future__ import annotations

import math
import random
import statistics
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Iterable, Mapping

from .graph import id_key
from .lp import LinearProgram, Row, SimplexSession, Status, to_mpq
from .stats import trial_rng

SELECTOR = "selector"
COPIER = "copier"
LEAF = "leaf"


class InfeasibleInstance(Exception):
    """The tree labeling LP (or the instance itself) has no feasible point."""


class SuperTreeTooLarge(Exception):
    pass


@dataclass
class LabelTreeInstance:
    """Rooted tree whose internal nodes have one or two children, labels per node,
    allowed label tuples per internal node, covering groups and cost tables.

    ``gamma[u]`` holds tuples ``(l_u, l_child1[, l_child2])`` in the order of ``children[u]``.
    ``costs[i]`` maps labels to a cost in ``[0, 1]``; absent labels cost 0.
    """

    root: Hashable
    children: dict
    labels: dict
    gamma: dict = field(default_factory=dict)
    groups: list = field(default_factory=list)
    costs: list = field(default_factory=list)

    def __post_init__(self):
        self.children = {u: tuple(self.children.get(u, ())) for u in self.labels}
        self.labels = {u: tuple(ls) for u, ls in self.labels.items()}
        self.gamma = {u: set(map(tuple, ts)) for u, ts in self.gamma.items()}
        self.groups = [frozenset(s) for s in self.groups]
        self.costs = [{l: Fraction(c) for l, c in table.items()} for table in self.costs]
        self.validate()

    def validate(self) -> None:
        if self.root not in self.labels:
            raise ValueError("root has no label set")
        owner: dict = {}
        for u, ls in self.labels.items():
            for l in ls:
                if l in owner:
                    raise ValueError(f"label {l!r} is shared by nodes {owner[l]!r} and {u!r}")
                owner[l] = u
        self.owner = owner
        seen = {self.root}
        stack = [self.root]
        while stack:
            u = stack.pop()
            kids = self.children[u]
            if len(kids) > 2:
                raise ValueError(f"node {u!r} has more than two children")
            for v in kids:
                if v in seen or v not in self.labels:
                    raise ValueError(f"child {v!r} of {u!r} is repeated or unknown")
                seen.add(v)
                stack.append(v)
            if kids:
                for tup in self.gamma.get(u, ()):
                    if len(tup) != 1 + len(kids) or owner.get(tup[0]) != u or any(
                            owner.get(l) != v for l, v in zip(tup[1:], kids)):
                        raise ValueError(f"tuple {tup!r} does not match node {u!r}")
        if seen != set(self.labels):
            raise ValueError("label sets given for nodes outside the tree")
        for table in self.costs:
            for l, c in table.items():
                if not 0 <= c <= 1:
                    raise ValueError(f"cost of label {l!r} outside [0, 1]")

    # -- derived quantities ----------------------------------------------------------------

    def nodes(self) -> list:
        out, stack = [], [self.root]
        while stack:
            u = stack.pop()
            out.append(u)
            stack.extend(reversed(self.children[u]))
        return out

    @property
    def depth(self) -> int:
        best, stack = 0, [(self.root, 0)]
        while stack:
            u, d = stack.pop()
            best = max(best, d)
            stack.extend((v, d + 1) for v in self.children[u])
        return best

    @property
    def max_labels(self) -> int:
        return max(len(ls) for ls in self.labels.values())

    # -- labelings ---------------------------------------------------------------------------

    def is_consistent(self, labeling: Mapping) -> bool:
        for u in self.labels:
            if labeling.get(u) not in self.labels[u]:
                return False
            kids = self.children[u]
            if kids and (labeling[u],) + tuple(labeling[v] for v in kids) not in self.gamma.get(u, ()):
                return False
        return True

    def covers(self, labeling: Mapping, t: int) -> bool:
        group = self.groups[t]
        return any(l in group for l in labeling.values())

    def cost(self, labeling: Mapping, i: int) -> Fraction:
        table = self.costs[i]
        return sum((table.get(l, Fraction(0)) for l in labeling.values()), Fraction(0))

    def is_valid(self, labeling: Mapping) -> bool:
        return (self.is_consistent(labeling)
                and all(self.covers(labeling, t) for t in range(len(self.groups)))
                and all(self.cost(labeling, i) <= 1 for i in range(len(self.costs))))


def _alive_labels(inst: LabelTreeInstance) -> tuple[dict, dict]:
    """Labels with at least one consistent completion below them, and the usable tuples."""
    alive: dict = {}
    usable: dict = {}
    for u in reversed(inst.nodes()):
        kids = inst.children[u]
        if not kids:
            alive[u] = set(inst.labels[u])
            continue
        tuples = sorted((t for t in inst.gamma.get(u, ())
                         if all(l in alive[v] for l, v in zip(t[1:], kids))), key=lambda t: tuple(map(id_key, t)))
        usable[u] = {}
        for t in tuples:
            usable[u].setdefault(t[0], []).append(t[1:])
        alive[u] = set(usable[u])
    return alive, usable


class SuperTree:
    """Selector/copier tree whose consistent sub-trees are exactly the consistent labelings.

    Node 0 is the root selector. Every other selector or leaf carries a tree node
    ``u`` and a label of ``u``; copiers carry the tree node of their parent
    selector and the tuple they stand for.
    """

    def __init__(self, inst: LabelTreeInstance, max_nodes: int = 200_000):
        self.inst = inst
        alive, usable = _alive_labels(inst)
        self.pruned = sum(len(inst.labels[u]) - len(alive[u]) for u in inst.labels)
        size = self.count_nodes(inst, alive, usable)
        if size > max_nodes:
            raise SuperTreeTooLarge(f"super-tree would have {size} nodes (cap {max_nodes})")
        self.kind: list[str] = [SELECTOR]
        self.tnode: list = [inst.root]
        self.label: list = [None]
        self.parent: list[int] = [-1]
        self.children: list[list[int]] = [[]]
        self.depth: list[int] = [0]
        stack = []
        for l in sorted(alive[inst.root], key=id_key):
            stack.append((self._add(0, inst.root, l), inst.root, l))
        while stack:
            p, u, l = stack.pop()
            kids = inst.children[u]
            if not kids:
                self.kind[p] = LEAF
                continue
            for tail in usable[u].get(l, ()):
                c = self._add(p, u, (l,) + tail, COPIER)
                for v, lv in zip(kids, tail):
                    stack.append((self._add(c, v, lv), v, lv))
        self.size = len(self.kind)
        self.costs = [[table.get(self.label[p], Fraction(0)) if self.kind[p] != COPIER and p else Fraction(0)
                       for p in range(self.size)] for table in inst.costs]
        self.groups = [[p for p in range(1, self.size) if self.kind[p] != COPIER and self.label[p] in group]
                       for group in inst.groups]

    @staticmethod
    def count_nodes(inst: LabelTreeInstance, alive=None, usable=None) -> int:
        if alive is None:
            alive, usable = _alive_labels(inst)
        count: dict = {}
        for u in reversed(inst.nodes()):
            kids = inst.children[u]
            for l in alive[u]:
                total = 1
                if kids:
                    for tail in usable[u].get(l, ()):
                        total += 1 + sum(count[v, lv] for v, lv in zip(kids, tail))
                count[u, l] = total
        return 1 + sum(count[inst.root, l] for l in alive[inst.root])

    def _add(self, parent: int, u, label, kind: str = SELECTOR) -> int:
        p = len(self.kind)
        self.kind.append(kind)
        self.tnode.append(u)
        self.label.append(label)
        self.parent.append(parent)
        self.children.append([])
        self.depth.append(self.depth[parent] + 1)
        self.children[parent].append(p)
        return p

    def preorder(self) -> list[int]:
        out, stack = [], [0]
        while stack:
            p = stack.pop()
            out.append(p)
            stack.extend(reversed(self.children[p]))
        return out

    def ancestors(self, p: int):
        p = self.parent[p]
        while p >= 0:
            yield p
            p = self.parent[p]

    # -- sub-trees and labelings ----------------------------------------------------------

    def is_consistent_subtree(self, nodes: Iterable[int]) -> bool:
        nodes = set(nodes)
        if 0 not in nodes:
            return False
        for p in nodes:
            if p and self.parent[p] not in nodes:
                return False
            inside = [q for q in self.children[p] if q in nodes]
            if self.kind[p] == SELECTOR and len(inside) != 1:
                return False
            if self.kind[p] == COPIER and len(inside) != len(self.children[p]):
                return False
        return True

    def to_labeling(self, nodes: Iterable[int]) -> dict:
        nodes = set(nodes)
        if not self.is_consistent_subtree(nodes):
            raise ValueError("sub-tree is not consistent")
        out = {}
        for p in nodes:
            if p and self.kind[p] != COPIER:
                out[self.tnode[p]] = self.label[p]
        return out

    def to_subtree(self, labeling: Mapping) -> frozenset:
        inst = self.inst
        nodes = {0}
        frontier = [q for q in self.children[0] if self.label[q] == labeling.get(inst.root)]
        if len(frontier) != 1:
            raise ValueError("labeling does not match the super-tree")
        while frontier:
            p = frontier.pop()
            nodes.add(p)
            u = self.tnode[p]
            kids = inst.children[u]
            if not kids:
                continue
            want = (labeling[u],) + tuple(labeling[v] for v in kids)
            match = [c for c in self.children[p] if self.label[c] == want]
            if len(match) != 1:
                raise ValueError(f"labeling is inconsistent at {u!r}")
            nodes.add(match[0])
            frontier.extend(self.children[match[0]])
        return frozenset(nodes)

    def subtree_cost(self, nodes: Iterable[int], i: int) -> Fraction:
        return sum((self.costs[i][p] for p in nodes), Fraction(0))


def build_supertree(inst: LabelTreeInstance, max_nodes: int = 200_000) -> SuperTree:
    return SuperTree(inst, max_nodes)


@dataclass
class FractionalSubtree:
    x: list
    y: list
    value: Fraction
    rows: int
    cuts: int


def _fractional_lp(st: SuperTree):
    """Variables: the root's label nodes, every copier, then one ``y`` per group node.

    A label node below a copier shares the copier's variable, which encodes the
    copier equalities. ``y`` is kept only on group nodes with no group ancestor:
    an integral sub-tree always contains the topmost group node on its path, so
    every consistent covering sub-tree is still feasible, and any point of this
    LP is a point of the full LP with the other ``y`` set to zero.
    """
    var = [-1] * st.size
    names = []
    order = st.preorder()
    for p in order:
        if p == 0:
            continue
        if st.kind[p] == COPIER or st.parent[p] == 0:
            var[p] = len(names)
            names.append(f"x{p}")
        else:
            var[p] = var[st.parent[p]]
    nx = len(names)
    ygroups = []
    for t, group in enumerate(st.groups):
        members = set(group)
        keep = [q for q in group if not any(a in members for a in st.ancestors(q))]
        ygroups.append({})
        for q in keep:
            ygroups[t][q] = len(names)
            names.append(f"y{t}_{q}")
    lp = LinearProgram(len(names), 1, names)
    lp.add_row({var[q]: 1 for q in st.children[0]}, "==", 1, "root")
    for p in order:
        if p and st.kind[p] == SELECTOR:
            coefs = {var[c]: 1 for c in st.children[p]}
            coefs[var[p]] = coefs.get(var[p], 0) - 1
            lp.add_row(coefs, "==", 0, f"sel{p}")
    for t, ys in enumerate(ygroups):
        if not ys:
            raise InfeasibleInstance(f"group {t} has no label in any consistent labeling")
        lp.add_row({j: 1 for j in ys.values()}, "==", 1, f"cover{t}")
    obj = [Fraction(0)] * len(names)
    for p in range(1, st.size):
        w = sum((c[p] for c in st.costs), Fraction(0))
        if w:
            obj[var[p]] += w
    lp.set_objective(obj)

    post = list(reversed(order))
    parent = st.parent
    sparse_costs = [[(p, to_mpq(c)) for p, c in enumerate(costs) if c] for costs in st.costs]
    ONE = to_mpq(1)

    def separate(x) -> list[Row]:
        xq = [to_mpq(v) for v in x]
        value = [ONE] + [xq[var[p]] for p in range(1, st.size)]
        found = []
        # bottom-up sums: each node adds its own term, then passes the total to its parent
        for t, ys in enumerate(ygroups):
            z = [to_mpq(0)] * st.size
            for q, j in ys.items():
                z[q] = xq[j]
            for p in post:
                if z[p] > value[p]:
                    found.append((z[p] - value[p], p, t, "pack"))
                if p:
                    z[parent[p]] += z[p]
        for i, terms in enumerate(sparse_costs):
            acc = [to_mpq(0)] * st.size
            for q, c in terms:
                acc[q] = c * value[q]
            for p in post:
                if acc[p] > value[p]:
                    found.append((acc[p] - value[p], p, i, "cost"))
                if p:
                    acc[parent[p]] += acc[p]
        found.sort(key=lambda item: (-item[0], item[1], item[2], item[3]))
        rows = []
        for _, p, idx, kind in found[:200]:
            sub = _descendants(st, p)
            if kind == "pack":
                coefs = {ygroups[idx][q]: 1 for q in sub if q in ygroups[idx]}
            else:
                coefs = {}
                for q in sub:
                    c = st.costs[idx][q]
                    if c:
                        coefs[var[q]] = coefs.get(var[q], 0) + c
            if p == 0:
                rows.append(Row.make(coefs, "<=", 1, f"{kind}{idx}@{p}"))
            else:
                coefs[var[p]] = coefs.get(var[p], 0) - 1
                rows.append(Row.make(coefs, "<=", 0, f"{kind}{idx}@{p}"))
        return rows

    lp.separators.append(separate)
    return lp, var, ygroups


def _descendants(st: SuperTree, p: int) -> list[int]:
    out, stack = [], [p]
    while stack:
        q = stack.pop()
        out.append(q)
        stack.extend(st.children[q])
    return out


def solve_fractional(st: SuperTree, spread: int = 0, seed: int = 0) -> FractionalSubtree:
    """Exact point of the super-tree LP.

    The base point minimizes ``sum_p x_p * sum_i c^i_p``. With ``spread > 0`` the
    result is the average of that vertex and ``spread`` further vertices found
    with random integer objectives; any feasible point carries the rounding
    guarantees, and an averaged point exercises them with genuinely fractional
    selector choices.
    """
    lp, var, ygroups = _fractional_lp(st)
    session = SimplexSession(lp)
    res = session.solve()
    if res.status == Status.INFEASIBLE:
        raise InfeasibleInstance("tree labeling LP is infeasible")
    if res.status != Status.OPTIMAL:
        raise RuntimeError(f"tree labeling LP: {res.status.value}")
    points = [res.x]
    cuts = res.cuts
    rng = random.Random(seed)
    for _ in range(spread):
        other = lp.copy()
        other.set_objective([rng.randint(-9, 9) for _ in range(lp.num_vars)])
        extra = SimplexSession(other).solve()
        if extra.status != Status.OPTIMAL:
            raise RuntimeError(f"tree labeling LP: {extra.status.value}")
        points.append(extra.x)
        cuts += extra.cuts
    k = len(points)
    point = [sum((pt[j] for pt in points), Fraction(0)) / k for j in range(lp.num_vars)]
    value = sum((c * v for c, v in zip(lp.objective, point)), Fraction(0))
    x = [Fraction(1)] + [point[var[p]] for p in range(1, st.size)]
    y = [{q: point[j] for q, j in ys.items() if point[j]} for ys in ygroups]
    return FractionalSubtree(x, y, value, len(lp.rows), cuts)


def check_fractional(st: SuperTree, frac: FractionalSubtree) -> list[str]:
    """Every LP row of the full formulation, checked exactly; returns the names of failures."""
    x, bad = frac.x, []
    if x[0] != 1:
        bad.append("root")
    for p in range(st.size):
        if x[p] < 0:
            bad.append(f"nonneg{p}")
        kids = st.children[p]
        if not kids:
            continue
        if st.kind[p] == SELECTOR and sum((x[q] for q in kids), Fraction(0)) != x[p]:
            bad.append(f"sel{p}")
        if st.kind[p] == COPIER and any(x[q] != x[p] for q in kids):
            bad.append(f"copy{p}")
    post = list(reversed(st.preorder()))
    for t, ys in enumerate(frac.y):
        if sum(ys.values(), Fraction(0)) != 1:
            bad.append(f"cover{t}")
        members = set(st.groups[t])
        if any(q not in members for q in ys):
            bad.append(f"support{t}")
        z = [Fraction(0)] * st.size
        for p in post:
            z[p] = ys.get(p, Fraction(0)) + sum((z[q] for q in st.children[p]), Fraction(0))
            if z[p] > x[p]:
                bad.append(f"pack{t}@{p}")
    for i, costs in enumerate(st.costs):
        w = [Fraction(0)] * st.size
        for p in post:
            w[p] = costs[p] * x[p] + sum((w[q] for q in st.children[p]), Fraction(0))
            if w[p] > x[p]:
                bad.append(f"cost{i}@{p}")
    return bad


class Rounder:
    """Top-down randomized rounding: a selector keeps one child with probability
    ``x_q / x_p``; copiers keep all children."""

    def __init__(self, st: SuperTree, frac: FractionalSubtree):
        self.st = st
        self.cumulative: dict[int, tuple[list[float], list[int]]] = {}
        for p in range(st.size):
            if st.kind[p] == SELECTOR and st.children[p] and frac.x[p] > 0:
                kids = [q for q in st.children[p] if frac.x[q] > 0]
                acc, cum = Fraction(0), []
                for q in kids:
                    acc += frac.x[q]
                    cum.append(float(acc / frac.x[p]))
                self.cumulative[p] = (cum, kids)

    def sample(self, rng) -> frozenset:
        st = self.st
        nodes, stack = [], [0]
        while stack:
            p = stack.pop()
            nodes.append(p)
            if st.kind[p] == SELECTOR and st.children[p]:
                cum, kids = self.cumulative[p]
                u = rng.random()
                for c, q in zip(cum, kids):
                    if u < c:
                        break
                stack.append(q)
            else:
                stack.extend(st.children[p])
        return frozenset(nodes)


def recursive_rounding(st: SuperTree, frac: FractionalSubtree, rng) -> frozenset:
    return Rounder(st, frac).sample(rng)


def alpha_table(D: int, s: float | None = None) -> list[float]:
    """``alpha_0 = e^s`` and ``alpha_h = exp(alpha_{h-1} - 1)`` with ``s = ln(1 + 1/(2D))`` by default."""
    if D < 1:
        raise ValueError("D must be at least 1")
    if s is None:
        s = math.log1p(1 / (2 * D))
    table = [math.exp(s)]
    for _ in range(D):
        table.append(math.exp(table[-1] - 1))
    return table


def alpha_table_ok(D: int, tol: float = 1e-12) -> bool:
    return all(a <= 1 + 1 / (2 * D - h) + tol for h, a in enumerate(alpha_table(D)))


def wilson_interval(successes: int, n: int, confidence: float = 0.99) -> tuple[float, float]:
    z = statistics.NormalDist().inv_cdf(0.5 + confidence / 2)
    if n == 0:
        return 0.0, 1.0
    phat = successes / n
    denom = 1 + z * z / n
    centre = (phat + z * z / (2 * n)) / denom
    half = z * math.sqrt(phat * (1 - phat) / n + z * z / (4 * n * n)) / denom
    return centre - half, centre + half


@dataclass
class GuaranteeReport:
    D: int
    trials: int
    coverage: list
    coverage_lower: list
    exp_moment: list
    exp_half_width: list
    max_marginal_z: float
    marginal_violations: int
    inconsistent: int
    alpha_ok: bool

    def coverage_ok(self, slack: float = 0.0) -> bool:
        return all(lo >= 1 / self.D - slack for lo in self.coverage_lower)

    def moment_ok(self) -> bool:
        bound = 1 + 1 / self.D
        return all(m <= bound + h for m, h in zip(self.exp_moment, self.exp_half_width))

    def marginals_ok(self) -> bool:
        return self.marginal_violations == 0


def verify_guarantees(st: SuperTree, frac: FractionalSubtree, trials: int, seed: int = 0,
                      confidence: float = 0.99, k_sigma: float = 4.0) -> GuaranteeReport:
    """Monte-Carlo check of coverage, exponential cost moments and node marginals."""
    inst = st.inst
    D = max(inst.depth, 1)
    s = math.log1p(1 / (2 * D))
    rounder = Rounder(st, frac)
    hits = [0] * len(st.groups)
    group_sets = [set(g) for g in st.groups]
    moments = [[] for _ in st.costs]
    visits = [0] * st.size
    inconsistent = 0
    for trial in range(trials):
        nodes = rounder.sample(trial_rng(seed, trial))
        if not st.is_consistent_subtree(nodes):
            inconsistent += 1
        for p in nodes:
            visits[p] += 1
        for t, g in enumerate(group_sets):
            if not g.isdisjoint(nodes):
                hits[t] += 1
        for i, costs in enumerate(st.costs):
            moments[i].append(math.exp(s * float(sum((costs[p] for p in nodes), Fraction(0)))))
    z = statistics.NormalDist().inv_cdf(0.5 + confidence / 2)
    lower = [wilson_interval(h, trials, confidence)[0] for h in hits]
    means = [statistics.fmean(m) for m in moments]
    halves = [z * statistics.stdev(m) / math.sqrt(trials) if trials > 1 else math.inf for m in moments]
    max_z, bad = 0.0, 0
    for p in range(st.size):
        mu = float(frac.x[p])
        freq = visits[p] / trials
        var = mu * (1 - mu)
        if var <= 0:
            if abs(freq - mu) > 0:
                bad += 1
            continue
        zz = abs(freq - mu) / math.sqrt(var / trials)
        max_z = max(max_z, zz)
        if zz > k_sigma:
            bad += 1
    return GuaranteeReport(D, trials, [h / trials for h in hits], lower, means, halves, max_z, bad,
                           inconsistent, alpha_table_ok(D))
