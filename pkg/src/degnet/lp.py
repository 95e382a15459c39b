"""Exact rational linear programming.

The solver is an active-set simplex on the inequality form ``A x >= b``: a basis
is a set of ``n`` linearly independent rows that are tight at the current vertex,
and the columns of the basis inverse are the edge directions leaving that vertex.
All arithmetic runs on ``gmpy2.mpq``; values cross the public API as
``fractions.Fraction``.

Pivoting follows Bland's rule in both the primal and the dual method, so the
solver cannot cycle on degenerate vertices.
"""
from __future__ import annotations

import enum
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

from gmpy2 import mpq

_MPQ = type(mpq(0))
_ZERO = mpq(0)
_ONE = mpq(1)

MAX_PIVOTS = 200_000


def to_mpq(value) -> mpq:
    if isinstance(value, _MPQ):
        return value
    if isinstance(value, Fraction):
        return mpq(value.numerator, value.denominator)
    if isinstance(value, int):
        return mpq(value)
    if isinstance(value, float):
        f = Fraction(value)
        return mpq(f.numerator, f.denominator)
    if isinstance(value, str):
        f = Fraction(value)
        return mpq(f.numerator, f.denominator)
    f = Fraction(value)
    return mpq(f.numerator, f.denominator)


def to_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, _MPQ):
        return Fraction(int(value.numerator), int(value.denominator))
    return Fraction(value)


class Status(enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


class LPError(Exception):
    pass


class DecompositionError(LPError):
    """Raised when a point cannot be written as a convex combination of vertices."""


@dataclass(frozen=True)
class Row:
    """One linear constraint ``sum(coef * x[var]) <sense> rhs`` with sparse coefficients."""

    coefs: tuple[tuple[int, Fraction], ...]
    sense: str
    rhs: Fraction
    name: str = ""

    @classmethod
    def make(cls, coefs: Mapping[int, object] | Iterable[tuple[int, object]],
             sense: str, rhs, name: str = "") -> "Row":
        if sense not in (">=", "<=", "=="):
            raise ValueError(f"unknown row sense {sense!r}")
        items = coefs.items() if isinstance(coefs, Mapping) else coefs
        acc: dict[int, Fraction] = {}
        for var, coef in items:
            acc[var] = acc.get(var, Fraction(0)) + to_fraction(coef)
        packed = tuple(sorted((v, c) for v, c in acc.items() if c != 0))
        return cls(packed, sense, to_fraction(rhs), name)

    def activity(self, x: Sequence) -> Fraction:
        return sum((c * x[v] for v, c in self.coefs), Fraction(0))

    def satisfied(self, x: Sequence) -> bool:
        a = self.activity(x)
        if self.sense == ">=":
            return a >= self.rhs
        if self.sense == "<=":
            return a <= self.rhs
        return a == self.rhs

    def is_tight(self, x: Sequence) -> bool:
        return self.activity(x) == self.rhs

    def __str__(self) -> str:
        terms = " ".join(f"{'+' if c > 0 else '-'} {abs(c)} x{v}" for v, c in self.coefs) or "0"
        label = f"{self.name}: " if self.name else ""
        return f"{label}{terms} {self.sense} {self.rhs}"


Separator = Callable[[Sequence[Fraction]], list[Row]]


class LinearProgram:
    """``min c.x`` over explicit rows, variable bounds and lazily separated rows.

    Every variable has lower bound 0. Upper bounds default to 1; pass ``None``
    (per variable or for all) for an unbounded variable.
    """

    def __init__(self, num_vars: int, upper=1, names: Sequence[str] | None = None):
        self.num_vars = num_vars
        if upper is None or not isinstance(upper, (list, tuple)):
            self.upper = [None if upper is None else to_fraction(upper)] * num_vars
        else:
            if len(upper) != num_vars:
                raise ValueError("upper bound list has the wrong length")
            self.upper = [None if u is None else to_fraction(u) for u in upper]
        self.names = list(names) if names is not None else [f"x{j}" for j in range(num_vars)]
        self.rows: list[Row] = []
        self.objective: list[Fraction] = [Fraction(0)] * num_vars
        self.separators: list[Separator] = []
        self._compiled: list | None = None

    def add_row(self, coefs, sense: str, rhs, name: str = "") -> Row:
        row = coefs if isinstance(coefs, Row) else Row.make(coefs, sense, rhs, name)
        for var, _ in row.coefs:
            if not 0 <= var < self.num_vars:
                raise ValueError(f"row {row.name!r} references unknown variable {var}")
        self.rows.append(row)
        self._compiled = None
        return row

    def add_rows(self, rows: Iterable[Row]) -> None:
        for row in rows:
            self.add_row(row, row.sense, row.rhs)

    def set_objective(self, coefs: Mapping[int, object] | Sequence) -> None:
        obj = [Fraction(0)] * self.num_vars
        items = coefs.items() if isinstance(coefs, Mapping) else enumerate(coefs)
        for j, c in items:
            obj[j] = to_fraction(c)
        self.objective = obj

    def copy(self) -> "LinearProgram":
        other = LinearProgram(self.num_vars, list(self.upper), self.names)
        other.rows = list(self.rows)
        other.objective = list(self.objective)
        other.separators = list(self.separators)
        return other

    def bound_rows(self) -> list[Row]:
        rows = []
        for j in range(self.num_vars):
            rows.append(Row(((j, Fraction(1)),), ">=", Fraction(0), f"lb[{self.names[j]}]"))
            if self.upper[j] is not None:
                rows.append(Row(((j, Fraction(1)),), "<=", self.upper[j], f"ub[{self.names[j]}]"))
        return rows

    def all_rows(self) -> list[Row]:
        return self.bound_rows() + self.rows

    def compiled(self) -> list:
        """Rows in solver form: ``(vars, coefs, rhs, is_eq, name)`` with ``>=`` orientation."""
        if self._compiled is None:
            self._compiled = [_compile(r) for r in self.all_rows()]
        return self._compiled

    def violated_rows(self, x: Sequence[Fraction]) -> list[Row]:
        bad = [r for r in self.all_rows() if not r.satisfied(x)]
        for sep in self.separators:
            bad.extend(sep(x))
        return bad

    def is_feasible(self, x: Sequence[Fraction]) -> bool:
        if len(x) != self.num_vars:
            return False
        if any(not r.satisfied(x) for r in self.all_rows()):
            return False
        return all(not sep(x) for sep in self.separators)

    def dump(self) -> str:
        lines = ["minimize " + (" ".join(
            f"{'+' if c > 0 else '-'} {abs(c)} {self.names[j]}"
            for j, c in enumerate(self.objective) if c) or "0")]
        lines.append("subject to")
        for r in self.rows:
            terms = " ".join(f"{'+' if c > 0 else '-'} {abs(c)} {self.names[v]}" for v, c in r.coefs) or "0"
            lines.append(f"  {r.name or '_'}: {terms} {r.sense} {r.rhs}")
        lines.append("bounds")
        for j in range(self.num_vars):
            ub = "inf" if self.upper[j] is None else str(self.upper[j])
            lines.append(f"  0 <= {self.names[j]} <= {ub}")
        if self.separators:
            lines.append(f"lazy separators: {len(self.separators)}")
        return "\n".join(lines)


def _compile(row: Row):
    vs = tuple(v for v, _ in row.coefs)
    cs = tuple(to_mpq(c) for _, c in row.coefs)
    rhs = to_mpq(row.rhs)
    if row.sense == "<=":
        cs = tuple(-c for c in cs)
        rhs = -rhs
    return (vs, cs, rhs, row.sense == "==", row.name)


def _dot(vs, cs, vec: dict) -> mpq:
    total = _ZERO
    for v, c in zip(vs, cs):
        d = vec.get(v)
        if d is not None:
            total += c * d
    return total


def _dense_dot(vs, cs, x) -> mpq:
    total = _ZERO
    for v, c in zip(vs, cs):
        total += c * x[v]
    return total


class _Engine:
    """Active-set simplex over compiled rows. Equality rows stay in the basis."""

    def __init__(self, n: int, cost: Sequence):
        self.n = n
        self.cost = [to_mpq(c) for c in cost]
        self.rows: list = []
        self.basis: list[int] = []
        self.pos: dict[int, int] = {}
        self.cols: list[dict] = []
        self.fixed: list[bool] = []
        self.x: list | None = None
        self.slack: list = []
        self.pivots = 0

    def add_row(self, compiled) -> int:
        if self.x is not None and compiled[3]:
            # after start-up an equality enters as a pair of inequalities
            vs, cs, rhs, _, name = compiled
            self.add_row((vs, cs, rhs, False, name))
            return self.add_row((vs, tuple(-c for c in cs), -rhs, False, name))
        self.rows.append(compiled)
        if self.x is not None:
            vs, cs, rhs = compiled[0], compiled[1], compiled[2]
            self.slack.append(_dense_dot(vs, cs, self.x) - rhs)
        return len(self.rows) - 1

    # -- linear algebra on the basis -------------------------------------------------

    def _pivot(self, k: int, j: int, w: list) -> None:
        """Replace the basis row at position ``k`` by row ``j``; ``w[i] = a_j . d_i``."""
        wk = w[k]
        dk = {v: val / wk for v, val in self.cols[k].items()}
        for i, wi in enumerate(w):
            if i == k or not wi:
                continue
            di = self.cols[i]
            for v, val in dk.items():
                nv = di.get(v, _ZERO) - wi * val
                if nv:
                    di[v] = nv
                else:
                    di.pop(v, None)
        self.cols[k] = dk
        del self.pos[self.basis[k]]
        self.basis[k] = j
        self.pos[j] = k
        self.fixed[k] = self.rows[j][3]
        self.pivots += 1
        if self.pivots > MAX_PIVOTS:
            raise LPError("pivot limit exceeded")

    def _row_times_cols(self, j: int) -> list:
        vs, cs = self.rows[j][0], self.rows[j][1]
        return [_dot(vs, cs, col) for col in self.cols]

    def _move(self, theta, d: dict, ads: dict) -> None:
        if theta:
            for v, val in d.items():
                self.x[v] += theta * val
            for j, ad in ads.items():
                self.slack[j] += theta * ad

    def _directional(self, d: dict) -> dict:
        ads = {}
        for j, row in enumerate(self.rows):
            ad = _dot(row[0], row[1], d)
            if ad:
                ads[j] = ad
        return ads

    def _duals(self) -> list:
        cost = self.cost
        return [sum((cost[v] * val for v, val in col.items()), _ZERO) for col in self.cols]

    # -- simplex methods ---------------------------------------------------------------

    def primal(self) -> Status:
        while True:
            y = self._duals()
            k_best = None
            for k, yk in enumerate(y):
                if yk < 0 and not self.fixed[k]:
                    if k_best is None or self.basis[k] < self.basis[k_best]:
                        k_best = k
            if k_best is None:
                return Status.OPTIMAL
            d = self.cols[k_best]
            ads = self._directional(d)
            enter, theta = None, None
            for j, ad in ads.items():
                if ad < 0 and j not in self.pos:
                    t = self.slack[j] / -ad
                    if theta is None or t < theta or (t == theta and j < enter):
                        enter, theta = j, t
            if enter is None:
                return Status.UNBOUNDED
            self._move(theta, d, ads)
            self.slack[enter] = _ZERO
            self._pivot(k_best, enter, self._row_times_cols(enter))

    def dual(self) -> Status:
        while True:
            leave_row = next((j for j, s in enumerate(self.slack) if s < 0), None)
            if leave_row is None:
                return Status.OPTIMAL
            w = self._row_times_cols(leave_row)
            y = self._duals()
            k_best, ratio = None, None
            for k, wk in enumerate(w):
                if wk > 0 and not self.fixed[k]:
                    r = y[k] / wk
                    if ratio is None or r < ratio or (r == ratio and self.basis[k] < self.basis[k_best]):
                        k_best, ratio = k, r
            if k_best is None:
                return Status.INFEASIBLE
            d = self.cols[k_best]
            theta = -self.slack[leave_row] / w[k_best]
            ads = self._directional(d)
            self._move(theta, d, ads)
            self.slack[leave_row] = _ZERO
            self._pivot(k_best, leave_row, w)

    def value(self) -> mpq:
        return sum((c * xv for c, xv in zip(self.cost, self.x)), _ZERO)

    def ensure_equalities(self) -> None:
        """Bring every equality row into the basis, dropping redundant ones."""
        for j, row in enumerate(self.rows):
            if not row[3] or j in self.pos:
                continue
            w = self._row_times_cols(j)
            k_best = None
            for k, wk in enumerate(w):
                if wk and not self.fixed[k]:
                    if k_best is None or self.basis[k] < self.basis[k_best]:
                        k_best = k
            if k_best is not None:
                self._pivot(k_best, j, w)

    # -- phase one ---------------------------------------------------------------------

    def start(self) -> bool:
        """Find a feasible vertex. Returns False when the rows are infeasible."""
        n = self.n
        nonneg = {}
        for j, (vs, cs, rhs, eq, _) in enumerate(self.rows):
            if not eq and len(vs) == 1 and cs[0] == 1 and rhs == 0 and vs[0] not in nonneg:
                nonneg[vs[0]] = j
        nonneg_rows = {j: v for v, j in nonneg.items()}
        if len(nonneg) != n:
            raise LPError("every variable needs an explicit lower bound row")

        s = n
        aug = _Engine(n + 1, [0] * n + [1])
        origin = []
        violated = []
        for j, (vs, cs, rhs, eq, name) in enumerate(self.rows):
            for sign in ((1, -1) if eq else (1,)):
                r = rhs if sign == 1 else -rhs
                c2 = cs if sign == 1 else tuple(-c for c in cs)
                v2 = vs
                if r > 0:
                    v2, c2 = vs + (s,), c2 + (_ONE,)
                    violated.append((r, len(aug.rows)))
                aug.rows.append((v2, c2, r, False, name))
                origin.append((j, sign))
        s_row = len(aug.rows)
        aug.rows.append(((s,), (_ONE,), _ZERO, False, "phase1"))
        origin.append((None, 1))

        aug_nonneg = [None] * n
        for idx, (j, sign) in enumerate(origin):
            if j in nonneg_rows:
                aug_nonneg[nonneg_rows[j]] = idx

        if not violated:
            self.x = [_ZERO] * n
            self.basis = [nonneg[v] for v in range(n)]
            self.cols = [{v: _ONE} for v in range(n)]
        else:
            s0, top = max(violated, key=lambda t: (t[0], -t[1]))
            aug.x = [_ZERO] * n + [s0]
            aug.basis = [aug_nonneg[v] for v in range(n)] + [top]
            vs, cs = aug.rows[top][0], aug.rows[top][1]
            coef = dict(zip(vs, cs))
            aug.cols = []
            for v in range(n):
                col = {v: _ONE}
                if coef.get(v):
                    col[s] = -coef[v]
                aug.cols.append(col)
            aug.cols.append({s: _ONE})
            aug.pos = {r: k for k, r in enumerate(aug.basis)}
            aug.fixed = [False] * (n + 1)
            aug.slack = [_dense_dot(r[0], r[1], aug.x) - r[2] for r in aug.rows]
            status = aug.primal()
            self.pivots += aug.pivots
            if status != Status.OPTIMAL or aug.x[s] > 0:
                return False
            if s_row not in aug.pos:
                w = aug._row_times_cols(s_row)
                k = min((k for k, wk in enumerate(w) if wk), key=lambda k: aug.basis[k])
                aug._pivot(k, s_row, w)
            self.x = aug.x[:n]
            self.basis, self.cols = [], []
            for k, r in enumerate(aug.basis):
                if r == s_row:
                    continue
                j, sign = origin[r]
                col = {v: val for v, val in aug.cols[k].items() if v != s}
                if sign == -1:
                    col = {v: -val for v, val in col.items()}
                self.basis.append(j)
                self.cols.append(col)
        self.pos = {r: k for k, r in enumerate(self.basis)}
        self.fixed = [self.rows[r][3] for r in self.basis]
        self.slack = [_dense_dot(r[0], r[1], self.x) - r[2] for r in self.rows]
        self.ensure_equalities()
        return True


@dataclass
class LPResult:
    status: Status
    x: tuple[Fraction, ...] | None = None
    value: Fraction | None = None
    basis: tuple[str, ...] = ()
    pivots: int = 0
    cuts: int = 0

    @property
    def optimal(self) -> bool:
        return self.status == Status.OPTIMAL


class SimplexSession:
    """Warm-startable solve of one ``LinearProgram``.

    Rows found by the separators (or added through :meth:`add_rows`) stay in the
    session; re-solving after adding rows uses the dual simplex from the previous
    optimal basis.
    """

    def __init__(self, lp: LinearProgram, max_rounds: int = 10_000):
        self.lp = lp
        self.max_rounds = max_rounds
        self.engine = _Engine(lp.num_vars, lp.objective)
        for row in lp.compiled():
            self.engine.add_row(row)
        self.started = False
        self.cuts = 0
        self._status: Status | None = None

    def add_rows(self, rows: Iterable[Row]) -> None:
        for row in rows:
            self.lp.add_row(row, row.sense, row.rhs)
            self.engine.add_row(_compile(row))
            self.cuts += 1

    def solve(self) -> LPResult:
        eng = self.engine
        if not self.started:
            self.started = True
            if not eng.start():
                self._status = Status.INFEASIBLE
                return self._result(Status.INFEASIBLE)
            status = eng.primal()
        elif self._status == Status.OPTIMAL:
            eng.ensure_equalities()
            status = eng.dual()
        elif self._status == Status.INFEASIBLE:
            return self._result(Status.INFEASIBLE)
        else:
            self.engine = eng = _Engine(self.lp.num_vars, self.lp.objective)
            for row in self.lp.compiled():
                eng.add_row(row)
            if not eng.start():
                self._status = Status.INFEASIBLE
                return self._result(Status.INFEASIBLE)
            status = eng.primal()
        for _ in range(self.max_rounds):
            if status != Status.OPTIMAL:
                break
            point = tuple(to_fraction(v) for v in eng.x)
            found = []
            for sep in self.lp.separators:
                found.extend(sep(point))
            if not found:
                break
            self.add_rows(found)
            status = eng.dual()
        else:
            raise LPError("separation did not converge")
        self._status = status
        return self._result(status)

    def _result(self, status: Status) -> LPResult:
        eng = self.engine
        if status != Status.OPTIMAL:
            return LPResult(status, pivots=eng.pivots, cuts=self.cuts)
        x = tuple(to_fraction(v) for v in eng.x)
        names = tuple(eng.rows[r][4] for r in eng.basis)
        return LPResult(status, x, to_fraction(eng.value()), names, eng.pivots, self.cuts)


def solve(lp: LinearProgram) -> LPResult:
    """Solve ``lp`` exactly, running its separators until no violated row remains."""
    return SimplexSession(lp).solve()


# -- extreme points and convex decomposition ------------------------------------------


class _Echelon:
    """Incrementally maintained reduced row echelon form of a set of row vectors."""

    def __init__(self, n: int):
        self.n = n
        self.rows: list[list] = []
        self.pivots: list[int] = []

    def copy(self) -> "_Echelon":
        other = _Echelon(self.n)
        other.rows = [list(r) for r in self.rows]
        other.pivots = list(self.pivots)
        return other

    @property
    def rank(self) -> int:
        return len(self.rows)

    def insert(self, vs, cs) -> bool:
        vec = [_ZERO] * self.n
        for v, c in zip(vs, cs):
            vec[v] += c
        for row, p in zip(self.rows, self.pivots):
            f = vec[p]
            if f:
                for i in range(self.n):
                    if row[i]:
                        vec[i] -= f * row[i]
        p = next((i for i in range(self.n) if vec[i]), None)
        if p is None:
            return False
        lead = vec[p]
        vec = [v / lead for v in vec]
        for row in self.rows:
            f = row[p]
            if f:
                for i in range(self.n):
                    if vec[i]:
                        row[i] -= f * vec[i]
        self.rows.append(vec)
        self.pivots.append(p)
        return True

    def nullspace(self) -> list[dict]:
        pivot_set = set(self.pivots)
        basis = []
        for f in range(self.n):
            if f in pivot_set:
                continue
            vec = {f: _ONE}
            for row, p in zip(self.rows, self.pivots):
                if row[f]:
                    vec[p] = -row[f]
            basis.append(vec)
        return basis


@dataclass
class ConvexCombination:
    """Extreme points with positive weights summing to one."""

    points: list[tuple[Fraction, ...]] = field(default_factory=list)
    weights: list[Fraction] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.points)

    def mean(self) -> tuple[Fraction, ...]:
        n = len(self.points[0])
        return tuple(sum((w * p[i] for p, w in zip(self.points, self.weights)), Fraction(0))
                     for i in range(n))

    def as_dict(self) -> list[dict]:
        return [{"weight": str(w), "point": [str(v) for v in p]}
                for p, w in zip(self.points, self.weights)]


class _Face:
    """Point of a polytope together with its tight rows, supporting ray walks."""

    def __init__(self, rows: list, separators, n: int, point: list, tight=None, ech=None):
        self.rows = rows
        self.separators = separators
        self.n = n
        self.point = point
        if tight is None:
            tight = set()
            ech = _Echelon(n)
            for j, row in enumerate(rows):
                act = _dense_dot(row[0], row[1], point)
                if act < row[2] or (row[3] and act != row[2]):
                    raise DecompositionError(f"point violates row {row[4] or j}")
                if act == row[2]:
                    tight.add(j)
                    ech.insert(row[0], row[1])
        self.tight = tight
        self.ech = ech

    def copy(self) -> "_Face":
        return _Face(self.rows, self.separators, self.n, list(self.point), set(self.tight), self.ech.copy())

    def _add_row(self, row) -> int:
        self.rows.append(row)
        return len(self.rows) - 1

    def max_step(self, d: dict):
        """Largest ``theta`` keeping ``point + theta*d`` feasible, plus the rows that stop it.

        Returns ``(None, [])`` for an unbounded ray. Rows supplied by separators
        are added to the shared row list on the way.
        """
        while True:
            theta, hits = None, []
            for j, row in enumerate(self.rows):
                if j in self.tight:
                    continue
                ad = _dot(row[0], row[1], d)
                if ad < 0:
                    t = (_dense_dot(row[0], row[1], self.point) - row[2]) / -ad
                    if theta is None or t < theta:
                        theta, hits = t, [j]
                    elif t == theta:
                        hits.append(j)
            if not self.separators or theta == 0:
                return theta, hits
            if theta is None:
                return None, []
            probe = [self.point[i] + theta * d.get(i, _ZERO) for i in range(self.n)]
            probe_f = tuple(to_fraction(v) for v in probe)
            found = []
            for sep in self.separators:
                found.extend(sep(probe_f))
            if not found:
                return theta, hits
            for r in found:
                self._add_row(_compile(r))

    def advance(self, theta, d: dict, hits) -> None:
        for i, val in d.items():
            self.point[i] += theta * val
        for j in hits:
            self.tight.add(j)
            row = self.rows[j]
            self.ech.insert(row[0], row[1])

    def mark_tight(self, hits) -> None:
        for j in hits:
            self.tight.add(j)
            row = self.rows[j]
            self.ech.insert(row[0], row[1])

    def walk_to_vertex(self, rng: random.Random) -> None:
        """Move inside the minimal face along generic directions until a vertex is reached."""
        while self.ech.rank < self.n:
            null = self.ech.nullspace()
            d: dict = {}
            for vec in null:
                r = mpq(rng.choice((-1, 1)) * rng.randint(1, 997))
                for i, val in vec.items():
                    d[i] = d.get(i, _ZERO) + r * val
            d = {i: v for i, v in d.items() if v}
            theta, hits = self.max_step(d)
            if theta is None:
                d = {i: -v for i, v in d.items()}
                theta, hits = self.max_step(d)
                if theta is None:
                    raise DecompositionError("polytope is unbounded along a face direction")
            if theta == 0:
                self.mark_tight(hits)
                continue
            self.advance(theta, d, hits)


def _compiled_rows(lp: LinearProgram) -> list:
    return list(lp.compiled())


def is_extreme_point(lp: LinearProgram, x: Sequence) -> bool:
    """True when ``x`` is feasible and its tight rows have full rank."""
    if not lp.is_feasible(x):
        return False
    face = _Face(_compiled_rows(lp), lp.separators, lp.num_vars, [to_mpq(v) for v in x])
    if lp.separators:
        # lazily separated rows tight at x are not visible; probe every axis direction
        for i in range(lp.num_vars):
            for sign in (1, -1):
                theta, hits = face.max_step({i: mpq(sign)})
                if theta == 0:
                    face.mark_tight(hits)
    return face.ech.rank == lp.num_vars


def caratheodory_decompose(lp: LinearProgram, x: Sequence, max_terms: int | None = None,
                           seed: int = 0) -> ConvexCombination:
    """Write ``x`` exactly as a convex combination of vertices of the feasible region of ``lp``.

    Each step finds a vertex ``z`` of the minimal face containing the current point
    ``y``, extends the ray from ``z`` through ``y`` to the boundary point ``w`` and
    recurses on ``w``, whose minimal face is strictly smaller.
    """
    n = lp.num_vars
    if max_terms is None:
        max_terms = n + 1
    if len(x) != n:
        raise DecompositionError("point has the wrong dimension")
    if not lp.is_feasible(x):
        raise DecompositionError("point is not feasible")
    rng = random.Random(seed)
    rows = _compiled_rows(lp)
    cur = _Face(rows, lp.separators, n, [to_mpq(v) for v in x])
    comb = ConvexCombination()
    remaining = _ONE
    while True:
        if len(comb) >= max_terms:
            raise DecompositionError("term limit exceeded")
        vert = cur.copy()
        vert.walk_to_vertex(rng)
        z = vert.point
        if z == cur.point:
            comb.points.append(tuple(to_fraction(v) for v in z))
            comb.weights.append(to_fraction(remaining))
            return comb
        d = {i: cur.point[i] - z[i] for i in range(n) if cur.point[i] != z[i]}
        theta, hits = cur.max_step(d)
        if theta == 0:
            # a lazily separated row was tight at the current point; redo the face
            cur.mark_tight(hits)
            continue
        if theta is None:
            raise DecompositionError("ray leaves the polytope unboundedly")
        # y = (w + theta*z) / (1 + theta)
        wz = theta / (1 + theta)
        comb.points.append(tuple(to_fraction(v) for v in z))
        comb.weights.append(to_fraction(remaining * wz))
        remaining = remaining / (1 + theta)
        cur.advance(theta, d, hits)


def sample_extreme(comb: ConvexCombination, rng) -> tuple[Fraction, ...]:
    """Draw one point of ``comb`` with probability equal to its weight."""
    if len(comb) == 1:
        return comb.points[0]
    u = rng.random()
    acc = 0.0
    for p, w in zip(comb.points, comb.weights):
        acc += float(w)
        if u < acc:
            return p
    return comb.points[-1]
