import itertools
from fractions import Fraction

import pytest
from hypothesis import settings

from degnet.graph import Graph

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


def brute_min_cut(g: Graph, capacities, s, t):
    """Smallest cut capacity over all vertex sets holding s but not t."""
    others = [v for v in g.vertices if v not in (s, t)]
    best = None
    for k in range(len(others) + 1):
        for extra in itertools.combinations(others, k):
            side = {s, *extra}
            val = sum((Fraction(capacities[e]) for e in g.cut_edges(side)), Fraction(0))
            best = val if best is None or val < best else best
    return best


@pytest.fixture
def triangle():
    return Graph([0, 1, 2], [(0, 0, 1), (1, 1, 2), (2, 0, 2)], {0: 1, 1: 1, 2: 1})


@pytest.fixture
def square():
    return Graph(["a", "b", "c", "d"], [(0, "a", "b"), (1, "b", "c"), (2, "c", "d"), (3, "d", "a")])


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def acceptance_line():
    """Record one pass/fail line per acceptance criterion; all are echoed in the terminal summary."""
    def record(criterion: str, ok: bool, text: str) -> None:
        line = f"{criterion:>4} {'PASS' if ok else 'FAIL'}  {text}"
        ACCEPTANCE_LINES.append(line)
        print(line)
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda l: int(l.split()[0][1:])):
            terminalreporter.write_line(line)
