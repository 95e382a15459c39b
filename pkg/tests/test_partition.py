import itertools

from hypothesis import given, strategies as st

from degnet.partition import Partition, all_partitions, cc

GROUND = "abcde"


def P(*blocks):
    return Partition(blocks)


def brute_same(parts, a, b):
    """Reachability in the union of same-block relations."""
    seen, todo = {a}, [a]
    while todo:
        x = todo.pop()
        for p in parts:
            for y in p.block_of(x):
                if y not in seen:
                    seen.add(y)
                    todo.append(y)
    return b in seen


def test_refines_examples():
    assert P("a", "b").refines(P("ab"))
    assert not P("ab").refines(P("a", "b"))


def test_join_examples():
    assert P("ab", "c").join(P("bc")) == P("abc")
    x = P("ab", "c", "d")
    assert x.join(x) == x


def test_restrict_examples():
    x = P("abc", "de")
    assert x.restrict(x.ground) == x
    assert P("abc").restrict("ac") == P("ac")


def test_missing_elements_are_singletons():
    x = P("ab")
    assert x.same("c", "c") and not x.same("a", "c")
    assert x.join(P("cd")) == P("ab", "cd")
    assert x.restrict("ace") == P("a", "c", "e")


def test_cc_of_edges():
    assert cc([("a", "b"), ("b", "c"), ("d", "e")]) == P("abc", "de")
    assert cc([]) == Partition()


def test_bell_numbers():
    assert [len(all_partitions(GROUND[:k])) for k in range(6)] == [1, 1, 2, 5, 15, 52]
    assert len(set(all_partitions(GROUND))) == 52


def test_join_is_associative_and_commutative_exhaustive():
    parts = all_partitions("abcd")
    for a, b, c in itertools.product(parts, repeat=3):
        ref = a.join(b, c)
        assert ref == c.join(a, b) == b.join(c).join(a) == (a | b) | c


def test_join_matches_reachability_exhaustive():
    parts = all_partitions("abcd")
    for a, b in itertools.product(parts, repeat=2):
        j = a.join(b)
        for x, y in itertools.combinations("abcd", 2):
            assert j.same(x, y) == brute_same([a, b], x, y)
        assert a.refines(j) and b.refines(j)


def test_restricted_join_exhaustive():
    parts = all_partitions("abcd")
    subsets = [set(s) for k in range(5) for s in itertools.combinations("abcd", k)]
    for a, b in itertools.product(parts, repeat=2):
        for X in subsets:
            r = a.join(b).restrict(X)
            for x, y in itertools.combinations(sorted(X), 2):
                assert r.same(x, y) == brute_same([a, b], x, y)


partitions5 = st.sampled_from(all_partitions(GROUND))


@given(partitions5)
def test_refines_is_reflexive(a):
    assert a.refines(a)


@given(partitions5, partitions5)
def test_refines_iff_join_is_identity(a, b):
    assert a.refines(b) == (a.join(b) == b)


@given(partitions5, partitions5, partitions5)
def test_refines_is_transitive(a, b, c):
    if a.refines(b) and b.refines(c):
        assert a.refines(c)
