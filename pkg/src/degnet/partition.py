"""Partitions of small vertex sets: refinement, join, restriction and edge components.

Elements missing from a partition's ground set behave as singletons in every operation.
"""
from __future__ import annotations

from typing import Hashable, Iterable

from .graph import id_key


class UnionFind:
    def __init__(self, items: Iterable = ()):
        self.parent: dict = {}
        for item in items:
            self.add(item)

    def add(self, item) -> None:
        self.parent.setdefault(item, item)

    def find(self, item):
        self.add(item)
        root = item
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[item] != root:
            self.parent[item], item = root, self.parent[item]
        return root

    def union(self, a, b) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[ra] = rb
        return True

    def groups(self) -> list[list]:
        out: dict = {}
        for item in self.parent:
            out.setdefault(self.find(item), []).append(item)
        return list(out.values())


def _sorted(items) -> tuple:
    return tuple(sorted(items, key=id_key))


class Partition:
    """Immutable set partition; equality and hashing use the canonical block tuple."""

    __slots__ = ("blocks", "_where")

    def __init__(self, blocks: Iterable[Iterable[Hashable]] = ()):
        canon = []
        seen = set()
        for block in blocks:
            block = _sorted(set(block))
            if not block:
                continue
            if seen.intersection(block):
                raise ValueError("blocks overlap")
            seen.update(block)
            canon.append(block)
        self.blocks: tuple = tuple(sorted(canon, key=lambda b: id_key(b[0])))
        self._where = {v: i for i, b in enumerate(self.blocks) for v in b}

    @classmethod
    def discrete(cls, ground: Iterable) -> "Partition":
        return cls([v] for v in ground)

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple], ground: Iterable = ()) -> "Partition":
        uf = UnionFind(ground)
        for a, b in pairs:
            uf.union(a, b)
        return cls(uf.groups())

    @property
    def ground(self) -> frozenset:
        return frozenset(self._where)

    def same(self, a, b) -> bool:
        if a == b:
            return True
        ia, ib = self._where.get(a), self._where.get(b)
        return ia is not None and ia == ib

    def block_of(self, a) -> tuple:
        i = self._where.get(a)
        return (a,) if i is None else self.blocks[i]

    def refines(self, other: "Partition") -> bool:
        """``self <= other``: elements sharing a block here share one in ``other``."""
        for block in self.blocks:
            first = block[0]
            if any(not other.same(first, v) for v in block[1:]):
                return False
        return True

    def join(self, *others: "Partition") -> "Partition":
        uf = UnionFind(self._where)
        for part in (self,) + others:
            for block in part.blocks:
                uf.add(block[0])
                for v in block[1:]:
                    uf.union(block[0], v)
        return Partition(uf.groups())

    __or__ = join

    def restrict(self, ground: Iterable) -> "Partition":
        """``self[X]``: the partition induced on ``X`` (outside elements become singletons)."""
        groups: dict = {}
        for v in ground:
            i = self._where.get(v)
            groups.setdefault(("b", i) if i is not None else ("s", v), []).append(v)
        return Partition(groups.values())

    def __eq__(self, other) -> bool:
        return isinstance(other, Partition) and self.blocks == other.blocks

    def __hash__(self) -> int:
        return hash(self.blocks)

    def __len__(self) -> int:
        return len(self.blocks)

    def __repr__(self) -> str:
        return "{" + ", ".join("{" + ",".join(map(str, b)) + "}" for b in self.blocks) + "}"


def cc(edges: Iterable[tuple]) -> Partition:
    """Components of the vertices touched by ``edges`` (pairs of endpoints)."""
    return Partition.from_pairs(edges)


def all_partitions(items) -> list[Partition]:
    """Every partition of ``items`` (Bell-number many)."""
    items = list(items)
    out: list[list[list]] = [[]]
    for v in items:
        nxt = []
        for blocks in out:
            for i in range(len(blocks)):
                nxt.append(blocks[:i] + [blocks[i] + [v]] + blocks[i + 1:])
            nxt.append(blocks + [[v]])
        out = nxt
    return [Partition(b) for b in out]
