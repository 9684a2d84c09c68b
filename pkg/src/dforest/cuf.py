"""Core-based union-find.

Classic union-by-rank with path compression, plus two extra per-vertex
fields: ``hook`` (on a root, a member with the smallest level, used to find
the index node at the top of the component's subtree) and ``group`` (a
component label carried over from the previous, larger-k iteration).
"""
from __future__ import annotations

from typing import Iterable, Sequence


class CufState:
    __slots__ = ("rank", "parent", "hook", "group", "steps")

    def __init__(self, n: int):
        # parent -1 marks an entry that was never initialised
        self.rank = [0] * n
        self.parent = [-1] * n
        self.hook = list(range(n))
        self.group = list(range(n))
        # parent-pointer hops taken by find; a cost proxy for tests
        self.steps = 0

    def __len__(self) -> int:
        return len(self.parent)

    def make_set(self, v: int) -> None:
        self.rank[v] = 0
        self.parent[v] = v
        self.hook[v] = v
        self.group[v] = v

    def quick_reset(self, v: int) -> None:
        """Singleton again, but keep ``group`` from the previous iteration."""
        self.parent[v] = v
        self.hook[v] = v
        self.rank[v] = 0

    def find(self, v: int) -> int:
        parent = self.parent
        assert parent[v] >= 0, f"uninitialised CUF entry {v}"
        root = v
        while parent[root] != root:
            root = parent[root]
            self.steps += 1
        while parent[v] != root:
            parent[v], v = root, parent[v]
        return root

    def union(self, u: int, v: int, cur: Sequence[int]) -> None:
        ru = self.find(u)
        rv = self.find(v)
        if ru == rv:
            return
        rank = self.rank
        if rank[ru] < rank[rv]:
            ru, rv = rv, ru
        self.parent[rv] = ru
        if rank[ru] == rank[rv]:
            rank[ru] += 1
        group = self.group
        if cur[group[ru]] < cur[group[rv]]:
            group[ru] = group[rv]

    def update(self, vertices: Iterable[int], cur: Sequence[int]) -> None:
        """Propagate the root's group to ``vertices`` and lower the root hook."""
        group, hook = self.group, self.hook
        for v in vertices:
            r = self.find(v)
            group[v] = group[r]
            if cur[hook[r]] > cur[v]:
                hook[r] = v


def make_set(s: CufState, v: int) -> None:
    s.make_set(v)


def find(s: CufState, v: int) -> int:
    return s.find(v)


def union(s: CufState, u: int, v: int, cur: Sequence[int]) -> None:
    s.union(u, v, cur)


def update_cuf(s: CufState, vertices: Iterable[int], cur: Sequence[int]) -> None:
    s.update(vertices, cur)


def quick_reset(s: CufState, v: int) -> None:
    s.quick_reset(v)
