"""Directed graph model and edge-list ingestion."""
from __future__ import annotations

import gzip
import io
import os
from bisect import bisect_left, insort
from dataclasses import dataclass
from typing import IO, Iterable, Sequence

OUT = "out"
IN = "in"
UNDIRECTED = "undirected"


class EdgeListParseError(ValueError):
    def __init__(self, lineno: int, line: str):
        super().__init__(f"line {lineno}: expected 2 tokens, got {line!r}")
        self.lineno = lineno


@dataclass
class LoadStats:
    lines: int = 0
    duplicate_edges: int = 0
    self_loops: int = 0


class DirectedGraph:
    """Simple directed graph over dense vertex ids ``0..n-1``.

    Both adjacency directions are kept sorted and duplicate free.  ``labels[v]``
    is the token the vertex was loaded with.
    """

    def __init__(self, out_adj: list[list[int]], in_adj: list[list[int]], labels: list[str]):
        self.out_adj = out_adj
        self.in_adj = in_adj
        self.labels = labels
        self.m = sum(len(a) for a in out_adj)
        self._ids: dict[str, int] | None = None
        self.load_stats: LoadStats | None = None
        self.origin: list[int] | None = None

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]], labels: Sequence[str] | None = None) -> "DirectedGraph":
        """Build from id pairs; self-loops and repeats are dropped silently."""
        out_sets: list[set[int]] = [set() for _ in range(n)]
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise IndexError(f"edge ({u}, {v}) out of range for n={n}")
            if u != v:
                out_sets[u].add(v)
        out_adj = [sorted(s) for s in out_sets]
        in_adj: list[list[int]] = [[] for _ in range(n)]
        for u in range(n):
            for v in out_adj[u]:
                in_adj[v].append(u)
        if labels is None:
            labels = [str(i) for i in range(n)]
        elif len(labels) != n:
            raise ValueError("labels length does not match n")
        return cls(out_adj, in_adj, list(labels))

    @property
    def n(self) -> int:
        return len(self.out_adj)

    def __repr__(self) -> str:
        return f"DirectedGraph(n={self.n}, m={self.m})"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DirectedGraph):
            return NotImplemented
        return self.canonical_edges() == other.canonical_edges() and sorted(self.labels) == sorted(other.labels)

    def canonical_edges(self) -> list[tuple[str, str]]:
        lab = self.labels
        return sorted((lab[u], lab[v]) for u, v in self.edges())

    def id_of(self, label: str) -> int:
        if self._ids is None:
            self._ids = {lab: i for i, lab in enumerate(self.labels)}
        return self._ids[label]

    def edges(self):
        for u, nbrs in enumerate(self.out_adj):
            for v in nbrs:
                yield u, v

    def out_degree(self, v: int) -> int:
        return len(self.out_adj[v])

    def in_degree(self, v: int) -> int:
        return len(self.in_adj[v])

    def has_edge(self, u: int, v: int) -> bool:
        a = self.out_adj[u]
        i = bisect_left(a, v)
        return i < len(a) and a[i] == v

    def neighbors(self, v: int, mode: str = OUT) -> list[int]:
        """Neighbors of ``v``.

        ``undirected`` concatenates out- and in-neighbors, so a mutual pair
        shows up twice.
        """
        if not 0 <= v < self.n:
            raise IndexError(f"vertex {v} out of range for n={self.n}")
        if mode == OUT:
            return self.out_adj[v]
        if mode == IN:
            return self.in_adj[v]
        if mode == UNDIRECTED:
            return self.out_adj[v] + self.in_adj[v]
        raise ValueError(f"unknown mode {mode!r}")

    def induced_subgraph(self, vertices: Iterable[int]) -> "DirectedGraph":
        """Subgraph on ``vertices``, renumbered in ascending id order.

        The original id of new vertex ``i`` is ``sub.origin[i]``.
        """
        keep = sorted(set(vertices))
        for v in keep:
            if not 0 <= v < self.n:
                raise IndexError(f"vertex {v} out of range for n={self.n}")
        new_id = {v: i for i, v in enumerate(keep)}
        out_adj = [[new_id[w] for w in self.out_adj[v] if w in new_id] for v in keep]
        in_adj = [[new_id[w] for w in self.in_adj[v] if w in new_id] for v in keep]
        sub = DirectedGraph(out_adj, in_adj, [self.labels[v] for v in keep])
        sub.origin = keep
        return sub

    # Mutation hooks for the maintenance module, which owns a private copy.

    def copy(self) -> "DirectedGraph":
        g = DirectedGraph([list(a) for a in self.out_adj], [list(a) for a in self.in_adj], list(self.labels))
        return g

    def _add_vertex(self, label: str) -> int:
        self.out_adj.append([])
        self.in_adj.append([])
        self.labels.append(label)
        if self._ids is not None:
            self._ids[label] = len(self.labels) - 1
        return len(self.labels) - 1

    def _add_edge(self, u: int, v: int) -> None:
        insort(self.out_adj[u], v)
        insort(self.in_adj[v], u)
        self.m += 1

    def _remove_edge(self, u: int, v: int) -> None:
        a = self.out_adj[u]
        del a[bisect_left(a, v)]
        b = self.in_adj[v]
        del b[bisect_left(b, u)]
        self.m -= 1

    def _remove_isolated_vertex(self, x: int) -> None:
        """Drop isolated vertex ``x``; ids above it shift down by one."""
        assert not self.out_adj[x] and not self.in_adj[x]
        del self.out_adj[x], self.in_adj[x], self.labels[x]
        for adj in (self.out_adj, self.in_adj):
            for i, a in enumerate(adj):
                if a and a[-1] > x:
                    adj[i] = [w - 1 if w > x else w for w in a]
        self._ids = None


def load_edge_list(source: IO[str] | str | os.PathLike) -> DirectedGraph:
    """Parse a whitespace separated ``u v`` edge list.

    ``source`` may be an open text stream or a path; paths ending in ``.gz``
    are decompressed.  Vertex ids follow first appearance.  Lines starting
    with ``#`` and blank lines are skipped.
    """
    if isinstance(source, (str, os.PathLike)):
        path = os.fspath(source)
        opener = gzip.open if path.endswith(".gz") else open
        with opener(path, "rt", encoding="utf-8") as fh:
            return load_edge_list(fh)

    ids: dict[str, int] = {}
    labels: list[str] = []
    edges: set[tuple[int, int]] = set()
    stats = LoadStats()

    def vid(tok: str) -> int:
        i = ids.get(tok)
        if i is None:
            i = ids[tok] = len(labels)
            labels.append(tok)
        return i

    for lineno, line in enumerate(source, 1):
        stats.lines += 1
        s = line.strip()
        if not s or s.startswith("#"):
            continue
        toks = s.split()
        if len(toks) != 2:
            raise EdgeListParseError(lineno, line.rstrip("\n"))
        u, v = vid(toks[0]), vid(toks[1])
        if u == v:
            stats.self_loops += 1
            continue
        if (u, v) in edges:
            stats.duplicate_edges += 1
            continue
        edges.add((u, v))

    g = DirectedGraph.from_edges(len(labels), edges, labels)
    g._ids = ids
    g.load_stats = stats
    return g


def loads_edge_list(text: str) -> DirectedGraph:
    return load_edge_list(io.StringIO(text))


def write_edge_list(g: DirectedGraph, sink: IO[str]) -> None:
    # isolated vertices are written as self-loops, which the loader
    # drops while still registering the vertex
    lab = g.labels
    for u in range(g.n):
        if not g.out_adj[u] and not g.in_adj[u]:
            sink.write(f"{lab[u]} {lab[u]}\n")
    for u, v in g.edges():
        sink.write(f"{lab[u]} {lab[v]}\n")
