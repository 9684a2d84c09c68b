"""Fixtures, seeded generators and brute-force oracles.

Nothing in here calls the production peeling, decomposition or query code,
so the oracles can be used to check those paths independently.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import combinations

from .graph import DirectedGraph


@dataclass(frozen=True)
class Fixture:
    name: str
    edges: tuple[tuple[int, int], ...]
    commentary: str

    def graph(self) -> DirectedGraph:
        n = 1 + max((max(e) for e in self.edges), default=-1)
        return DirectedGraph.from_edges(n, self.edges)


def _cycle(*vs: int) -> list[tuple[int, int]]:
    return [(vs[i], vs[(i + 1) % len(vs)]) for i in range(len(vs))]


_K4 = [(a, b) for a in range(4) for b in range(4) if a != b]

F1 = Fixture("F1", tuple(_cycle(0, 1, 2)), "3-cycle")
F2 = Fixture("F2", tuple(_cycle(0, 1, 2) + _cycle(3, 4, 5)), "two disjoint 3-cycles")
F3 = Fixture("F3", tuple(_K4), "bidirected K4")
F4 = Fixture("F4", tuple(_K4 + [(4, 0), (0, 4)]), "bidirected K4 plus a mutual pendant on 0")
F5 = Fixture("F5", ((0, 1), (1, 2)), "path 0->1->2")
F7 = Fixture("F7", tuple(_cycle(0, 1, 2) + _cycle(3, 4, 5) + [(2, 3)]), "F2 with one-way bridge 2->3")


def fixtures() -> list[Fixture]:
    return [F1, F2, F3, F4, F5, F7]


def random_digraph(kind: str, n: int, param: float, seed: int) -> DirectedGraph:
    """Seeded random digraph.

    ``uniform``: every ordered pair is an edge with probability ``param``.
    ``power-law``: preferential attachment, ``param`` edges per new vertex,
    each edge oriented by a coin flip.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    rng = random.Random(seed)
    edges: set[tuple[int, int]] = set()
    if kind == "uniform":
        if not 0 <= param <= 1:
            raise ValueError("edge probability must lie in [0, 1]")
        for u in range(n):
            for v in range(n):
                if u != v and rng.random() < param:
                    edges.add((u, v))
    elif kind == "power-law":
        per = int(param)
        if per < 1 or per != param:
            raise ValueError("power-law param must be a positive integer")
        pool: list[int] = []
        for i in range(1, n):
            want = min(per, i)
            picked: set[int] = set()
            while len(picked) < want:
                t = rng.choice(pool) if pool and rng.random() < 0.9 else rng.randrange(i)
                picked.add(t)
            for t in sorted(picked):
                edges.add((i, t) if rng.random() < 0.5 else (t, i))
                pool.append(t)
                pool.append(i)
    else:
        raise ValueError(f"unknown graph kind {kind!r}")
    return DirectedGraph.from_edges(n, sorted(edges))


def _edge_list(g: DirectedGraph) -> list[tuple[int, int]]:
    return [(u, v) for u in range(g.n) for v in g.out_adj[u]]


def _feasible(edges, subset: set[int], k: int, l: int) -> bool:
    indeg = dict.fromkeys(subset, 0)
    outdeg = dict.fromkeys(subset, 0)
    for u, v in edges:
        if u in subset and v in subset:
            outdeg[u] += 1
            indeg[v] += 1
    return all(indeg[v] >= k and outdeg[v] >= l for v in subset)


def subset_core_oracle(g: DirectedGraph, k: int, l: int) -> set[int]:
    """Union of every vertex subset meeting both degree bounds (n <= 8)."""
    if g.n > 8:
        raise ValueError("subset enumeration is limited to n <= 8")
    edges = _edge_list(g)
    out: set[int] = set()
    for size in range(1, g.n + 1):
        for subset in combinations(range(g.n), size):
            s = set(subset)
            if not s <= out and _feasible(edges, s, k, l):
                out |= s
    return out


def naive_core(g: DirectedGraph, k: int, l: int, within=None) -> set[int]:
    """Round-based peeling that recounts every degree from the edge list."""
    alive = set(range(g.n)) if within is None else set(within)
    edges = _edge_list(g)
    while True:
        indeg = dict.fromkeys(alive, 0)
        outdeg = dict.fromkeys(alive, 0)
        for u, v in edges:
            if u in alive and v in alive:
                outdeg[u] += 1
                indeg[v] += 1
        bad = {v for v in alive if indeg[v] < k or outdeg[v] < l}
        if not bad:
            return alive
        alive -= bad


def naive_weak_component(g: DirectedGraph, members: set[int], q: int) -> set[int]:
    if q not in members:
        return set()
    label = {v: v for v in members}
    changed = True
    while changed:
        changed = False
        for u, v in _edge_list(g):
            if u in members and v in members and label[u] != label[v]:
                low = min(label[u], label[v])
                label[u] = label[v] = low
                changed = True
    return {v for v in members if label[v] == label[q]}


def naive_csd(g: DirectedGraph, q: int, k: int, l: int, within=None) -> set[int]:
    return naive_weak_component(g, naive_core(g, k, l, within), q)


def _reach(succ: dict[int, list[int]], start: int) -> set[int]:
    seen = {start}
    frontier = [start]
    while frontier:
        nxt = []
        for v in frontier:
            for w in succ.get(v, ()):
                if w not in seen:
                    seen.add(w)
                    nxt.append(w)
        frontier = nxt
    return seen


def naive_scc(g: DirectedGraph, members: set[int], q: int) -> set[int]:
    """Vertices of ``members`` that reach q and are reached from q."""
    fwd: dict[int, list[int]] = {}
    bwd: dict[int, list[int]] = {}
    for u, v in _edge_list(g):
        if u in members and v in members:
            fwd.setdefault(u, []).append(v)
            bwd.setdefault(v, []).append(u)
    return _reach(fwd, q) & _reach(bwd, q)


def naive_scsd(g: DirectedGraph, q: int, k: int, l: int) -> set[int]:
    """Alternate full peeling and SCC extraction until nothing changes."""
    current = naive_csd(g, q, k, l)
    while current:
        scc = naive_scc(g, current, q)
        if _feasible(_edge_list(g), scc, k, l):
            return scc
        current = naive_csd(g, q, k, l, within=scc)
    return set()


def is_strongly_connected(g: DirectedGraph, members: set[int]) -> bool:
    if not members:
        return False
    q = next(iter(members))
    return naive_scc(g, members, q) == members


def degree_feasible(g: DirectedGraph, members: set[int], k: int, l: int) -> bool:
    return _feasible(_edge_list(g), members, k, l)


class NaiveUnionFind:
    """Union-find without ranks or compression; partition reference only."""

    def __init__(self, n: int):
        self.label = list(range(n))

    def union(self, u: int, v: int) -> None:
        a, b = self.label[u], self.label[v]
        if a != b:
            self.label = [a if x == b else x for x in self.label]

    def same(self, u: int, v: int) -> bool:
        return self.label[u] == self.label[v]
