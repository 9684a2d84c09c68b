"""Strongly connected community search on top of the D-Forest."""
from __future__ import annotations

import time
from typing import Iterable

from .cores import component_of
from .forest import CommunityResult, DForest, UnknownVertexError, query_csd
from .graph import DirectedGraph


def scc_of(g: DirectedGraph, members: Iterable[int], q: int) -> set[int]:
    """Strongly connected component of ``q`` inside the induced subgraph.

    Kosaraju restricted to one component: a forward DFS from q, then a DFS
    on the transposed graph that only keeps forward-reached vertices.
    """
    inside = members if isinstance(members, (set, frozenset)) else set(members)
    if q not in inside:
        raise ValueError(f"query vertex {q} is not in the vertex set")
    forward = {q}
    stack = [q]
    out_adj, in_adj = g.out_adj, g.in_adj
    while stack:
        v = stack.pop()
        for w in out_adj[v]:
            if w in inside and w not in forward:
                forward.add(w)
                stack.append(w)
    scc = {q}
    stack = [q]
    while stack:
        v = stack.pop()
        for w in in_adj[v]:
            if w in forward and w not in scc:
                scc.add(w)
                stack.append(w)
    return scc


def _violators(g: DirectedGraph, members: set[int], k: int, l: int) -> list[int]:
    out_adj, in_adj = g.out_adj, g.in_adj
    bad = []
    for v in members:
        if sum(1 for w in in_adj[v] if w in members) < k or sum(1 for w in out_adj[v] if w in members) < l:
            bad.append(v)
    return bad


def _peel_within(g: DirectedGraph, members: set[int], k: int, l: int, q: int) -> set[int]:
    """q's weak component in the (k,l)-core of the subgraph on ``members``."""
    out_adj, in_adj = g.out_adj, g.in_adj
    alive = set(members)
    indeg = {v: sum(1 for w in in_adj[v] if w in alive) for v in alive}
    outdeg = {v: sum(1 for w in out_adj[v] if w in alive) for v in alive}
    stack = [v for v in alive if indeg[v] < k or outdeg[v] < l]
    alive.difference_update(stack)
    while stack:
        v = stack.pop()
        for w in out_adj[v]:
            if w in alive:
                indeg[w] -= 1
                if indeg[w] < k:
                    alive.discard(w)
                    stack.append(w)
        for w in in_adj[v]:
            if w in alive:
                outdeg[w] -= 1
                if outdeg[w] < l:
                    alive.discard(w)
                    stack.append(w)
    if q not in alive:
        return set()
    mask = _SetMask(alive)
    return component_of(g, mask, q)


class _SetMask:
    # lets component_of index a set like a boolean list
    __slots__ = ("s",)

    def __init__(self, s: set[int]):
        self.s = s

    def __getitem__(self, v: int) -> bool:
        return v in self.s


def query_scsd(g: DirectedGraph, f: DForest, q: int, k: int, l: int) -> CommunityResult:
    """Fixpoint of SCC extraction and peeling, started from the CSD answer."""
    t0 = time.perf_counter()
    if not 0 <= q < g.n:
        raise UnknownVertexError(q)
    base = query_csd(f, q, k, l)
    current = base.vertices
    while current:
        scc = scc_of(g, current, q)
        if not _violators(g, scc, k, l):
            return CommunityResult(scc, base.nodes_visited, time.perf_counter() - t0)
        current = _peel_within(g, scc, k, l, q)
    return CommunityResult(set(), base.nodes_visited, time.perf_counter() - t0)
