"""(k,l)-core peeling, per-k l-decomposition and weak components."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable

from .graph import DirectedGraph


@dataclass
class CoreLevels:
    """``maxl[v]`` is the largest l with v in the (k,l)-core, or -1."""

    k: int
    maxl: list[int]

    @property
    def lmax(self) -> int:
        return max(self.maxl, default=-1)

    def members(self) -> list[int]:
        return [v for v, x in enumerate(self.maxl) if x >= 0]


def _check_thresholds(k: int, l: int) -> None:
    if k < 0 or l < 0:
        raise ValueError(f"thresholds must be non-negative, got k={k}, l={l}")


def peel(g: DirectedGraph, k: int, l: int, within: Iterable[int] | None = None) -> list[bool]:
    """Cascade-remove vertices with in-degree < k or out-degree < l.

    Returns a membership mask of the surviving (k,l)-core.  With ``within``
    the peel runs on the induced subgraph of that vertex set.
    """
    n = g.n
    out_adj, in_adj = g.out_adj, g.in_adj
    if within is None:
        alive = [True] * n
        indeg = [len(a) for a in in_adj]
        outdeg = [len(a) for a in out_adj]
        candidates: Iterable[int] = range(n)
    else:
        alive = [False] * n
        members = list(within)
        for v in members:
            alive[v] = True
        indeg = [0] * n
        outdeg = [0] * n
        for v in members:
            indeg[v] = sum(1 for w in in_adj[v] if alive[w])
            outdeg[v] = sum(1 for w in out_adj[v] if alive[w])
        candidates = members

    stack = [v for v in candidates if indeg[v] < k or outdeg[v] < l]
    for v in stack:
        alive[v] = False
    while stack:
        v = stack.pop()
        for w in out_adj[v]:
            if alive[w]:
                indeg[w] -= 1
                if indeg[w] < k:
                    alive[w] = False
                    stack.append(w)
        for w in in_adj[v]:
            if alive[w]:
                outdeg[w] -= 1
                if outdeg[w] < l:
                    alive[w] = False
                    stack.append(w)
    return alive


def kl_core(g: DirectedGraph, k: int, l: int) -> set[int]:
    """Vertex set of the (k,l)-core; may be empty or disconnected."""
    _check_thresholds(k, l)
    return {v for v, a in enumerate(peel(g, k, l)) if a}


def decompose_for_k(g: DirectedGraph, k: int) -> CoreLevels:
    """Max out-threshold of every vertex for a fixed in-threshold ``k``.

    Peels to the (k,0)-core first, then runs a bucketed min-out-degree peel.
    A vertex knocked below in-degree k during round l leaves at level l too.
    """
    _check_thresholds(k, 0)
    n = g.n
    out_adj, in_adj = g.out_adj, g.in_adj
    maxl = [-1] * n
    alive = peel(g, k, 0)
    indeg = [0] * n
    outdeg = [0] * n
    remaining = 0
    for v in range(n):
        if alive[v]:
            remaining += 1
            indeg[v] = sum(1 for w in in_adj[v] if alive[w])
            outdeg[v] = sum(1 for w in out_adj[v] if alive[w])
    if not remaining:
        return CoreLevels(k, maxl)

    top = max(outdeg)
    buckets: list[list[int]] = [[] for _ in range(top + 1)]
    for v in range(n - 1, -1, -1):
        if alive[v]:
            buckets[outdeg[v]].append(v)

    for level in range(top + 1):
        if not remaining:
            break
        # lazy buckets: stale entries are skipped by the degree check
        stack = [v for v in buckets[level] if alive[v] and outdeg[v] == level]
        buckets[level] = []
        while stack:
            v = stack.pop()
            if not alive[v]:
                continue
            alive[v] = False
            maxl[v] = level
            remaining -= 1
            for w in out_adj[v]:
                if alive[w]:
                    indeg[w] -= 1
                    if indeg[w] < k:
                        stack.append(w)
            for w in in_adj[v]:
                if alive[w]:
                    d = outdeg[w] = outdeg[w] - 1
                    if d <= level:
                        stack.append(w)
                    else:
                        buckets[d].append(w)
    return CoreLevels(k, maxl)


def in_core_numbers(g: DirectedGraph) -> list[int]:
    """Largest k with v in the (k,0)-core, for every vertex."""
    n = g.n
    out_adj = g.out_adj
    deg = [len(a) for a in g.in_adj]
    core = [0] * n
    if not n:
        return core
    top = max(deg)
    buckets: list[list[int]] = [[] for _ in range(top + 1)]
    for v in range(n - 1, -1, -1):
        buckets[deg[v]].append(v)
    done = [False] * n
    for level in range(top + 1):
        stack = [v for v in buckets[level] if not done[v] and deg[v] == level]
        while stack:
            v = stack.pop()
            if done[v]:
                continue
            done[v] = True
            core[v] = level
            for w in out_adj[v]:
                if not done[w]:
                    d = deg[w] = deg[w] - 1
                    if d <= level:
                        stack.append(w)
                    else:
                        buckets[d].append(w)
    return core


def max_k(g: DirectedGraph) -> int:
    """Largest k with a nonempty (k,0)-core; -1 for the empty graph."""
    return max(in_core_numbers(g), default=-1)


def group_by_level(c: CoreLevels) -> list[list[int]]:
    groups: list[list[int]] = [[] for _ in range(c.lmax + 1)]
    for v, x in enumerate(c.maxl):
        if x >= 0:
            groups[x].append(v)
    return groups


def weak_components(g: DirectedGraph, vertices: Iterable[int]) -> list[list[int]]:
    """Weakly connected components of the subgraph induced by ``vertices``.

    Components come out ordered by their smallest member, each sorted.
    """
    inside = set(vertices)
    seen: set[int] = set()
    comps = []
    for s in sorted(inside):
        if s in seen:
            continue
        seen.add(s)
        comp = [s]
        queue = deque([s])
        while queue:
            v = queue.popleft()
            for adj in (g.out_adj[v], g.in_adj[v]):
                for w in adj:
                    if w in inside and w not in seen:
                        seen.add(w)
                        comp.append(w)
                        queue.append(w)
        comp.sort()
        comps.append(comp)
    return comps


def component_of(g: DirectedGraph, alive: list[bool], q: int) -> set[int]:
    """Weak component of ``q`` among vertices flagged in ``alive``."""
    if not alive[q]:
        return set()
    comp = {q}
    queue = [q]
    out_adj, in_adj = g.out_adj, g.in_adj
    while queue:
        v = queue.pop()
        for w in out_adj[v]:
            if alive[w] and w not in comp:
                comp.add(w)
                queue.append(w)
        for w in in_adj[v]:
            if alive[w] and w not in comp:
                comp.add(w)
                queue.append(w)
    return comp


def online_csd(g: DirectedGraph, q: int, k: int, l: int) -> set[int]:
    """Index-free CSD answer: q's weak component inside the (k,l)-core."""
    _check_thresholds(k, l)
    if not 0 <= q < g.n:
        raise IndexError(f"vertex {q} out of range for n={g.n}")
    return component_of(g, peel(g, k, l), q)
