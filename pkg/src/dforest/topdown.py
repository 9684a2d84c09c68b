"""Baseline index builder: grow every k-tree from level 0 downwards.

Each level re-peels inside every component of the previous level and splits
the survivors into weak components.  Vertices that fall out stay behind in
the parent component's node.
"""
from __future__ import annotations

import time

from .cores import peel, weak_components, max_k
from .forest import DForest, KTree
from .graph import DirectedGraph


class _LevelPeeler:
    """Peeling and component search restricted to a vertex subset.

    Scratch arrays are shared across calls; ``mark`` stamps membership so no
    per-call O(n) allocation is needed.
    """

    def __init__(self, g: DirectedGraph):
        self.g = g
        n = g.n
        self.mark = [0] * n
        self.indeg = [0] * n
        self.outdeg = [0] * n
        self.stamp = 0
        self.edge_touches = 0

    def split(self, members: list[int], k: int, l: int) -> tuple[list[int], list[list[int]]]:
        """Peel ``members`` to its (k,l)-core; return (peeled, core components)."""
        out_adj, in_adj = self.g.out_adj, self.g.in_adj
        mark, indeg, outdeg = self.mark, self.indeg, self.outdeg
        self.stamp += 2
        t = self.stamp
        for v in members:
            mark[v] = t
        touches = 0
        for v in members:
            ins, outs = in_adj[v], out_adj[v]
            touches += len(ins) + len(outs)
            indeg[v] = sum(1 for w in ins if mark[w] == t)
            outdeg[v] = sum(1 for w in outs if mark[w] == t)
        stack = [v for v in members if indeg[v] < k or outdeg[v] < l]
        for v in stack:
            mark[v] = 0
        while stack:
            v = stack.pop()
            outs, ins = out_adj[v], in_adj[v]
            touches += len(ins) + len(outs)
            for w in outs:
                if mark[w] == t:
                    indeg[w] -= 1
                    if indeg[w] < k:
                        mark[w] = 0
                        stack.append(w)
            for w in ins:
                if mark[w] == t:
                    outdeg[w] -= 1
                    if outdeg[w] < l:
                        mark[w] = 0
                        stack.append(w)
        peeled = [v for v in members if mark[v] != t]
        if not peeled:
            # nothing fell out, so the set is still one component
            self.edge_touches += touches
            return peeled, [members]
        seen = t + 1
        comps = []
        for s in members:
            if mark[s] != t:
                continue
            mark[s] = seen
            comp = [s]
            i = 0
            while i < len(comp):
                v = comp[i]
                i += 1
                outs, ins = out_adj[v], in_adj[v]
                touches += len(outs) + len(ins)
                for w in outs:
                    if mark[w] == t:
                        mark[w] = seen
                        comp.append(w)
                for w in ins:
                    if mark[w] == t:
                        mark[w] = seen
                        comp.append(w)
            comps.append(comp)
        self.edge_touches += touches
        return peeled, comps


def build_ktree_topdown(g: DirectedGraph, k: int, peeler: _LevelPeeler | None = None) -> KTree:
    if peeler is None:
        peeler = _LevelPeeler(g)
    tree = KTree(k, g.n)
    alive = peel(g, k, 0)
    peeler.edge_touches += 2 * g.m
    frontier = [(comp, tree.root) for comp in weak_components(g, (v for v in range(g.n) if alive[v]))]
    level = 0
    while frontier:
        nxt = []
        for members, parent in frontier:
            peeled, comps = peeler.split(members, k, level + 1)
            # no vertex tops out at this level: skip the node, keep the parent
            node = tree.add_node(level, peeled, parent) if peeled else parent
            for comp in comps:
                nxt.append((comp, node))
        frontier = nxt
        level += 1
    tree.rebuild_vmap(g.n)
    return tree


def build_topdown(g: DirectedGraph) -> DForest:
    """Build the whole forest with the top-down method, k = 0..kmax."""
    t0 = time.perf_counter()
    peeler = _LevelPeeler(g)
    trees = [build_ktree_topdown(g, k, peeler) for k in range(max_k(g) + 1)]
    f = DForest(g.labels, g.m, trees, builder="topdown")
    f.stats = {"edge_touches": peeler.edge_touches, "seconds": time.perf_counter() - t0}
    return f
