"""Optimized index builder: k from kmax down to 0, each tree leaf-first.

A core-based union-find carries connectivity between levels of one tree and
across consecutive k values, so no level has to re-explore the graph.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Optional

from .cores import CoreLevels, decompose_for_k, group_by_level, max_k
from .cuf import CufState
from .forest import DForest, KTree
from .graph import DirectedGraph


class BuildCorruption(AssertionError):
    pass


@dataclass
class BuildContext:
    g: DirectedGraph
    k: int
    kmax: int
    cur: list[int]
    pre: Optional[list[int]]
    tree: KTree
    cuf: CufState
    # nodes still waiting for a parent, kept in creation order
    pending: dict[int, None] = field(default_factory=dict)
    edge_touches: int = 0
    repair: bool = True


def batch_union(ctx: BuildContext, vertices: list[int]) -> None:
    """Union every vertex with its neighbours at the same or a deeper level."""
    cur, cuf = ctx.cur, ctx.cuf
    out_adj, in_adj = ctx.g.out_adj, ctx.g.in_adj
    for v in vertices:
        cv = cur[v]
        for adj in (out_adj[v], in_adj[v]):
            ctx.edge_touches += len(adj)
            for u in adj:
                if cur[u] >= cv:
                    cuf.union(u, v, cur)


def build_a_level(ctx: BuildContext, l: int, level_vertices: list[int]) -> list[int]:
    """Create the level-``l`` nodes of the current tree; returns their ids."""
    if not level_vertices:
        return []
    cur, cuf, tree = ctx.cur, ctx.cuf, ctx.tree
    out_adj, in_adj = ctx.g.out_adj, ctx.g.in_adj
    vmap, hook = tree.vmap, cuf.hook
    pending = ctx.pending

    # children: subtree roots reachable from each vertex through deeper neighbours.
    # Must run before any entry is reset below.
    kids: dict[int, dict[int, int]] = {}
    for v in level_vertices:
        cv = cur[v]
        found = None
        for adj in (out_adj[v], in_adj[v]):
            ctx.edge_touches += len(adj)
            for u in adj:
                if cur[u] > cv:
                    h = hook[cuf.find(u)]
                    p = vmap[h]
                    if p < 0:
                        raise BuildCorruption(f"k={ctx.k} l={l}: hook of {u} has no node")
                    if found is None:
                        found = {}
                    found[p] = h
                    pending.pop(p, None)
        if found:
            kids[v] = found

    # connectivity for this level
    reused = []
    fresh = []
    pre = ctx.pre
    for v in level_vertices:
        if ctx.k != ctx.kmax and pre[v] == l:
            cuf.quick_reset(v)
            reused.append(v)
        else:
            cuf.make_set(v)
            fresh.append(v)
    batch_union(ctx, fresh)
    group = cuf.group
    for v in reused:
        cuf.union(v, group[v], cur)
        # a reused vertex skips batch_union, so its edges into deeper
        # subtrees outside its old component would otherwise be lost
        if ctx.repair:
            for h in kids.get(v, {}).values():
                cuf.union(v, h, cur)

    # one node per union-find component
    comps: dict[int, list[int]] = {}
    for v in level_vertices:
        comps.setdefault(cuf.find(v), []).append(v)
    created = []
    nodes = tree.nodes
    for members in comps.values():
        p = tree.add_node(l, members)
        pending[p] = None
        created.append(p)
        for v in members:
            vmap[v] = p
            for c in kids.get(v, ()):
                parent = nodes[c].parent
                if parent == p:
                    continue
                if parent != -1:
                    raise BuildCorruption(f"k={ctx.k} l={l}: node {c} linked under {parent} and {p}")
                tree.link(p, c)
        cuf.update(members, cur)
    return created


def build_bottomup(
    g: DirectedGraph,
    on_level: Callable[[BuildContext, int], None] | None = None,
    verbatim: bool = False,
) -> DForest:
    """Build the whole forest bottom-up.

    ``on_level(ctx, l)`` is called after every processed level; tests use it
    to inspect the union-find state mid-build.  ``verbatim=True`` disables the
    extra unions for reused vertices; that variant can split a component and
    raise BuildCorruption, and exists only to demonstrate the problem.
    """
    t0 = time.perf_counter()
    n = g.n
    kmax = max_k(g)
    cuf = CufState(n)
    trees: list[KTree] = [None] * (kmax + 1)  # type: ignore[list-item]
    pre: list[int] | None = None
    touches = 0
    for k in range(kmax, -1, -1):
        levels = decompose_for_k(g, k)
        touches += 2 * g.m
        tree = KTree(k, n)
        ctx = BuildContext(g, k, kmax, levels.maxl, pre, tree, cuf, repair=not verbatim)
        groups = group_by_level(levels)
        for l in range(len(groups) - 1, -1, -1):
            build_a_level(ctx, l, groups[l])
            if on_level is not None:
                on_level(ctx, l)
        for p in ctx.pending:
            tree.link(tree.root, p)
        trees[k] = tree
        touches += ctx.edge_touches
        pre = levels.maxl
    f = DForest(g.labels, g.m, trees, builder="bottomup")
    f.stats = {"edge_touches": touches, "find_steps": cuf.steps, "seconds": time.perf_counter() - t0}
    return f


def build_ktree(g: DirectedGraph, levels: CoreLevels) -> KTree:
    """Build a single k-tree from its level array, without cross-k reuse."""
    k = levels.k
    tree = KTree(k, g.n)
    ctx = BuildContext(g, k, k, levels.maxl, None, tree, CufState(g.n))
    groups = group_by_level(levels)
    for l in range(len(groups) - 1, -1, -1):
        build_a_level(ctx, l, groups[l])
    for p in ctx.pending:
        tree.link(tree.root, p)
    return tree
