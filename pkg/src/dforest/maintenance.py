"""Keeping a D-Forest in sync with edge and vertex updates.

Every update recomputes the level array of each k-tree it can affect and
diffs it against the retained one.  Small changes are patched into the tree
in place; anything else rebuilds that single k-tree.  Either way the result
equals a from-scratch build on the updated graph.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field

from .bottomup import build_bottomup, build_ktree
from .cores import CoreLevels, decompose_for_k, in_core_numbers
from .forest import DForest, KTree, canonicalize_tree
from .graph import DirectedGraph


class MaintenanceError(ValueError):
    pass


@dataclass
class OpReport:
    op: str
    noop: bool = False
    untouched: list[int] = field(default_factory=list)
    patched: list[int] = field(default_factory=list)
    rebuilt: list[int] = field(default_factory=list)
    seconds: float = 0.0

    @property
    def affected(self) -> int:
        return len(self.patched) + len(self.rebuilt)


class MaintainableIndex:
    def __init__(self, graph: DirectedGraph, forest: DForest | None = None):
        self.graph = graph.copy()
        if forest is None:
            forest = build_bottomup(self.graph)
        elif forest.n != graph.n or forest.labels != graph.labels:
            raise MaintenanceError("index and graph disagree on the vertex set")
        # private copies: fast paths patch trees in place
        trees = [canonicalize_tree(t, graph.n) for t in forest.trees]
        self.forest = DForest(self.graph.labels, self.graph.m, trees, forest.builder)
        self.levels = [decompose_for_k(self.graph, k) for k in range(len(self.forest.trees))]

    @property
    def trees(self) -> list[KTree]:
        return self.forest.trees

    def _vid(self, label: str, create: bool = False) -> int:
        try:
            return self.graph.id_of(label)
        except KeyError:
            if not create:
                raise MaintenanceError(f"unknown vertex {label!r}") from None
        self.add_vertex(label)
        return self.graph.id_of(label)

    # edges

    def insert_edge(self, u: str, v: str) -> OpReport:
        t0 = time.perf_counter()
        if u == v:
            return OpReport(f"+ {u} {v}", noop=True)
        a, b = self._vid(u, create=True), self._vid(v, create=True)
        rep = OpReport(f"+ {u} {v}")
        if self.graph.has_edge(a, b):
            rep.noop = True
            return rep
        ic = in_core_numbers(self.graph)
        self.graph._add_edge(a, b)
        self._refresh(min(ic[a], ic[b]) + 1, a, b, True, rep)
        rep.seconds = time.perf_counter() - t0
        return rep

    def delete_edge(self, u: str, v: str) -> OpReport:
        t0 = time.perf_counter()
        rep = OpReport(f"- {u} {v}")
        try:
            a, b = self.graph.id_of(u), self.graph.id_of(v)
        except KeyError:
            rep.noop = True
            return rep
        if not self.graph.has_edge(a, b):
            rep.noop = True
            return rep
        ic = in_core_numbers(self.graph)
        self.graph._remove_edge(a, b)
        self._refresh(min(ic[a], ic[b]), a, b, False, rep)
        rep.seconds = time.perf_counter() - t0
        return rep

    def _refresh(self, bound: int, u: int, v: int, inserted: bool, rep: OpReport) -> None:
        g = self.graph
        trees, levels = self.forest.trees, self.levels
        self.forest.m = g.m
        rep.untouched = list(range(bound + 1, len(trees)))
        for k in range(bound + 1):
            new = decompose_for_k(g, k)
            if new.lmax < 0:
                # nesting in k: every deeper tree is empty as well
                rep.rebuilt.extend(range(k, len(trees)))
                del trees[k:], levels[k:]
                break
            if k == len(trees):
                trees.append(build_ktree(g, new))
                levels.append(new)
                rep.rebuilt.append(k)
                continue
            old = levels[k].maxl
            changed = [x for x, (p, q) in enumerate(zip(old, new.maxl)) if p != q]
            levels[k] = new
            tree = trees[k]
            if not changed and (old[u] < 0 or old[v] < 0):
                rep.untouched.append(k)
                continue
            # action: None keeps the tree, "patch" canonicalizes it, "rebuild" starts over
            action = "rebuild"
            if inserted:
                if not changed:
                    action = "patch" if _merge_along_edge(tree, new.maxl, u, v) else None
                elif len(changed) == 1 and changed[0] in (u, v):
                    x = changed[0]
                    if 0 <= old[x] and new.maxl[x] == old[x] + 1:
                        _move_down(g, tree, new.maxl, x, other=v if x == u else u)
                        _merge_along_edge(tree, new.maxl, u, v)
                        action = "patch"
            elif not changed and _still_joined(g, new.maxl, u, v):
                action = None
            if action is None:
                rep.untouched.append(k)
            elif action == "patch":
                trees[k] = canonicalize_tree(tree, g.n)
                rep.patched.append(k)
            else:
                trees[k] = build_ktree(g, new)
                rep.rebuilt.append(k)
        rep.untouched.sort()

    # vertices

    def add_vertex(self, label: str, edges: list[tuple[str, str]] = ()) -> list[OpReport]:
        """Register ``label`` as an isolated vertex, then insert ``edges``."""
        g = self.graph
        try:
            g.id_of(label)
        except KeyError:
            pass
        else:
            raise MaintenanceError(f"vertex {label!r} already exists")
        _check_incident(label, edges)
        t0 = time.perf_counter()
        x = g._add_vertex(label)
        self.forest._ids = None
        for t in self.trees:
            t.vmap.append(-1)
        for lv in self.levels:
            lv.maxl.append(-1)
        if not self.trees:
            self.trees.append(KTree(0, g.n))
            self.levels.append(CoreLevels(0, [-1] * g.n))
        self.levels[0].maxl[x] = 0
        tree0 = self.trees[0]
        tree0.vmap[x] = tree0.add_node(0, [x], tree0.root)
        self.trees[0] = canonicalize_tree(tree0, g.n)
        reports = [OpReport(f"+v {label}", patched=[0], untouched=list(range(1, len(self.trees))),
                            seconds=time.perf_counter() - t0)]
        for a, b in edges:
            reports.append(self.insert_edge(a, b))
        return reports

    def remove_vertex(self, label: str) -> list[OpReport]:
        """Delete every edge touching ``label``, then drop the vertex."""
        g = self.graph
        x = self._vid(label)
        reports = []
        for w in list(g.out_adj[x]):
            reports.append(self.delete_edge(label, g.labels[w]))
        for w in list(g.in_adj[x]):
            reports.append(self.delete_edge(g.labels[w], label))
        t0 = time.perf_counter()
        # now isolated: a singleton level-0 node in the 0-tree only
        tree0 = self.trees[0]
        node = tree0.vmap[x]
        tree0.nodes[tree0.root].children.remove(node)
        tree0.nodes[node].vset = []
        g._remove_isolated_vertex(x)
        self.forest._ids = None
        n = g.n
        for t in self.trees:
            del t.vmap[x]
            for nd in t.nodes:
                nd.vset = [w - 1 if w > x else w for w in nd.vset]
        for lv in self.levels:
            del lv.maxl[x]
        if n == 0:
            self.trees.clear()
            self.levels.clear()
        else:
            self.trees[0] = canonicalize_tree(tree0, n)
        reports.append(OpReport(f"-v {label}", patched=[0], seconds=time.perf_counter() - t0))
        return reports

    def update_vertex(self, op: str, label: str, edges: list[tuple[str, str]] = ()) -> list[OpReport]:
        if op == "add":
            return self.add_vertex(label, list(edges))
        if op == "remove":
            if edges:
                raise MaintenanceError("remove takes no edge list")
            return self.remove_vertex(label)
        raise MaintenanceError(f"unknown vertex op {op!r}")


def _check_incident(label: str, edges) -> None:
    for a, b in edges:
        if label not in (a, b):
            raise MaintenanceError(f"edge ({a}, {b}) does not touch {label!r}")


def _chain(tree: KTree, p: int, cap: int) -> tuple[list[int], int]:
    """Ancestors of ``p`` (itself included) with core_num <= cap, bottom-up.

    Also returns the topmost path node above ``cap`` (-1 if there is none).
    """
    nodes = tree.nodes
    out = []
    head = -1
    while p != tree.root:
        if nodes[p].core_num <= cap:
            out.append(p)
        else:
            head = p
        p = nodes[p].parent
    return out, head


def _detach(tree: KTree, c: int) -> None:
    nodes = tree.nodes
    nodes[nodes[c].parent].children.remove(c)
    nodes[c].parent = -1


def _merge_along_edge(tree: KTree, maxl: list[int], u: int, v: int) -> bool:
    """Fuse the root paths of u and v up to level min(maxl[u], maxl[v]).

    Adding an edge joins the components of u and v at every level up to the
    smaller of their levels.  The path nodes just above that level then hang
    below the deepest fused node.  Returns False when u and v were already
    joined.
    """
    cap = min(maxl[u], maxl[v])
    a, head_a = _chain(tree, tree.vmap[u], cap)
    b, head_b = _chain(tree, tree.vmap[v], cap)
    shared = set(a) & set(b)
    a = [p for p in a if p not in shared]
    b = [p for p in b if p not in shared]
    if not a and not b:
        return False
    nodes = tree.nodes
    top = max(shared, key=lambda p: nodes[p].core_num) if shared else tree.root
    merged = sorted(a + b, key=lambda p: -nodes[p].core_num)
    for p in merged:
        _detach(tree, p)
    keep: list[int] = []
    for p in merged:
        if keep and nodes[keep[-1]].core_num == nodes[p].core_num:
            q = keep[-1]
            nodes[q].vset.extend(nodes[p].vset)
            for w in nodes[p].vset:
                tree.vmap[w] = q
            for c in nodes[p].children:
                nodes[c].parent = q
                nodes[q].children.append(c)
            nodes[p].vset, nodes[p].children = [], []
        else:
            keep.append(p)
    for lower, upper in zip(keep, keep[1:]):
        tree.link(upper, lower)
    tree.link(top, keep[-1])
    bottom = keep[0]
    for head in (head_a, head_b):
        if head >= 0 and nodes[head].parent != bottom:
            _detach(tree, head)
            tree.link(bottom, head)
    return True


def _move_down(g: DirectedGraph, tree: KTree, maxl: list[int], x: int, other: int) -> None:
    """Move x from its level-a node into the level a+1 below it.

    Uses x's neighbours in the graph before the update, so the edge to
    ``other`` is left for ``_merge_along_edge``.
    """
    nodes, vmap = tree.nodes, tree.vmap
    home = vmap[x]
    level = nodes[home].core_num + 1
    skip_other = True
    adjacent: dict[int, None] = {}
    for adj in (g.out_adj[x], g.in_adj[x]):
        for w in adj:
            if w == other and skip_other:
                # the new edge appears once; a reverse edge may also exist
                skip_other = False
                continue
            if maxl[w] >= level:
                p = vmap[w]
                while nodes[p].parent != home:
                    p = nodes[p].parent
                adjacent[p] = None
    nodes[home].vset.remove(x)
    same = [p for p in adjacent if nodes[p].core_num == level]
    if same:
        target = same[0]
        for p in same[1:]:
            _detach(tree, p)
            nodes[target].vset.extend(nodes[p].vset)
            for w in nodes[p].vset:
                vmap[w] = target
            for c in list(nodes[p].children):
                nodes[c].parent = target
                nodes[target].children.append(c)
            nodes[p].vset, nodes[p].children = [], []
    else:
        target = tree.add_node(level, [], home)
    nodes[target].vset.append(x)
    vmap[x] = target
    for p in adjacent:
        if nodes[p].core_num > level:
            _detach(tree, p)
            tree.link(target, p)
    if not nodes[home].vset:
        up = nodes[home].parent
        _detach(tree, home)
        for c in list(nodes[home].children):
            nodes[c].parent = -1
            tree.link(up, c)
        nodes[home].children = []


def _still_joined(g: DirectedGraph, maxl: list[int], u: int, v: int) -> bool:
    """After deleting u->v: are u and v still weakly joined at their common level?

    Being joined at level min(maxl[u], maxl[v]) implies being joined at every
    lower level, so no component of the tree splits.
    """
    if g.has_edge(v, u):
        return True
    cap = min(maxl[u], maxl[v])
    seen = {u}
    stack = [u]
    out_adj, in_adj = g.out_adj, g.in_adj
    while stack:
        w = stack.pop()
        for adj in (out_adj[w], in_adj[w]):
            for y in adj:
                if y not in seen and maxl[y] >= cap:
                    if y == v:
                        return True
                    seen.add(y)
                    stack.append(y)
    return False
