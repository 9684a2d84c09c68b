"""D-Forest: one containment tree per in-degree threshold k.

In the k-tree every subtree is one weakly connected component of some
(k,l)-core, where l is the ``core_num`` of the subtree root.  A node's
``vset`` holds only the vertices whose maximum l (for this k) equals its
``core_num``.  Node 0 is always a sentinel root with ``core_num == -1``.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field

ROOT_CORE = -1
FORMAT_VERSION = 1


class UnknownVertexError(KeyError):
    """Query vertex is not part of the indexed graph."""


@dataclass
class TreeNode:
    parent: int
    core_num: int
    vset: list[int] = field(default_factory=list)
    children: list[int] = field(default_factory=list)


class KTree:
    """Arena of nodes for one k plus the vertex -> node map."""

    def __init__(self, k: int, n: int):
        self.k = k
        self.nodes: list[TreeNode] = [TreeNode(-1, ROOT_CORE)]
        self.root = 0
        self.vmap = [-1] * n

    def add_node(self, core_num: int, vset: list[int], parent: int = -1) -> int:
        i = len(self.nodes)
        self.nodes.append(TreeNode(parent, core_num, vset))
        if parent >= 0:
            self.nodes[parent].children.append(i)
        return i

    def link(self, parent: int, child: int) -> None:
        self.nodes[child].parent = parent
        self.nodes[parent].children.append(child)

    def rebuild_vmap(self, n: int) -> None:
        vmap = [-1] * n
        for i, node in enumerate(self.nodes):
            for v in node.vset:
                vmap[v] = i
        self.vmap = vmap

    def subtree(self, p: int) -> list[int]:
        """Node ids of the subtree rooted at ``p`` in preorder."""
        out = []
        stack = [p]
        nodes = self.nodes
        while stack:
            i = stack.pop()
            out.append(i)
            stack.extend(reversed(nodes[i].children))
        return out

    def vertices_under(self, p: int) -> list[int]:
        vs: list[int] = []
        for i in self.subtree(p):
            vs.extend(self.nodes[i].vset)
        return vs

    def __len__(self) -> int:
        return len(self.nodes)


@dataclass
class CommunityResult:
    vertices: set[int]
    nodes_visited: int = 0
    elapsed: float = 0.0

    def __len__(self) -> int:
        return len(self.vertices)


class DForest:
    def __init__(self, labels: list[str], m: int, trees: list[KTree] | None = None, builder: str = ""):
        self.labels = labels
        self.m = m
        self.trees: list[KTree] = trees if trees is not None else []
        self.builder = builder
        self.stats: dict = {}
        self._ids: dict[str, int] | None = None

    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def kmax(self) -> int:
        return len(self.trees) - 1

    def id_of(self, label: str) -> int:
        if self._ids is None:
            self._ids = {lab: i for i, lab in enumerate(self.labels)}
        try:
            return self._ids[label]
        except KeyError:
            raise UnknownVertexError(label) from None

    def entry_count(self) -> int:
        """Stored vertex entries: vSet members plus vmap entries over all trees."""
        total = 0
        for t in self.trees:
            total += 2 * sum(len(node.vset) for node in t.nodes)
        return total

    def __repr__(self) -> str:
        return f"DForest(n={self.n}, m={self.m}, kmax={self.kmax}, builder={self.builder!r})"


def query_csd(f: DForest, q: int, k: int, l: int) -> CommunityResult:
    """Vertices of the (k,l)-core component containing ``q``.

    Locates q's node through the vertex map, climbs to the highest ancestor
    whose core_num is still >= l and returns its subtree.
    """
    t0 = time.perf_counter()
    if k < 0 or l < 0:
        raise ValueError(f"thresholds must be non-negative, got k={k}, l={l}")
    if not 0 <= q < f.n:
        raise UnknownVertexError(q)
    if k > f.kmax:
        return CommunityResult(set(), 0, time.perf_counter() - t0)
    tree = f.trees[k]
    p = tree.vmap[q]
    if p < 0:
        return CommunityResult(set(), 0, time.perf_counter() - t0)
    nodes = tree.nodes
    if nodes[p].core_num < l:
        return CommunityResult(set(), 1, time.perf_counter() - t0)
    while True:
        up = nodes[p].parent
        if up == tree.root or nodes[up].core_num < l:
            break
        p = up
    out: list[int] = []
    visited = 1  # the node that stopped the climb
    stack = [p]
    while stack:
        i = stack.pop()
        visited += 1
        node = nodes[i]
        out.extend(node.vset)
        stack.extend(node.children)
    return CommunityResult(set(out), visited, time.perf_counter() - t0)


def _min_under(tree: KTree) -> list[int]:
    nodes = tree.nodes
    best = [0] * len(nodes)
    order = tree.subtree(tree.root)
    for i in reversed(order):
        node = nodes[i]
        lo = min(node.vset) if node.vset else 1 << 62
        for c in node.children:
            if best[c] < lo:
                lo = best[c]
        best[i] = lo
    return best


def canonicalize_tree(tree: KTree, n: int) -> KTree:
    """Sorted vSets, children ordered by smallest vertex below them, preorder ids."""
    best = _min_under(tree)
    old = tree.nodes
    out = KTree(tree.k, n)
    out.nodes = []
    stack = [(tree.root, -1)]
    while stack:
        i, parent = stack.pop()
        node = old[i]
        j = len(out.nodes)
        out.nodes.append(TreeNode(parent, node.core_num, sorted(node.vset)))
        if parent >= 0:
            out.nodes[parent].children.append(j)
        kids = sorted(node.children, key=best.__getitem__)
        stack.extend((c, j) for c in reversed(kids))
    out.root = 0
    out.rebuild_vmap(n)
    return out


def canonicalize(f: DForest) -> DForest:
    g = DForest(f.labels, f.m, [canonicalize_tree(t, f.n) for t in f.trees], f.builder)
    g.stats = f.stats
    return g


def dump_text(f: DForest) -> str:
    """One line per node: k, depth, core_num and sorted member labels."""
    lines = [f"# n={f.n} m={f.m} kmax={f.kmax}"]
    lab = f.labels
    for t in f.trees:
        depth = {t.root: 0}
        for i in t.subtree(t.root):
            node = t.nodes[i]
            if node.parent >= 0:
                depth[i] = depth[node.parent] + 1
            names = " ".join(sorted(lab[v] for v in node.vset))
            lines.append(f"k={t.k} {'  ' * depth[i]}[{node.core_num}] {names}".rstrip())
    return "\n".join(lines) + "\n"


class InvariantError(AssertionError):
    pass


def check_structure(f: DForest) -> None:
    """Raise InvariantError if any shape invariant is broken.

    Covers parent/child symmetry, the root sentinel, strictly increasing
    core numbers, non-empty vSets, disjoint vSets and vmap consistency.
    Semantic checks against recomputed cores live in ``verify``.
    """
    for t in f.trees:
        nodes = t.nodes
        root = nodes[t.root]
        if root.core_num != ROOT_CORE or root.vset or root.parent != -1:
            raise InvariantError(f"k={t.k}: malformed root")
        seen_nodes = t.subtree(t.root)
        if len(seen_nodes) != len(nodes) or len(set(seen_nodes)) != len(nodes):
            raise InvariantError(f"k={t.k}: nodes unreachable from root or shared")
        owner: dict[int, int] = {}
        for i, node in enumerate(nodes):
            for c in node.children:
                if nodes[c].parent != i:
                    raise InvariantError(f"k={t.k}: child {c} of {i} points elsewhere")
                if nodes[c].core_num <= node.core_num:
                    raise InvariantError(f"k={t.k}: core_num not increasing at {c}")
            if i != t.root and not node.vset:
                raise InvariantError(f"k={t.k}: empty vSet at node {i}")
            for v in node.vset:
                if v in owner:
                    raise InvariantError(f"k={t.k}: vertex {v} in nodes {owner[v]} and {i}")
                owner[v] = i
        for v, p in enumerate(t.vmap):
            if owner.get(v, -1) != p:
                raise InvariantError(f"k={t.k}: vmap[{v}]={p}, expected {owner.get(v, -1)}")
