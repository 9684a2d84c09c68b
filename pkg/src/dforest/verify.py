"""Self-checks used by ``dforest verify`` and the test-suite."""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import islice

from .bottomup import build_bottomup
from .cores import decompose_for_k, online_csd, peel, component_of
from .forest import DForest, InvariantError, canonicalize, check_structure, query_csd
from .graph import DirectedGraph
from .scsd import query_scsd
from .serialize import to_bytes
from .topdown import build_topdown


@dataclass
class VerifyReport:
    checked_queries: int = 0
    checked_scsd: int = 0
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def check_semantics(g: DirectedGraph, f: DForest) -> None:
    """Recompute cores and compare them node by node with the forest.

    Every vSet member must sit at exactly its maximum l, and every subtree
    must be one weak component of the (k, core_num)-core.
    """
    check_structure(f)
    for t in f.trees:
        levels = decompose_for_k(g, t.k)
        for i, node in enumerate(t.nodes):
            if i == t.root:
                continue
            for v in node.vset:
                if levels.maxl[v] != node.core_num:
                    raise InvariantError(f"k={t.k}: vertex {v} at level {node.core_num}, max l is {levels.maxl[v]}")
            under = set(t.vertices_under(i))
            alive = peel(g, t.k, node.core_num)
            comp = component_of(g, alive, node.vset[0])
            if under != comp:
                raise InvariantError(f"k={t.k}: subtree of node {i} is not a ({t.k},{node.core_num}) component")
        members = {v for v, x in enumerate(levels.maxl) if x >= 0}
        if members != {v for v, p in enumerate(t.vmap) if p >= 0}:
            raise InvariantError(f"k={t.k}: vSets do not cover the ({t.k},0)-core")


def _sweep(g: DirectedGraph, f: DForest):
    for k, tree in enumerate(f.trees):
        lmax = max((node.core_num for node in tree.nodes), default=-1)
        for l in range(lmax + 1):
            for q in range(g.n):
                yield q, k, l


def verify_graph(g: DirectedGraph, budget: int = 100_000, scsd_limit: int = 100,
                 index: DForest | None = None) -> VerifyReport:
    """Build both ways, compare, and sweep queries against the oracles.

    ``budget`` caps the number of (q, k, l) triples checked.  The SCSD
    fixpoint oracle is brute force and only runs when ``g.n <= scsd_limit``.
    """
    from .testkit import naive_scsd  # brute force, kept out of module import time

    rep = VerifyReport()
    top = canonicalize(build_topdown(g))
    bot = canonicalize(build_bottomup(g))
    if to_bytes(top) != to_bytes(bot):
        rep.failures.append("topdown and bottomup forests differ")
        return rep
    if index is not None and to_bytes(canonicalize(index)) != to_bytes(bot):
        rep.failures.append("stored index differs from a fresh build")
        return rep
    try:
        check_semantics(g, bot)
    except InvariantError as exc:
        rep.failures.append(f"invariant: {exc}")
        return rep
    for q, k, l in islice(_sweep(g, bot), budget):
        got = query_csd(bot, q, k, l)
        want = online_csd(g, q, k, l)
        rep.checked_queries += 1
        if got.vertices != want:
            rep.failures.append(f"csd q={g.labels[q]} k={k} l={l}: index {sorted(got.vertices)} != online {sorted(want)}")
            return rep
        if got.vertices and got.nodes_visited > len(got.vertices) + 1:
            rep.failures.append(f"csd q={g.labels[q]} k={k} l={l}: visited {got.nodes_visited} nodes for {len(got.vertices)} vertices")
            return rep
        if g.n <= scsd_limit and got.vertices:
            s = query_scsd(g, bot, q, k, l).vertices
            rep.checked_scsd += 1
            if s != naive_scsd(g, q, k, l):
                rep.failures.append(f"scsd q={g.labels[q]} k={k} l={l}: fixpoint mismatch")
                return rep
    return rep
