"""Command line front end.

Exit codes: 0 success, 2 IO/parse/format error, 3 unknown vertex,
4 verification failure.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import random
import statistics
import sys
import time

from .bottomup import build_bottomup
from .cores import kl_core, online_csd
from .forest import DForest, UnknownVertexError, canonicalize, query_csd
from .graph import DirectedGraph, EdgeListParseError, load_edge_list
from .maintenance import MaintainableIndex, MaintenanceError
from .scsd import query_scsd
from .serialize import IndexFormatError, load, save
from .topdown import build_topdown

EXIT_OK, EXIT_IO, EXIT_UNKNOWN, EXIT_VERIFY = 0, 2, 3, 4
BENCH_FIELDS = ["query", "size", "idx_us", "oracle_us", "nodes_visited"]
BUILDERS = {"topdown": build_topdown, "bottomup": build_bottomup}

log = logging.getLogger("dforest")


class UsageError(Exception):
    pass


def label_key(label: str):
    return (0, int(label), "") if label.isdigit() else (1, 0, label)


def _emit(fmt: str, record: dict, out) -> None:
    if fmt == "json":
        out.write(json.dumps(record) + "\n")
    elif fmt == "csv":
        w = csv.DictWriter(out, fieldnames=list(record))
        w.writeheader()
        w.writerow(record)
    else:
        for key, val in record.items():
            out.write(f"{key}: {val}\n")


def run_build(args, out) -> int:
    g = load_edge_list(args.graph)
    f = BUILDERS[args.method](g)
    size = save(f, args.output)
    _emit(args.format, {
        "n": g.n, "m": g.m, "kmax": f.kmax, "method": args.method,
        "build_seconds": round(f.stats["seconds"], 6),
        "nodes": sum(len(t) for t in f.trees),
        "peak_tree_nodes": max((len(t) for t in f.trees), default=0),
        "index_bytes": size,
    }, out)
    return EXIT_OK


def run_query(args, out) -> int:
    f = load(args.index)
    q = f.id_of(args.q)
    if args.scsd:
        if not args.graph:
            raise UsageError("--scsd needs --graph")
        g = load_edge_list(args.graph)
        if g.labels != f.labels:
            g = _align(g, f)
        res = query_scsd(g, f, q, args.k, args.l)
    else:
        res = query_csd(f, q, args.k, args.l)
    labels = sorted((f.labels[v] for v in res.vertices), key=label_key)
    if args.format == "json":
        out.write(json.dumps({"community": labels, "size": len(labels),
                              "nodes_visited": res.nodes_visited,
                              "elapsed_us": round(res.elapsed * 1e6, 3)}) + "\n")
    else:
        out.write((" ".join(labels) if labels else "(empty)") + "\n")
        out.write(f"size: {len(labels)}\nnodes_visited: {res.nodes_visited}\n"
                  f"elapsed_us: {res.elapsed * 1e6:.3f}\n")
    return EXIT_OK


def _align(g: DirectedGraph, f: DForest) -> DirectedGraph:
    """Renumber ``g`` to the index's vertex ids."""
    if sorted(g.labels) != sorted(f.labels):
        raise IndexFormatError("graph and index have different vertex sets")
    edges = [(f.id_of(g.labels[u]), f.id_of(g.labels[v])) for u, v in g.edges()]
    return DirectedGraph.from_edges(f.n, edges, f.labels)


def run_verify(args, out) -> int:
    from .verify import verify_graph

    g = load_edge_list(args.graph)
    index = None
    if args.index:
        index = load(args.index)
        if g.labels != index.labels:
            g = _align(g, index)
    rep = verify_graph(g, budget=args.budget, index=index)
    _emit(args.format, {"ok": rep.ok, "csd_queries": rep.checked_queries,
                        "scsd_queries": rep.checked_scsd,
                        "first_failure": rep.failures[0] if rep.failures else ""}, out)
    return EXIT_OK if rep.ok else EXIT_VERIFY


def pick_queries(g: DirectedGraph, count: int, k: int, seed: int) -> tuple[list[int], int]:
    """Sample query vertices from the (k,k)-core, shrinking k if it is empty."""
    core = kl_core(g, k, k)
    used = k
    while not core and used > 0:
        used -= 1
        core = kl_core(g, used, used)
    if used != k:
        log.warning("(%d,%d)-core is empty; sampling from the (%d,%d)-core", k, k, used, used)
    pool = sorted(core)
    rng = random.Random(seed)
    if not pool or count <= 0:
        return [], used
    if count <= len(pool):
        return rng.sample(pool, count), used
    return rng.choices(pool, k=count), used


def _median_us(fn, repeats: int):
    times = []
    result = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        result = fn()
        times.append(time.perf_counter() - t0)
    return statistics.median(times) * 1e6, result


def bench_queries(g: DirectedGraph, f: DForest, queries: list[int], k: int, l: int,
                  repeats: int = 3) -> list[dict]:
    """Time index and online answers for every query vertex."""
    rows = []
    for q in queries:
        idx_us, res = _median_us(lambda: query_csd(f, q, k, l), repeats)
        oracle_us, want = _median_us(lambda: online_csd(g, q, k, l), repeats)
        if res.vertices != want:
            raise AssertionError(f"index answer differs from online answer for {g.labels[q]}")
        rows.append({"query": g.labels[q], "size": len(res.vertices), "idx_us": round(idx_us, 3),
                     "oracle_us": round(oracle_us, 3), "nodes_visited": res.nodes_visited})
    return rows


def run_bench(args, out) -> int:
    g = load_edge_list(args.graph)
    f = BUILDERS[args.method](g)
    queries, used = pick_queries(g, args.queries, args.k, args.seed)
    rows = bench_queries(g, f, queries, used, used, args.repeats)
    if args.format == "json":
        out.write(json.dumps(rows) + "\n")
    else:
        w = csv.DictWriter(out, fieldnames=BENCH_FIELDS)
        w.writeheader()
        w.writerows(rows)
    if rows:
        idx = statistics.fmean(r["idx_us"] for r in rows)
        orc = statistics.fmean(r["oracle_us"] for r in rows)
        log.info("k=l=%d queries=%d mean idx %.1fus, mean online %.1fus, speedup %.1fx",
                 used, len(rows), idx, orc, orc / idx if idx else float("inf"))
    return EXIT_OK


def parse_ops(lines) -> list[tuple]:
    """Parse an update stream: ``+ u v``, ``- u v``, ``+v label``, ``-v label``."""
    ops = []
    for lineno, line in enumerate(lines, 1):
        toks = line.split()
        if not toks or toks[0].startswith("#"):
            continue
        if toks[0] in ("+", "-") and len(toks) == 3:
            ops.append((toks[0], toks[1], toks[2]))
        elif toks[0] in ("+v", "-v") and len(toks) == 2:
            ops.append((toks[0], toks[1]))
        else:
            raise EdgeListParseError(lineno, line.rstrip("\n"))
    return ops


def apply_op(ix: MaintainableIndex, op: tuple) -> list:
    kind = op[0]
    if kind == "+":
        return [ix.insert_edge(op[1], op[2])]
    if kind == "-":
        return [ix.delete_edge(op[1], op[2])]
    if kind == "+v":
        return ix.add_vertex(op[1])
    return ix.remove_vertex(op[1])


def run_maintain(args, out) -> int:
    from .serialize import to_bytes

    f = load(args.index)
    g = load_edge_list(args.graph)
    if g.labels != f.labels:
        g = _align(g, f)
    with open(args.ops, encoding="utf-8") as fh:
        ops = parse_ops(fh)
    ix = MaintainableIndex(g, f)
    writer = csv.writer(out)
    writer.writerow(["op", "us", "patched", "rebuilt", "untouched", "check"])
    for op in ops:
        t0 = time.perf_counter()
        try:
            reports = apply_op(ix, op)
        except MaintenanceError as exc:
            log.error("%s: %s", " ".join(op), exc)
            return EXIT_IO
        us = (time.perf_counter() - t0) * 1e6
        check = ""
        if args.check_rebuild:
            same = to_bytes(canonicalize(ix.forest)) == to_bytes(canonicalize(build_bottomup(ix.graph)))
            check = "ok" if same else "DIVERGED"
            if not same:
                log.error("index diverged from rebuild after %s", " ".join(op))
                return EXIT_VERIFY
        writer.writerow([" ".join(op), f"{us:.1f}", sum(len(r.patched) for r in reports),
                         sum(len(r.rebuilt) for r in reports),
                         sum(len(r.untouched) for r in reports), check])
    save(ix.forest, args.output or args.index)
    if args.graph_output:
        from .graph import write_edge_list
        with open(args.graph_output, "w", encoding="utf-8") as fh:
            write_edge_list(ix.graph, fh)
    return EXIT_OK


def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dforest", description="D-Forest community search over directed graphs")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build", help="build an index from an edge list")
    b.add_argument("graph")
    b.add_argument("-o", "--output", required=True)
    b.add_argument("--method", choices=sorted(BUILDERS), default="bottomup")
    b.add_argument("--format", choices=["text", "json", "csv"], default="text")
    b.set_defaults(func=run_build)

    q = sub.add_parser("query", help="answer a CSD (or SCSD) query from an index")
    q.add_argument("index")
    q.add_argument("--q", required=True, help="query vertex label")
    q.add_argument("--k", type=int, required=True)
    q.add_argument("--l", type=int, required=True)
    q.add_argument("--scsd", action="store_true", help="strongly connected variant")
    q.add_argument("--graph", help="edge list, required with --scsd")
    q.add_argument("--format", choices=["text", "json"], default="text")
    q.set_defaults(func=run_query)

    v = sub.add_parser("verify", help="cross-check builders, queries and invariants")
    v.add_argument("graph")
    v.add_argument("--index", help="also compare this stored index")
    v.add_argument("--budget", type=int, default=100_000, help="max (q,k,l) triples")
    v.add_argument("--format", choices=["text", "json", "csv"], default="text")
    v.set_defaults(func=run_verify)

    be = sub.add_parser("bench", help="time index queries against online peeling")
    be.add_argument("graph")
    be.add_argument("--queries", type=int, default=200)
    be.add_argument("--k", type=int, default=8, help="k = l used for sampling and querying")
    be.add_argument("--seed", type=int, default=0)
    be.add_argument("--repeats", type=int, default=3, help="timings per query; the median is kept")
    be.add_argument("--method", choices=sorted(BUILDERS), default="bottomup")
    be.add_argument("--format", choices=["csv", "json"], default="csv")
    be.set_defaults(func=run_bench)

    m = sub.add_parser("maintain", help="apply an update stream to an index")
    m.add_argument("index")
    m.add_argument("graph")
    m.add_argument("ops")
    m.add_argument("-o", "--output", help="where to write the updated index (default: in place)")
    m.add_argument("--graph-output", help="also write the updated edge list here")
    m.add_argument("--check-rebuild", action="store_true")
    m.set_defaults(func=run_maintain)
    return p


def main(argv=None, out=None) -> int:
    args = make_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s", stream=sys.stderr)
    out = out or sys.stdout
    try:
        return args.func(args, out)
    except UnknownVertexError as exc:
        log.error("unknown vertex %s", exc)
        return EXIT_UNKNOWN
    except (OSError, EdgeListParseError, IndexFormatError, UsageError) as exc:
        log.error("%s", exc)
        return EXIT_IO
