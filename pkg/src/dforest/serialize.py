"""Binary index format.

Little-endian throughout::

    "DFOR" | version u32 | n u64 | m u64 | kmax u32 (0xFFFFFFFF = none)
    label count u64, then per label: byte length u32 + UTF-8 bytes
    per k-tree: node count u32, then nodes in preorder as
        core_num i32 | parent preorder index i32 (-1 for root)
        | vSet size u32 | sorted vertex ids u32...
    crc32 of everything above, u32

Vertex maps are rebuilt from the vSets on load.
"""
from __future__ import annotations

import struct
import zlib
from typing import BinaryIO

from .forest import FORMAT_VERSION, DForest, KTree, TreeNode, canonicalize

MAGIC = b"DFOR"
NO_KMAX = 0xFFFFFFFF


class IndexFormatError(ValueError):
    code = "format"


class BadMagicError(IndexFormatError):
    code = "bad-magic"


class UnsupportedVersionError(IndexFormatError):
    code = "unsupported-version"


class TruncatedIndexError(IndexFormatError):
    code = "truncated"


class ChecksumError(IndexFormatError):
    code = "checksum"


class OverlapError(IndexFormatError):
    code = "vset-overlap"


class MalformedIndexError(IndexFormatError):
    code = "malformed"


def to_bytes(f: DForest) -> bytes:
    parts = [MAGIC, struct.pack("<IQQI", FORMAT_VERSION, f.n, f.m, NO_KMAX if f.kmax < 0 else f.kmax)]
    parts.append(struct.pack("<Q", f.n))
    for lab in f.labels:
        b = lab.encode("utf-8")
        parts.append(struct.pack("<I", len(b)))
        parts.append(b)
    for t in f.trees:
        parts.append(struct.pack("<I", len(t.nodes)))
        for node in t.nodes:
            parts.append(struct.pack("<iiI", node.core_num, node.parent, len(node.vset)))
            parts.append(struct.pack(f"<{len(node.vset)}I", *node.vset))
    body = b"".join(parts)
    return body + struct.pack("<I", zlib.crc32(body))


def _require_canonical(f: DForest) -> None:
    for t in f.trees:
        nodes = t.nodes
        if t.root != 0:
            raise ValueError("serialize requires canonical form")
        for i, node in enumerate(nodes):
            if node.parent >= i or any(a >= b for a, b in zip(node.vset, node.vset[1:])):
                raise ValueError("serialize requires canonical form")


def serialize(f: DForest, sink: BinaryIO) -> int:
    """Write ``f`` (already canonical) to ``sink``; returns bytes written."""
    _require_canonical(f)
    data = to_bytes(f)
    sink.write(data)
    return len(data)


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, fmt: str):
        size = struct.calcsize(fmt)
        if self.pos + size > len(self.data):
            raise TruncatedIndexError(f"index truncated at byte {self.pos}")
        out = struct.unpack_from(fmt, self.data, self.pos)
        self.pos += size
        return out

    def raw(self, size: int) -> bytes:
        if self.pos + size > len(self.data):
            raise TruncatedIndexError(f"index truncated at byte {self.pos}")
        out = self.data[self.pos:self.pos + size]
        self.pos += size
        return out


def from_bytes(data: bytes) -> DForest:
    if len(data) < 4 or data[:4] != MAGIC:
        raise BadMagicError("not a D-Forest index (bad magic)")
    r = _Reader(data)
    r.pos = 4
    (version,) = r.take("<I")
    if version != FORMAT_VERSION:
        raise UnsupportedVersionError(f"unsupported index format version {version}")
    n, m, kmax_raw = r.take("<QQI")
    body, (crc,) = data[:-4], struct.unpack("<I", data[-4:])
    if zlib.crc32(body) != crc:
        # distinguish a cut-off file from a corrupted one where we can
        try:
            _parse_body(_Reader(body), n, m, kmax_raw)
        except TruncatedIndexError:
            raise
        except IndexFormatError:
            pass
        raise ChecksumError("index checksum mismatch")
    return _parse_body(_Reader(body), n, m, kmax_raw)


def _parse_body(r: _Reader, n: int, m: int, kmax_raw: int) -> DForest:
    r.pos = 4 + struct.calcsize("<IQQI")
    kmax = -1 if kmax_raw == NO_KMAX else kmax_raw
    (count,) = r.take("<Q")
    if 4 * n > len(r.data):
        raise TruncatedIndexError(f"n={n} labels cannot fit in {len(r.data)} bytes")
    if count != n:
        raise MalformedIndexError(f"label count {count} != n {n}")
    labels = []
    for _ in range(count):
        (size,) = r.take("<I")
        try:
            labels.append(r.raw(size).decode("utf-8"))
        except UnicodeDecodeError as exc:
            raise MalformedIndexError(f"bad label encoding: {exc}") from None
    trees = []
    for k in range(kmax + 1):
        (count,) = r.take("<I")
        tree = KTree(k, n)
        tree.nodes = []
        vmap = tree.vmap
        for i in range(count):
            core_num, parent, size = r.take("<iiI")
            vset = list(r.take(f"<{size}I")) if size else []
            if (i == 0) != (parent == -1) or parent >= i:
                raise MalformedIndexError(f"k={k}: bad parent index {parent} at node {i}")
            node = TreeNode(parent, core_num, vset)
            tree.nodes.append(node)
            if parent >= 0:
                tree.nodes[parent].children.append(i)
            for v in vset:
                if v >= n:
                    raise MalformedIndexError(f"k={k}: vertex id {v} out of range")
                if vmap[v] >= 0:
                    raise OverlapError(f"k={k}: vertex {v} stored in two nodes")
                vmap[v] = i
        if not tree.nodes:
            raise MalformedIndexError(f"k={k}: tree without root")
        trees.append(tree)
    if r.pos != len(r.data):
        raise MalformedIndexError(f"{len(r.data) - r.pos} trailing bytes")
    return DForest(labels, m, trees)


def deserialize(source: BinaryIO) -> DForest:
    return from_bytes(source.read())


def save(f: DForest, path) -> int:
    with open(path, "wb") as fh:
        return serialize(canonicalize(f), fh)


def load(path) -> DForest:
    with open(path, "rb") as fh:
        return deserialize(fh)
