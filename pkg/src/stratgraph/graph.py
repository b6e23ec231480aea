"""Undirected simple graphs stored as CSR arrays, plus SNAP edge-list loading.

Nodes are dense indices ``0..n-1``; ``Graph.ids`` maps each index back to
the integer id used in the source file.
"""
from __future__ import annotations

import gzip
import io
import os
from dataclasses import dataclass
from functools import cached_property
from typing import IO, Iterable, Union

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph

UNREACHABLE = -1


class ParseError(ValueError):
    """Malformed data line in an edge list."""

    def __init__(self, lineno: int, line: str, reason: str):
        self.lineno = lineno
        self.line = line
        super().__init__(f"line {lineno}: {reason}: {line!r}")


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable undirected simple graph.

    ``indices[indptr[u]:indptr[u + 1]]`` is the sorted neighbor list of ``u``.
    Build instances with :meth:`from_edges` rather than directly.
    """

    indptr: np.ndarray
    indices: np.ndarray
    ids: np.ndarray

    @classmethod
    def from_edges(cls, n: int, src, dst, ids=None) -> "Graph":
        """Build a graph on ``n`` nodes from endpoint arrays.

        Self-loops are dropped, both orientations are added and duplicates
        collapse to a single edge.
        """
        src = np.asarray(src, dtype=np.int64).ravel()
        dst = np.asarray(dst, dtype=np.int64).ravel()
        if src.shape != dst.shape:
            raise ValueError("src and dst must have the same length")
        if src.size and (min(src.min(), dst.min()) < 0 or max(src.max(), dst.max()) >= n):
            raise ValueError("edge endpoint out of range")
        keep = src != dst
        lo = np.minimum(src[keep], dst[keep])
        hi = np.maximum(src[keep], dst[keep])
        key = np.unique(lo * max(n, 1) + hi)
        return cls._from_canonical(n, key // max(n, 1), key % max(n, 1), ids)

    @classmethod
    def _from_canonical(cls, n: int, lo, hi, ids=None) -> "Graph":
        # lo < hi elementwise and no repeated pairs
        rows = np.concatenate([lo, hi])
        cols = np.concatenate([hi, lo])
        order = np.argsort(rows * max(n, 1) + cols)
        cols = cols[order]
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(rows, minlength=n), out=indptr[1:])
        if ids is None:
            ids = np.arange(n, dtype=np.int64)
        ids = np.asarray(ids, dtype=np.int64)
        if ids.shape != (n,):
            raise ValueError("ids must have one entry per node")
        return cls(indptr, cols, ids)

    @classmethod
    def empty(cls) -> "Graph":
        return cls.from_edges(0, [], [])

    @property
    def node_count(self) -> int:
        return len(self.indptr) - 1

    @property
    def edge_count(self) -> int:
        return len(self.indices) // 2

    def neighbors(self, u: int) -> np.ndarray:
        return self.indices[self.indptr[u]:self.indptr[u + 1]]

    def has_edge(self, u: int, v: int) -> bool:
        nbrs = self.neighbors(u)
        i = np.searchsorted(nbrs, v)
        return bool(i < len(nbrs) and nbrs[i] == v)

    @cached_property
    def edges(self) -> np.ndarray:
        """``(m, 2)`` array of edges with ``u < v``, sorted lexicographically."""
        src = np.repeat(np.arange(self.node_count, dtype=np.int64), np.diff(self.indptr))
        keep = src < self.indices
        return np.column_stack([src[keep], self.indices[keep]])

    @cached_property
    def adjacency(self) -> sparse.csr_matrix:
        data = np.ones(len(self.indices), dtype=np.int64)
        return sparse.csr_matrix(
            (data, self.indices, self.indptr), shape=(self.node_count, self.node_count)
        )

    @cached_property
    def _index_of(self) -> dict:
        return {int(x): i for i, x in enumerate(self.ids)}

    def index_of(self, external_id: int) -> int:
        try:
            return self._index_of[int(external_id)]
        except KeyError:
            raise KeyError(f"unknown node id {external_id}") from None

    def external_edges(self) -> np.ndarray:
        """Edges as original ids, each row ordered ``(min, max)`` and rows sorted."""
        e = self.ids[self.edges]
        e.sort(axis=1)
        return e[np.lexsort((e[:, 1], e[:, 0]))]

    def __repr__(self) -> str:
        return f"Graph(nodes={self.node_count}, edges={self.edge_count})"


Source = Union[str, os.PathLike, IO[bytes], IO[str], bytes]


def _open_lines(source: Source) -> Iterable[str]:
    if isinstance(source, (bytes, bytearray)):
        return io.TextIOWrapper(io.BytesIO(bytes(source)), encoding="utf-8")
    if isinstance(source, (str, os.PathLike)):
        path = os.fspath(source)
        if path.endswith(".gz"):
            return gzip.open(path, "rt", encoding="utf-8")
        return open(path, "r", encoding="utf-8")
    if isinstance(source, io.TextIOBase):
        return source
    return io.TextIOWrapper(source, encoding="utf-8")


def load_edge_list(source: Source) -> Graph:
    """Read a SNAP edge list into an undirected simple :class:`Graph`.

    ``source`` may be a path (``.gz`` is decompressed), a binary or text
    stream, or raw bytes. Lines starting with ``#`` and blank lines are
    skipped. Node indices follow the ascending order of the original ids.
    """
    stream = _open_lines(source)
    src: list[int] = []
    dst: list[int] = []
    try:
        for lineno, line in enumerate(stream, start=1):
            s = line.strip()
            if not s or s.startswith("#"):
                continue
            parts = s.split()
            if len(parts) != 2:
                raise ParseError(lineno, s, f"expected 2 tokens, got {len(parts)}")
            try:
                a, b = int(parts[0]), int(parts[1])
            except ValueError:
                raise ParseError(lineno, s, "non-integer node id") from None
            src.append(a)
            dst.append(b)
    finally:
        if isinstance(source, (str, os.PathLike)):
            stream.close()
    if not src:
        return Graph.empty()
    ext = np.array(src + dst, dtype=np.int64)
    ids, inv = np.unique(ext, return_inverse=True)
    m = len(src)
    return Graph.from_edges(len(ids), inv[:m], inv[m:], ids=ids)


def degrees(g: Graph) -> np.ndarray:
    """Degree of every node, indexed by dense node index."""
    return np.diff(g.indptr)


def _as_index_array(g: Graph, nodes) -> np.ndarray:
    if not isinstance(nodes, np.ndarray):
        nodes = list(nodes)
    nodes = np.unique(np.asarray(nodes, dtype=np.int64))
    if nodes.size and (nodes[0] < 0 or nodes[-1] >= g.node_count):
        raise ValueError("node index not in graph")
    return nodes


def induce_subgraph(g: Graph, nodes) -> Graph:
    """Subgraph on ``nodes`` (dense indices of ``g``) with every internal edge.

    The result re-indexes the chosen nodes in ascending order and keeps their
    original ids.
    """
    nodes = _as_index_array(g, nodes)
    pos = np.full(g.node_count, -1, dtype=np.int64)
    pos[nodes] = np.arange(len(nodes))
    # scan only the sampled nodes' neighbor lists
    nbrs = _gather_neighbors(g, nodes)
    src = np.repeat(nodes, g.indptr[nodes + 1] - g.indptr[nodes])
    keep = (src < nbrs) & (pos[nbrs] >= 0)
    return Graph._from_canonical(len(nodes), pos[src[keep]], pos[nbrs[keep]],
                                 ids=g.ids[nodes])


def edge_subgraph(g: Graph, nodes, edges: np.ndarray) -> Graph:
    """Subgraph on ``nodes`` containing only the given ``(k, 2)`` edges of ``g``."""
    nodes = _as_index_array(g, nodes)
    pos = np.full(g.node_count, -1, dtype=np.int64)
    pos[nodes] = np.arange(len(nodes))
    edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    pu, pv = pos[edges[:, 0]], pos[edges[:, 1]]
    if np.any(pu < 0) or np.any(pv < 0):
        raise ValueError("edge endpoint outside the node set")
    return Graph.from_edges(len(nodes), pu, pv, ids=g.ids[nodes])


def _gather_neighbors(g: Graph, frontier: np.ndarray) -> np.ndarray:
    starts = g.indptr[frontier]
    lens = g.indptr[frontier + 1] - starts
    total = int(lens.sum())
    if total == 0:
        return np.empty(0, dtype=np.int64)
    offsets = np.repeat(starts - np.concatenate([[0], np.cumsum(lens)[:-1]]), lens)
    return g.indices[offsets + np.arange(total)]


def bfs_distances(g: Graph, source: int) -> np.ndarray:
    """Hop distance from ``source`` to every node; unreachable nodes get -1."""
    if not 0 <= source < g.node_count:
        raise ValueError(f"source {source} not in graph")
    dist = np.full(g.node_count, UNREACHABLE, dtype=np.int64)
    dist[source] = 0
    frontier = np.array([source], dtype=np.int64)
    level = 0
    while frontier.size:
        level += 1
        nbrs = _gather_neighbors(g, frontier)
        nbrs = np.unique(nbrs[dist[nbrs] == UNREACHABLE])
        dist[nbrs] = level
        frontier = nbrs
    return dist


def connected_components(g: Graph) -> list[np.ndarray]:
    """Components as sorted index arrays, largest first (ties by smallest member)."""
    if g.node_count == 0:
        return []
    _, labels = csgraph.connected_components(g.adjacency, directed=False)
    order = np.argsort(labels, kind="stable")
    bounds = np.flatnonzero(np.diff(labels[order])) + 1
    comps = np.split(order, bounds)
    comps.sort(key=lambda c: (-len(c), int(c[0])))
    return comps
