"""Undirected simple graph with contiguous integer node ids.

Edge-list files follow the common one-edge-per-line convention: two
whitespace-separated node labels, ``#``/``%`` comment lines, an optional
third column (edge weight) that is read past and ignored.
"""

from __future__ import annotations

import io
from collections import deque
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np


class Graph:
    """Immutable undirected simple graph.

    Nodes are ids ``0..n-1``; ``node_names`` keeps the original external
    labels. Adjacency lists are sorted ascending so neighbor-set
    intersections run in linear time. Duplicate edges and self-loops are
    dropped at construction, which makes every constructor path canonical.
    """

    __slots__ = ("n", "m", "adjacency", "edge_set", "node_names", "_name_to_id", "_degrees")

    def __init__(self, n: int, edges: Iterable[tuple[int, int]], node_names: Sequence[str] | None = None):
        if n < 1:
            raise ValueError("graph needs at least one node")
        canonical = set()
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) out of range for n={n}")
            if u == v:
                continue
            canonical.add((u, v) if u < v else (v, u))

        neighbor_lists: list[list[int]] = [[] for _ in range(n)]
        for u, v in canonical:
            neighbor_lists[u].append(v)
            neighbor_lists[v].append(u)

        self.n = n
        self.m = len(canonical)
        self.adjacency = tuple(np.array(sorted(lst), dtype=np.int32) for lst in neighbor_lists)
        self.edge_set = frozenset(canonical)
        if node_names is None:
            node_names = [str(i) for i in range(n)]
        if len(node_names) != n:
            raise ValueError("node_names length must equal n")
        self.node_names = tuple(str(x) for x in node_names)
        self._name_to_id = {name: i for i, name in enumerate(self.node_names)}
        self._degrees = np.array([len(a) for a in self.adjacency], dtype=np.int64)

    def neighbors(self, u: int) -> np.ndarray:
        """Sorted neighbor ids of ``u``."""
        self._check_node(u)
        return self.adjacency[u]

    def degree(self, u: int) -> int:
        self._check_node(u)
        return int(self._degrees[u])

    @property
    def degrees(self) -> np.ndarray:
        return self._degrees

    def has_edge(self, u: int, v: int) -> bool:
        self._check_node(u)
        self._check_node(v)
        return ((u, v) if u < v else (v, u)) in self.edge_set

    def edges(self) -> list[tuple[int, int]]:
        """All edges as (u, v) with u < v, sorted."""
        return sorted(self.edge_set)

    def node_id(self, name: str) -> int:
        try:
            return self._name_to_id[name]
        except KeyError:
            raise ValueError(f"unknown node label {name!r}") from None

    def csr(self) -> tuple[np.ndarray, np.ndarray]:
        """(indptr, indices) view of the adjacency, for the numba kernels."""
        indptr = np.zeros(self.n + 1, dtype=np.int64)
        np.cumsum(self._degrees, out=indptr[1:])
        indices = np.concatenate(self.adjacency) if self.m else np.empty(0, dtype=np.int32)
        return indptr, indices.astype(np.int32, copy=False)

    def labeled_edges(self) -> set[frozenset]:
        """Edge set over original labels; canonical under id remapping."""
        return {frozenset((self.node_names[u], self.node_names[v])) for u, v in self.edge_set}

    def _check_node(self, u: int) -> None:
        if not 0 <= u < self.n:
            raise ValueError(f"node id {u} out of range (n={self.n})")

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.m})"


def load_edge_list(source) -> Graph:
    """Parse an edge-list text stream or path into a Graph.

    Labels map to contiguous ids in first-seen order. Duplicate lines and
    reversed duplicates collapse to one edge; self-loop lines are dropped
    (their labels still register a node). Lines starting with ``#`` or
    ``%`` are comments. A third token (weight) is ignored; any other token
    count raises with the offending line number.
    """
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8") as fh:
            return load_edge_list(fh)

    name_to_id: dict[str, int] = {}
    names: list[str] = []
    edges: list[tuple[int, int]] = []

    def intern(label: str) -> int:
        nid = name_to_id.get(label)
        if nid is None:
            nid = len(names)
            name_to_id[label] = nid
            names.append(label)
        return nid

    saw_content = False
    for lineno, raw in enumerate(source, start=1):
        line = raw.strip()
        if not line or line.startswith("#") or line.startswith("%"):
            continue
        saw_content = True
        tokens = line.split()
        if len(tokens) not in (2, 3):
            raise ValueError(f"line {lineno}: expected 2 node labels, got {len(tokens)} tokens")
        u = intern(tokens[0])
        v = intern(tokens[1])
        if u != v:
            edges.append((u, v))

    if not saw_content:
        raise ValueError("empty edge list: no edges found")
    return Graph(len(names), edges, names)


def save_edge_list(g: Graph, sink, keep_labels: bool = False) -> None:
    """Write one edge per line; internal ids unless ``keep_labels``."""
    if isinstance(sink, (str, Path)):
        with open(sink, "w", encoding="utf-8") as fh:
            save_edge_list(g, fh, keep_labels)
            return
    for u, v in g.edges():
        if keep_labels:
            sink.write(f"{g.node_names[u]} {g.node_names[v]}\n")
        else:
            sink.write(f"{u} {v}\n")


def loads_edge_list(text: str) -> Graph:
    return load_edge_list(io.StringIO(text))


def is_connected(g: Graph) -> bool:
    """True iff a traversal from node 0 reaches all n nodes."""
    if g.n == 1:
        return True
    seen = np.zeros(g.n, dtype=bool)
    seen[0] = True
    queue = deque([0])
    count = 1
    while queue:
        u = queue.popleft()
        for v in g.adjacency[u]:
            if not seen[v]:
                seen[v] = True
                count += 1
                queue.append(int(v))
    return count == g.n


def largest_component(g: Graph) -> Graph:
    """Subgraph induced by the largest connected component, ids recompacted."""
    comp = np.full(g.n, -1, dtype=np.int64)
    n_comp = 0
    for start in range(g.n):
        if comp[start] != -1:
            continue
        comp[start] = n_comp
        queue = deque([start])
        while queue:
            u = queue.popleft()
            for v in g.adjacency[u]:
                if comp[v] == -1:
                    comp[v] = n_comp
                    queue.append(int(v))
        n_comp += 1
    best = int(np.argmax(np.bincount(comp)))
    keep = np.flatnonzero(comp == best)
    remap = {int(old): new for new, old in enumerate(keep)}
    edges = [(remap[u], remap[v]) for u, v in g.edge_set if comp[u] == best]
    names = [g.node_names[int(old)] for old in keep]
    return Graph(len(keep), edges, names)


def remove_edges(g: Graph, edges: Iterable[tuple[int, int]]) -> Graph:
    """New Graph with the given edges absent; node set unchanged."""
    to_drop = set()
    for u, v in edges:
        key = (u, v) if u < v else (v, u)
        if key not in g.edge_set:
            raise ValueError(f"cannot remove non-existent edge ({u}, {v})")
        to_drop.add(key)
    remaining = [e for e in g.edge_set if e not in to_drop]
    return Graph(g.n, remaining, g.node_names)
