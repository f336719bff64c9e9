"""Community structure: detection, modularity, edge kinds, file I/O.

Louvain and asynchronous label propagation are implemented natively so a
seed fully determines the partition. Partitions produced by other tools
can be loaded from the community file format ("node-label community-id"
per line).
"""

from __future__ import annotations

import random
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .graph import Graph
from .seeds import derive_seed

INTRA = "intra"
INTER = "inter"

_LPA_MAX_SWEEPS = 1000


@dataclass(frozen=True)
class Partition:
    """Node -> community labeling with dense ids 0..c-1."""

    labels: np.ndarray
    c: int

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=np.int64)
        object.__setattr__(self, "labels", labels)
        if labels.ndim != 1 or len(labels) == 0:
            raise ValueError("labels must be a non-empty 1-D array")
        present = np.unique(labels)
        if self.c < 1 or len(present) != self.c or present[0] != 0 or present[-1] != self.c - 1:
            raise ValueError("community ids must be dense 0..c-1")

    @property
    def n(self) -> int:
        return len(self.labels)

    def community_sizes(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.c)

    def members(self, comm: int) -> np.ndarray:
        return np.flatnonzero(self.labels == comm)


def _densify(raw_labels) -> Partition:
    """Relabel arbitrary ints to dense 0..c-1 in first-occurrence order."""
    mapping: dict[int, int] = {}
    out = np.empty(len(raw_labels), dtype=np.int64)
    for i, lab in enumerate(raw_labels):
        if lab not in mapping:
            mapping[lab] = len(mapping)
        out[i] = mapping[lab]
    return Partition(out, len(mapping))


def singleton_partition(g: Graph) -> Partition:
    return Partition(np.arange(g.n), g.n)


def edge_kind(p: Partition, u: int, v: int) -> str:
    """'intra' iff both endpoints share a community label."""
    return INTRA if p.labels[u] == p.labels[v] else INTER


def modularity(g: Graph, p: Partition) -> float:
    """Newman-Girvan Q = sum_c [ e_c/m - (d_c/2m)^2 ]."""
    if g.m == 0:
        raise ValueError("modularity is undefined for a graph with no edges")
    if p.n != g.n:
        raise ValueError("partition does not cover this graph")
    labels = p.labels
    intra = np.zeros(p.c, dtype=np.int64)
    for u, v in g.edge_set:
        if labels[u] == labels[v]:
            intra[labels[u]] += 1
    comm_degree = np.zeros(p.c, dtype=np.float64)
    np.add.at(comm_degree, labels, g.degrees.astype(np.float64))
    m = float(g.m)
    return float(np.sum(intra / m - (comm_degree / (2.0 * m)) ** 2))


# ---------------------------------------------------------------------------
# Louvain


def louvain(g: Graph, seed: int = 0) -> Partition:
    """Greedy two-phase modularity optimization.

    Phase one moves single nodes to the neighboring community with the
    best modularity gain (visit order shuffled by the seed, ties broken
    by lowest community id); phase two collapses communities into
    supernodes and repeats on the aggregate. Stops when an aggregation
    level yields no strictly positive gain.
    """
    if g.m == 0:
        return singleton_partition(g)

    # weighted working graph: pairwise weights + collapsed intra weight per node
    adj: list[dict[int, float]] = [dict() for _ in range(g.n)]
    for u, v in g.edge_set:
        adj[u][v] = 1.0
        adj[v][u] = 1.0
    loops = [0.0] * g.n
    two_m = 2.0 * g.m

    membership = list(range(g.n))  # original node -> current community
    level = 0
    while True:
        rng = random.Random(derive_seed(seed, "louvain", level))
        labels, improved = _local_move(adj, loops, two_m, rng)
        dense = {}
        for lab in labels:
            if lab not in dense:
                dense[lab] = len(dense)
        membership = [dense[labels[membership[i]]] for i in range(g.n)]
        if not improved:
            break
        adj, loops = _aggregate(adj, loops, [dense[lab] for lab in labels], len(dense))
        level += 1

    return _densify(membership)


def _local_move(adj, loops, two_m, rng):
    n = len(adj)
    k = [2.0 * loops[i] + sum(adj[i].values()) for i in range(n)]
    comm = list(range(n))
    comm_tot = k.copy()

    improved = False
    moved = True
    while moved:
        moved = False
        order = list(range(n))
        rng.shuffle(order)
        for i in order:
            ci = comm[i]
            # weight from i to each neighboring community
            neigh_w: dict[int, float] = {}
            for j, w in adj[i].items():
                cj = comm[j]
                neigh_w[cj] = neigh_w.get(cj, 0.0) + w
            comm_tot[ci] -= k[i]
            # gain of inserting i into c, up to terms constant in c; staying
            # wins exact ties, otherwise lowest community id wins
            best_c = ci
            best_gain = neigh_w.get(ci, 0.0) - comm_tot[ci] * k[i] / two_m
            for c in sorted(neigh_w):
                if c == ci:
                    continue
                gain = neigh_w[c] - comm_tot[c] * k[i] / two_m
                if gain > best_gain + 1e-12:
                    best_c, best_gain = c, gain
            comm_tot[best_c] += k[i]
            if best_c != ci:
                comm[i] = best_c
                moved = True
                improved = True
    return comm, improved


def _aggregate(adj, loops, labels, n_comm):
    new_adj: list[dict[int, float]] = [dict() for _ in range(n_comm)]
    new_loops = [0.0] * n_comm
    for i, ci in enumerate(labels):
        new_loops[ci] += loops[i]
        for j, w in adj[i].items():
            cj = labels[j]
            if ci == cj:
                if i < j:
                    new_loops[ci] += w
            else:
                new_adj[ci][cj] = new_adj[ci].get(cj, 0.0) + w
    return new_adj, new_loops


# ---------------------------------------------------------------------------
# Asynchronous label propagation


def label_propagation_async(g: Graph, seed: int = 0) -> Partition:
    """Each node starts with a unique label and repeatedly adopts the most
    frequent label among its neighbors (ties broken at random) until every
    node's label is among its neighborhood's most frequent ones."""
    rng = random.Random(derive_seed(seed, "labelprop"))
    labels = list(range(g.n))

    for _ in range(_LPA_MAX_SWEEPS):
        order = list(range(g.n))
        rng.shuffle(order)
        for u in order:
            neigh = g.adjacency[u]
            if len(neigh) == 0:
                continue
            counts: dict[int, int] = {}
            for v in neigh:
                lab = labels[v]
                counts[lab] = counts.get(lab, 0) + 1
            top = max(counts.values())
            winners = sorted(lab for lab, cnt in counts.items() if cnt == top)
            labels[u] = winners[rng.randrange(len(winners))]
        if _lpa_stable(g, labels):
            return _densify(labels)
    raise RuntimeError(f"label propagation did not converge in {_LPA_MAX_SWEEPS} sweeps")


def _lpa_stable(g: Graph, labels) -> bool:
    for u in range(g.n):
        neigh = g.adjacency[u]
        if len(neigh) == 0:
            continue
        counts: dict[int, int] = {}
        for v in neigh:
            lab = labels[v]
            counts[lab] = counts.get(lab, 0) + 1
        top = max(counts.values())
        if counts.get(labels[u], 0) < top:
            return False
    return True


def detect(g: Graph, method: str = "louvain", seed: int = 0) -> Partition:
    if method == "louvain":
        return louvain(g, seed)
    if method == "labelprop":
        return label_propagation_async(g, seed)
    raise ValueError(f"unknown community detection method {method!r}")


# ---------------------------------------------------------------------------
# Community file I/O


def load_partition(source, g: Graph) -> Partition:
    """Read "node-label community-id" lines; every node exactly once."""
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8") as fh:
            return load_partition(fh, g)
    raw = np.full(g.n, -1, dtype=np.int64)
    for lineno, line in enumerate(source, start=1):
        line = line.strip()
        if not line or line.startswith("#") or line.startswith("%"):
            continue
        tokens = line.split()
        if len(tokens) != 2:
            raise ValueError(f"line {lineno}: expected 'node community-id'")
        name, comm = tokens
        u = g.node_id(name)  # raises on unknown node
        if raw[u] != -1:
            raise ValueError(f"node {name} labeled twice")
        raw[u] = int(comm)
    missing = np.flatnonzero(raw == -1)
    if len(missing):
        raise ValueError(f"node {g.node_names[missing[0]]} unlabeled")
    # densify by sorted community id so save->load round-trips exactly
    uniq = np.unique(raw)
    remap = {int(c): i for i, c in enumerate(uniq)}
    return Partition(np.array([remap[int(c)] for c in raw]), len(uniq))


def save_partition(p: Partition, g: Graph, sink) -> None:
    if isinstance(sink, (str, Path)):
        with open(sink, "w", encoding="utf-8") as fh:
            save_partition(p, g, fh)
            return
    if p.n != g.n:
        raise ValueError("partition does not cover this graph")
    for u in range(g.n):
        sink.write(f"{g.node_names[u]} {p.labels[u]}\n")


def warn_if_trivial(p: Partition) -> None:
    if p.c == 1:
        warnings.warn("partition has a single community; every edge is intra")
