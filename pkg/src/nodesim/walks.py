"""Biased and uniform random-walk corpus generation.

The biased walk is first-order: each edge (u, v) carries an unnormalized
weight alpha*(Jaccard(u,v) + 1/deg(u)) when the endpoints share a
community and beta*(...) when they do not, normalized per node. Tables
are precomputed once per (graph, partition, alpha, beta); steps sample
the per-node cumulative distribution by binary search.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from numba import njit

from .communities import Partition
from .graph import Graph
from .seeds import derive_seed


@dataclass(frozen=True)
class WalkParams:
    alpha: float = 1.0
    beta: float = 1.5
    gamma: int = 10
    walk_length: int = 80
    seed: int = 0

    def __post_init__(self):
        if self.alpha <= 0 or self.beta <= 0:
            raise ValueError("alpha and beta must be positive")
        if self.gamma < 1:
            raise ValueError("gamma (walks per node) must be >= 1")
        if self.walk_length < 2:
            raise ValueError("walk_length must be >= 2")


@dataclass(frozen=True)
class TransitionTable:
    """Per-node move distribution in CSR layout.

    ``probs[indptr[u]:indptr[u+1]]`` are the normalized probabilities to
    the sorted neighbors ``indices[indptr[u]:indptr[u+1]]``; ``cum`` is
    the within-node cumulative sum used by the samplers.
    """

    n: int
    indptr: np.ndarray
    indices: np.ndarray
    probs: np.ndarray
    cum: np.ndarray

    def row(self, u: int) -> tuple[np.ndarray, np.ndarray]:
        lo, hi = self.indptr[u], self.indptr[u + 1]
        return self.indices[lo:hi], self.probs[lo:hi]

    def probability(self, u: int, v: int) -> float:
        neigh, probs = self.row(u)
        pos = np.searchsorted(neigh, v)
        if pos < len(neigh) and neigh[pos] == v:
            return float(probs[pos])
        return 0.0


@dataclass(frozen=True)
class WalkCorpus:
    """gamma walks of fixed length from every node; row = walk_index*n + node."""

    walks: np.ndarray  # (gamma*n, walk_length) int32
    n_nodes: int
    gamma: int
    walk_length: int

    def __len__(self):
        return self.walks.shape[0]


@njit(cache=True, inline="always")
def _mix_seed(seed, walk_index, node):
    # splitmix64-style mixing of (seed, walk-index, node) into a 31-bit seed
    x = np.uint64(seed) * np.uint64(0x9E3779B97F4A7C15)
    x ^= (np.uint64(walk_index) + np.uint64(1)) * np.uint64(0xBF58476D1CE4E5B9)
    x ^= (np.uint64(node) + np.uint64(1)) * np.uint64(0x94D049BB133111EB)
    x ^= x >> np.uint64(30)
    x *= np.uint64(0xBF58476D1CE4E5B9)
    x ^= x >> np.uint64(27)
    x *= np.uint64(0x94D049BB133111EB)
    x ^= x >> np.uint64(31)
    return np.int64(x & np.uint64(0x7FFFFFFF))


@njit(cache=True)
def _jaccard_similarities(indptr, indices):
    """Jaccard per directed adjacency slot, via sorted two-pointer merge."""
    sims = np.zeros(indices.size, dtype=np.float64)
    n = indptr.size - 1
    for u in range(n):
        du = indptr[u + 1] - indptr[u]
        for idx in range(indptr[u], indptr[u + 1]):
            v = indices[idx]
            if v < u:
                continue  # filled from the (v, u) slot below
            dv = indptr[v + 1] - indptr[v]
            a, b = indptr[u], indptr[v]
            inter = 0
            while a < indptr[u + 1] and b < indptr[v + 1]:
                x, y = indices[a], indices[b]
                if x == y:
                    inter += 1
                    a += 1
                    b += 1
                elif x < y:
                    a += 1
                else:
                    b += 1
            sim = inter / (du + dv - inter)
            sims[idx] = sim
            # mirror into v's slot for u
            lo, hi = indptr[v], indptr[v + 1]
            pos = np.searchsorted(indices[lo:hi], u)
            sims[lo + pos] = sim
    return sims


@njit(cache=True)
def _normalize_weights(indptr, weights):
    n = indptr.size - 1
    cum = np.empty(weights.size, dtype=np.float64)
    for u in range(n):
        lo, hi = indptr[u], indptr[u + 1]
        total = 0.0
        for idx in range(lo, hi):
            total += weights[idx]
        acc = 0.0
        for idx in range(lo, hi):
            weights[idx] /= total
            acc += weights[idx]
            cum[idx] = acc
        if hi > lo:
            cum[hi - 1] = 1.0  # guard against cumulative round-off
    return cum


def build_nodesim_transitions(g: Graph, p: Partition, alpha: float, beta: float) -> TransitionTable:
    """Transition table mixing Jaccard similarity with community factors."""
    if alpha <= 0 or beta <= 0:
        raise ValueError("alpha and beta must be positive")
    if p.n != g.n:
        raise ValueError("partition does not cover this graph")
    if g.m == 0 or int(g.degrees.min()) == 0:
        u = int(np.argmin(g.degrees))
        raise ValueError(f"isolated node {u}: transition probabilities cannot be normalized")

    indptr, indices = g.csr()
    sims = _jaccard_similarities(indptr, indices)

    labels = p.labels
    weights = np.empty(indices.size, dtype=np.float64)
    inv_deg = 1.0 / g.degrees.astype(np.float64)
    for u in range(g.n):
        lo, hi = indptr[u], indptr[u + 1]
        seg = indices[lo:hi]
        factor = np.where(labels[seg] == labels[u], alpha, beta)
        weights[lo:hi] = factor * (sims[lo:hi] + inv_deg[u])
    cum = _normalize_weights(indptr, weights)
    return TransitionTable(g.n, indptr, indices, weights, cum)


def uniform_transitions(g: Graph) -> TransitionTable:
    """Plain random-walk table: every neighbor equally likely."""
    if g.m == 0 or int(g.degrees.min()) == 0:
        u = int(np.argmin(g.degrees))
        raise ValueError(f"isolated node {u}: transition probabilities cannot be normalized")
    indptr, indices = g.csr()
    weights = np.empty(indices.size, dtype=np.float64)
    for u in range(g.n):
        lo, hi = indptr[u], indptr[u + 1]
        if hi > lo:
            weights[lo:hi] = 1.0 / (hi - lo)
    cum = _normalize_weights(indptr, weights)
    return TransitionTable(g.n, indptr, indices, weights, cum)


@njit(cache=True, nogil=True)
def _walk_kernel(indptr, indices, cum, n, length, seed, out, row_start, row_stop):
    for w in range(row_start, row_stop):
        walk_index = w // n
        node = w - walk_index * n
        np.random.seed(_mix_seed(seed, walk_index, node))
        cur = node
        out[w, 0] = cur
        for t in range(1, length):
            lo, hi = indptr[cur], indptr[cur + 1]
            r = np.random.random()
            j = np.searchsorted(cum[lo:hi], r)
            if j >= hi - lo:
                j = hi - lo - 1
            cur = indices[lo + j]
            out[w, t] = cur


def _generate(table: TransitionTable, params: WalkParams, threads: int) -> WalkCorpus:
    n = table.n
    num = params.gamma * n
    out = np.empty((num, params.walk_length), dtype=np.int32)
    seed = derive_seed(params.seed, "walks")
    if threads <= 1 or num < 2 * threads:
        _walk_kernel(table.indptr, table.indices, table.cum, n,
                     params.walk_length, seed, out, 0, num)
    else:
        # each walk owns its rng stream, so sharding changes nothing
        bounds = np.linspace(0, num, threads + 1).astype(np.int64)
        workers = [
            threading.Thread(target=_walk_kernel,
                             args=(table.indptr, table.indices, table.cum, n,
                                   params.walk_length, seed, out, int(lo), int(hi)))
            for lo, hi in zip(bounds[:-1], bounds[1:])
        ]
        for t in workers:
            t.start()
        for t in workers:
            t.join()
    return WalkCorpus(out, n, params.gamma, params.walk_length)


def nodesim_walks(table: TransitionTable, params: WalkParams, threads: int = 1) -> WalkCorpus:
    """gamma biased walks of walk_length nodes from every node."""
    return _generate(table, params, threads)


def uniform_walks(g: Graph, params: WalkParams, threads: int = 1) -> WalkCorpus:
    """gamma uniform random walks from every node (the classic baseline)."""
    return _generate(uniform_transitions(g), params, threads)


def dump_corpus(corpus: WalkCorpus, sink, names=None) -> None:
    """One walk per line, space-separated node labels."""
    if isinstance(sink, (str, Path)):
        with open(sink, "w", encoding="utf-8") as fh:
            dump_corpus(corpus, fh, names)
            return
    for row in corpus.walks:
        if names is not None:
            sink.write(" ".join(names[i] for i in row))
        else:
            sink.write(" ".join(str(int(i)) for i in row))
        sink.write("\n")
