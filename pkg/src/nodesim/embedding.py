"""Skip-gram with negative sampling over walk corpora.

Training follows the word2vec conventions: input vectors start uniform in
(-0.5/d, 0.5/d), output (context-side) vectors start at zero, noise nodes
are drawn proportional to corpus frequency^0.75, and a noise draw that
collides with the observed context is skipped. The learning rate decays
linearly over all center/context updates. Single-threaded runs are
bit-reproducible for a fixed seed; the optional multi-threaded mode lets
workers race on the shared matrices (hogwild) and is not deterministic.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np
from numba import njit

from .seeds import derive_seed
from .walks import WalkCorpus


@dataclass(frozen=True)
class SkipGramConfig:
    dim: int = 128
    window: int = 5
    negatives: int = 5
    epochs: int = 1
    lr_start: float = 0.025
    lr_end: float = 0.0001
    seed: int = 0
    # reading of "k-1 nodes before and after": radius window-1 instead of window
    strict_paper_window: bool = False

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be >= 1")
        if self.window < 1:
            raise ValueError("window must be >= 1")
        if self.strict_paper_window and self.window < 2:
            raise ValueError("strict paper window needs window >= 2")
        if self.negatives < 1:
            raise ValueError("negatives must be >= 1")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if not (self.lr_start >= self.lr_end > 0):
            raise ValueError("need lr_start >= lr_end > 0")

    @property
    def radius(self) -> int:
        return self.window - 1 if self.strict_paper_window else self.window


@dataclass
class Embedding:
    """Learned node representation: the input matrix is the exported one."""

    input_vectors: np.ndarray  # (n, d) float32
    output_vectors: np.ndarray  # (n, d) float32, training-side only
    labels: tuple[str, ...]
    node_index: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.node_index:
            self.node_index = {lab: i for i, lab in enumerate(self.labels)}

    @property
    def n(self) -> int:
        return self.input_vectors.shape[0]

    @property
    def dim(self) -> int:
        return self.input_vectors.shape[1]

    def vector(self, u) -> np.ndarray:
        if isinstance(u, str):
            u = self.node_index[u]
        return self.input_vectors[u]


def context_pairs(corpus: WalkCorpus, window: int) -> Iterator[tuple[int, int]]:
    """(center, context) pairs within the window radius, in training order."""
    if window < 1:
        raise ValueError("window must be >= 1")
    length = corpus.walk_length
    for row in corpus.walks:
        for i in range(length):
            lo = i - window if i - window > 0 else 0
            hi = i + window if i + window < length - 1 else length - 1
            for j in range(lo, hi + 1):
                if j != i:
                    yield int(row[i]), int(row[j])


def pair_count(walk_length: int, window: int) -> int:
    """Exact context pairs emitted per walk."""
    return sum(min(i, window) + min(walk_length - 1 - i, window) for i in range(walk_length))


def _alias_setup(probs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vose alias table; draws reproduce ``probs`` exactly."""
    k = len(probs)
    accept = np.zeros(k, dtype=np.float64)
    alias = np.zeros(k, dtype=np.int64)
    scaled = probs * k
    small = [i for i in range(k) if scaled[i] < 1.0]
    large = [i for i in range(k) if scaled[i] >= 1.0]
    while small and large:
        s, l = small.pop(), large.pop()
        accept[s] = scaled[s]
        alias[s] = l
        scaled[l] -= 1.0 - scaled[s]
        (small if scaled[l] < 1.0 else large).append(l)
    for i in large:
        accept[i] = 1.0
    for i in small:
        accept[i] = 1.0  # only reachable through round-off
    return accept, alias


def noise_distribution(corpus: WalkCorpus) -> np.ndarray:
    """Corpus node frequency raised to 0.75, normalized."""
    counts = np.bincount(corpus.walks.ravel(), minlength=corpus.n_nodes).astype(np.float64)
    weights = counts ** 0.75
    total = weights.sum()
    if total <= 0:
        raise ValueError("empty corpus")
    return weights / total


@njit(cache=True, nogil=True)
def _sgns_kernel(walks, row_start, row_stop, syn0, syn1, accept, alias,
                 window, negatives, lr_start, lr_end, total_updates,
                 done_start, seed):
    np.random.seed(seed)
    nv = syn0.shape[0]
    d = syn0.shape[1]
    length = walks.shape[1]
    grad_center = np.empty(d, dtype=np.float32)
    done = done_start
    for w in range(row_start, row_stop):
        for i in range(length):
            center = walks[w, i]
            jlo = i - window
            if jlo < 0:
                jlo = 0
            jhi = i + window
            if jhi > length - 1:
                jhi = length - 1
            for j in range(jlo, jhi + 1):
                if j == i:
                    continue
                ctx = walks[w, j]
                lr = lr_start - (lr_start - lr_end) * (done / total_updates)
                for t in range(d):
                    grad_center[t] = 0.0
                # positive term: push sigma(syn0[ctx] . syn1[center]) up
                dot = 0.0
                for t in range(d):
                    dot += syn0[ctx, t] * syn1[center, t]
                g = np.float32((1.0 - 1.0 / (1.0 + np.exp(-dot))) * lr)
                for t in range(d):
                    old = syn0[ctx, t]
                    grad_center[t] += g * old
                    syn0[ctx, t] = old + g * syn1[center, t]
                # noise terms: push sampled contexts down
                for k in range(negatives):
                    u = np.random.random()
                    v = np.int64(u * nv)
                    if v >= nv:
                        v = nv - 1
                    if np.random.random() >= accept[v]:
                        v = alias[v]
                    if v == ctx:
                        continue
                    dot = 0.0
                    for t in range(d):
                        dot += syn0[v, t] * syn1[center, t]
                    g = np.float32((-1.0 / (1.0 + np.exp(-dot))) * lr)
                    for t in range(d):
                        old = syn0[v, t]
                        grad_center[t] += g * old
                        syn0[v, t] = old + g * syn1[center, t]
                for t in range(d):
                    syn1[center, t] += grad_center[t]
                done += 1
    return done


def train_skipgram(corpus: WalkCorpus, config: SkipGramConfig,
                   threads: int = 1, labels: Sequence[str] | None = None) -> Embedding:
    """Train the embedding over every (center, context) pair of the corpus."""
    walks = corpus.walks
    if walks.size == 0:
        raise ValueError("empty corpus")
    n = corpus.n_nodes
    if int(walks.min()) < 0 or int(walks.max()) >= n:
        raise ValueError(f"corpus mentions node {int(walks.max())} outside the graph (n={n})")

    rng = np.random.default_rng(derive_seed(config.seed, "init"))
    syn0 = ((rng.random((n, config.dim)) - 0.5) / config.dim).astype(np.float32)
    syn1 = np.zeros((n, config.dim), dtype=np.float32)

    accept, alias = _alias_setup(noise_distribution(corpus))
    radius = config.radius
    per_walk = pair_count(corpus.walk_length, radius)
    total_updates = per_walk * walks.shape[0] * config.epochs

    done = 0
    for epoch in range(config.epochs):
        if threads <= 1 or walks.shape[0] < 2 * threads:
            done = _sgns_kernel(
                walks, 0, walks.shape[0], syn0, syn1, accept, alias,
                radius, config.negatives, config.lr_start, config.lr_end,
                total_updates, done, derive_seed(config.seed, "sgns", epoch))
        else:
            # hogwild: workers share the matrices and race on updates
            bounds = np.linspace(0, walks.shape[0], threads + 1).astype(np.int64)
            workers = []
            for shard, (lo, hi) in enumerate(zip(bounds[:-1], bounds[1:])):
                offset = done + per_walk * int(lo)
                workers.append(threading.Thread(
                    target=_sgns_kernel,
                    args=(walks, int(lo), int(hi), syn0, syn1, accept, alias,
                          radius, config.negatives, config.lr_start, config.lr_end,
                          total_updates, offset,
                          derive_seed(config.seed, "sgns", epoch, shard))))
            for t in workers:
                t.start()
            for t in workers:
                t.join()
            done += per_walk * walks.shape[0]

    if not np.isfinite(syn0).all() or not np.isfinite(syn1).all():
        raise RuntimeError("training diverged: non-finite vectors")
    if labels is None:
        labels = [str(i) for i in range(n)]
    return Embedding(syn0, syn1, tuple(labels))


# ---------------------------------------------------------------------------
# Reference evaluators (test oracles; never used on large graphs)


def softmax_probabilities(vectors: np.ndarray, center: int) -> np.ndarray:
    """Full-softmax co-occurrence distribution for one center node."""
    scores = vectors @ vectors[center]
    scores = scores - scores.max()
    e = np.exp(scores)
    return e / e.sum()


def corpus_log_likelihood(vectors: np.ndarray, corpus: WalkCorpus, window: int) -> float:
    """Factorized log-likelihood: sum of per-pair log-probabilities."""
    cache: dict[int, np.ndarray] = {}
    ll = 0.0
    for center, ctx in context_pairs(corpus, window):
        if center not in cache:
            cache[center] = softmax_probabilities(vectors, center)
        ll += float(np.log(cache[center][ctx]))
    return ll


def sgns_pair_objective(syn0: np.ndarray, syn1: np.ndarray, center: int,
                        context: int, negatives: Sequence[int]) -> float:
    """Per-pair objective log s(x_pos) + sum log s(-x_neg), float64."""

    def logsig(x):
        return float(-np.log1p(np.exp(-x)))

    val = logsig(float(np.dot(syn0[context], syn1[center])))
    for v in negatives:
        val += logsig(-float(np.dot(syn0[v], syn1[center])))
    return val


def sgns_pair_gradients(syn0: np.ndarray, syn1: np.ndarray, center: int,
                        context: int, negatives: Sequence[int]):
    """Analytic gradient of sgns_pair_objective.

    Returns (grad_syn0, grad_syn1_center) where grad_syn0 maps a node id
    to the gradient of its input vector (duplicated negatives accumulate).
    """

    def sigma(x):
        return 1.0 / (1.0 + np.exp(-x))

    grad_syn0: dict[int, np.ndarray] = {}
    grad_center = np.zeros_like(syn1[center], dtype=np.float64)

    s = sigma(float(np.dot(syn0[context], syn1[center])))
    grad_syn0[context] = (1.0 - s) * syn1[center].astype(np.float64)
    grad_center += (1.0 - s) * syn0[context].astype(np.float64)
    for v in negatives:
        s = sigma(float(np.dot(syn0[v], syn1[center])))
        g = -s * syn1[center].astype(np.float64)
        if v in grad_syn0:
            grad_syn0[v] = grad_syn0[v] + g
        else:
            grad_syn0[v] = g
        grad_center += -s * syn0[v].astype(np.float64)
    return grad_syn0, grad_center


# ---------------------------------------------------------------------------
# Text format: "n d" header, then one "label f1 ... fd" row per node


def save_embedding(e: Embedding, sink) -> None:
    if isinstance(sink, (str, Path)):
        with open(sink, "w", encoding="utf-8") as fh:
            save_embedding(e, fh)
            return
    sink.write(f"{e.n} {e.dim}\n")
    for i in range(e.n):
        row = " ".join(f"{x:.9g}" for x in e.input_vectors[i])
        sink.write(f"{e.labels[i]} {row}\n")


def load_embedding(source) -> Embedding:
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8") as fh:
            return load_embedding(fh)
    header = source.readline().split()
    if len(header) != 2:
        raise ValueError("embedding header must be 'n d'")
    n, d = int(header[0]), int(header[1])
    vectors = np.zeros((n, d), dtype=np.float32)
    labels = []
    for i in range(n):
        tokens = source.readline().split()
        if len(tokens) != d + 1:
            raise ValueError(f"embedding row {i}: expected label + {d} floats, got {len(tokens) - 1}")
        labels.append(tokens[0])
        vectors[i] = [np.float32(t) for t in tokens[1:]]
    return Embedding(vectors, np.zeros((n, d), dtype=np.float32), tuple(labels))
