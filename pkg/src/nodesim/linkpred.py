"""Node-pair features and the link classifiers.

A pair feature is an element-wise combination of the two node vectors
(average, weighted L1/L2, Hadamard) concatenated with a community bit
(1 when the endpoints share a community). A logistic regression over
those features is the model path; heuristic baselines threshold their
raw similarity score at the 25th percentile of the positive train scores.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .communities import Partition
from .embedding import Embedding

PAIR_OPERATORS = ("average", "weighted_l1", "weighted_l2", "hadamard")


def pair_embed(e: Embedding, u: int, v: int, op: str = "hadamard") -> np.ndarray:
    """Element-wise pair vector; all four operators are symmetric in (u, v)."""
    if op not in PAIR_OPERATORS:
        raise ValueError(f"unknown pair operator {op!r}")
    a = e.input_vectors[u].astype(np.float64)
    b = e.input_vectors[v].astype(np.float64)
    if a.shape != b.shape:
        raise ValueError("embedding dimension mismatch")
    if op == "average":
        return (a + b) / 2.0
    if op == "weighted_l1":
        return np.abs(a - b)
    if op == "weighted_l2":
        return np.abs(a - b) ** 2
    return a * b  # hadamard


def assemble_features(e: Embedding, p: Partition | None, pairs: Sequence[tuple[int, int]],
                      op: str = "hadamard", community_feature: bool = True) -> np.ndarray:
    """Feature matrix: one row per pair, pair_embed plus the community bit.

    ``community_feature=False`` is the ablation switch; it drops the bit
    column (and then no partition is needed).
    """
    if community_feature and p is None:
        raise ValueError("community feature requested but no partition given")
    width = e.dim + (1 if community_feature else 0)
    X = np.zeros((len(pairs), width), dtype=np.float64)
    for i, (u, v) in enumerate(pairs):
        X[i, :e.dim] = pair_embed(e, u, v, op)
        if community_feature:
            X[i, e.dim] = 1.0 if p.labels[u] == p.labels[v] else 0.0
    return X


@dataclass
class LogRegModel:
    weights: np.ndarray
    bias: float
    trained: bool = False

    @property
    def width(self) -> int:
        return len(self.weights)


def _sigmoid(z):
    return 1.0 / (1.0 + np.exp(-z))


def _loss(X, y, w, b, reg):
    z = X @ w + b
    # log(1 + exp(-z*s)) written stably
    margins = np.where(y == 1, -z, z)
    return float(np.mean(np.logaddexp(0.0, margins)) + 0.5 * reg * np.dot(w, w))


def train_logreg(X: np.ndarray, y: np.ndarray, reg: float = 1e-4, seed: int = 0,
                 max_iter: int = 10_000, tol: float = 1e-6) -> LogRegModel:
    """Full-batch gradient descent on mean logistic loss + reg*||w||^2/2.

    Runs until the gradient norm drops below ``tol`` or ``max_iter``
    iterations, with backtracking on the step size. Deterministic (zero
    init), so ``seed`` has no effect; it is accepted for interface
    uniformity with the other trainers.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64).ravel()
    if X.ndim != 2 or len(X) != len(y) or len(y) == 0:
        raise ValueError("X must be 2-D with one label per row")
    if not np.isfinite(X).all():
        raise ValueError("features contain NaN or Inf")
    classes = np.unique(y)
    if not np.array_equal(classes, [0.0, 1.0]):
        raise ValueError("need both classes (0 and 1) in y")

    n, width = X.shape
    w = np.zeros(width)
    b = 0.0
    step = 1.0
    loss = _loss(X, y, w, b, reg)
    for _ in range(max_iter):
        p = _sigmoid(X @ w + b)
        err = p - y
        gw = X.T @ err / n + reg * w
        gb = float(np.mean(err))
        gnorm = float(np.sqrt(np.dot(gw, gw) + gb * gb))
        if gnorm < tol:
            break
        # backtracking line search, growing the step again on success
        step = min(step * 2.0, 1e4)
        gsq = gnorm * gnorm
        while True:
            w_new = w - step * gw
            b_new = b - step * gb
            loss_new = _loss(X, y, w_new, b_new, reg)
            if loss_new <= loss - 1e-4 * step * gsq or step < 1e-12:
                break
            step *= 0.5
        w, b, loss = w_new, b_new, loss_new
    return LogRegModel(w, b, trained=True)


def predict_proba(model: LogRegModel, x: np.ndarray) -> float:
    """sigma(w.x + b) for one feature row."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != model.weights.shape:
        raise ValueError(f"feature width {x.shape} does not match model width {model.weights.shape}")
    return float(_sigmoid(np.dot(model.weights, x) + model.bias))


def predict_proba_matrix(model: LogRegModel, X: np.ndarray) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.shape[1] != model.width:
        raise ValueError(f"feature width {X.shape[1]} does not match model width {model.width}")
    return _sigmoid(X @ model.weights + model.bias)


def heuristic_classify(train_pos_scores: Sequence[float], test_scores: Sequence[float]) -> np.ndarray:
    """Predict 1 where the score exceeds the 25th percentile of positive
    train scores (linear interpolation), the baseline decision rule."""
    train_pos_scores = np.asarray(train_pos_scores, dtype=np.float64)
    if train_pos_scores.size == 0:
        raise ValueError("no positive train scores to set the threshold")
    threshold = float(np.percentile(train_pos_scores, 25))
    return (np.asarray(test_scores, dtype=np.float64) > threshold).astype(np.int64)


def save_model(model: LogRegModel, sink) -> None:
    if isinstance(sink, (str, Path)):
        with open(sink, "w", encoding="utf-8") as fh:
            save_model(model, fh)
            return
    sink.write(f"{model.width}\n")
    sink.write(" ".join(f"{x:.12g}" for x in model.weights) + "\n")
    sink.write(f"{model.bias:.12g}\n")


def load_model(source) -> LogRegModel:
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8") as fh:
            return load_model(fh)
    width = int(source.readline().strip())
    weights = np.array([float(t) for t in source.readline().split()])
    if len(weights) != width:
        raise ValueError("weight row does not match header width")
    bias = float(source.readline().strip())
    return LogRegModel(weights, bias, trained=True)
