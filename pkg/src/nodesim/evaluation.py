"""Link-prediction evaluation: ratio-preserving holdout, matched negative
sampling, stratified splits, ROC-AUC (total / intra / inter), the
experiment runner and parameter sweeps.

The holdout removes a fraction of each edge kind uniformly at random
while keeping the residual graph connected; negatives are non-edges of
the full graph with the same per-kind counts as the removed positives.
"""

from __future__ import annotations

import csv
import json
import math
import random
import time
import warnings
from dataclasses import dataclass, field, replace
from itertools import product
from pathlib import Path
from typing import Sequence

import numpy as np

from . import similarity
from .communities import INTER, INTRA, Partition, detect, edge_kind
from .embedding import SkipGramConfig, train_skipgram
from .graph import Graph, is_connected, remove_edges
from .linkpred import (assemble_features, heuristic_classify, predict_proba_matrix,
                       train_logreg)
from .seeds import derive_seed
from .walks import WalkParams, build_nodesim_transitions, nodesim_walks, uniform_walks

HEURISTIC_METHODS = {"jc": "jaccard", "aa": "adamic_adar", "ra": "resource_allocation"}
EMBEDDING_METHODS = ("nodesim", "deepwalk")
ALL_METHODS = tuple(HEURISTIC_METHODS) + EMBEDDING_METHODS + ("random",)

SWEEPABLE = ("alpha", "beta", "dim", "window", "gamma", "walk_length", "train_ratio")


# ---------------------------------------------------------------------------
# Holdout


def _bridges(adj: list[set]) -> set[tuple[int, int]]:
    """All bridges, iterative lowpoint DFS. Deleting edges never un-bridges
    an edge, so this set stays valid while the holdout shrinks the graph."""
    n = len(adj)
    disc = [-1] * n
    low = [0] * n
    out: set[tuple[int, int]] = set()
    timer = 0
    for root in range(n):
        if disc[root] != -1:
            continue
        disc[root] = low[root] = timer
        timer += 1
        stack = [(root, -1, iter(adj[root]))]
        while stack:
            u, parent, it = stack[-1]
            pushed = False
            for v in it:
                if disc[v] == -1:
                    disc[v] = low[v] = timer
                    timer += 1
                    stack.append((v, u, iter(adj[v])))
                    pushed = True
                    break
                if v != parent:
                    low[u] = min(low[u], disc[v])
            if not pushed:
                stack.pop()
                if parent != -1:
                    low[parent] = min(low[parent], low[u])
                    if low[u] > disc[parent]:
                        out.add((u, parent) if u < parent else (parent, u))
    return out


def _removal_keeps_connected(adj: list[set], u: int, v: int) -> bool:
    """Would deleting the present edge (u, v) keep the graph connected?

    Equivalent to u and v staying connected without the direct edge. A
    shared neighbor settles it immediately; otherwise an early-exit BFS.
    """
    if not adj[u].isdisjoint(adj[v]):
        return True
    seen = {u}
    frontier = [w for w in adj[u] if w != v]
    seen.update(frontier)
    while frontier:
        nxt = []
        for w in frontier:
            for x in adj[w]:
                if x == v:
                    return True
                if x not in seen:
                    seen.add(x)
                    nxt.append(x)
        frontier = nxt
    return False


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def holdout_quotas(g: Graph, p: Partition, frac: float = 0.1) -> dict[str, int]:
    kinds = [edge_kind(p, u, v) for u, v in g.edge_set]
    return {
        INTRA: _round_half_up(frac * kinds.count(INTRA)),
        INTER: _round_half_up(frac * kinds.count(INTER)),
    }


def holdout_split(g: Graph, p: Partition, frac: float = 0.1, seed: int = 0):
    """Remove round(frac * count) edges per kind, keeping connectivity.

    Candidates are shuffled per kind and tested one by one; bridges are
    skipped. Returns (residual graph, removed edges tagged with kind).
    Warns when a kind's quota is unreachable.
    """
    if not 0 < frac < 1:
        raise ValueError("holdout fraction must be in (0, 1)")
    if not is_connected(g):
        raise ValueError("holdout requires a connected graph")
    rng = random.Random(derive_seed(seed, "holdout"))

    by_kind = {INTRA: [], INTER: []}
    for u, v in g.edges():
        by_kind[edge_kind(p, u, v)].append((u, v))
    quotas = {k: _round_half_up(frac * len(v)) for k, v in by_kind.items()}

    adj = [set(int(x) for x in g.adjacency[u]) for u in range(g.n)]
    bridges = _bridges(adj)

    removed: list[tuple[int, int, str]] = []
    for kind in (INTER, INTRA):  # scarcer kind gets first pick
        candidates = by_kind[kind]
        rng.shuffle(candidates)
        taken = 0
        for u, v in candidates:
            if taken >= quotas[kind]:
                break
            key = (u, v) if u < v else (v, u)
            if key in bridges:
                continue
            if not _removal_keeps_connected(adj, u, v):
                continue
            adj[u].discard(v)
            adj[v].discard(u)
            removed.append((u, v, kind))
            taken += 1
        if taken < quotas[kind]:
            warnings.warn(f"holdout: only {taken}/{quotas[kind]} removable {kind} edges")

    g_ne = remove_edges(g, [(u, v) for u, v, _ in removed])
    return g_ne, removed


# ---------------------------------------------------------------------------
# Negative sampling and split


def sample_negatives(g: Graph, p: Partition, intra_count: int, inter_count: int,
                     seed: int = 0, max_attempts: int = 10_000_000):
    """Uniform non-edges of the full graph, matched per kind, no duplicates."""
    sizes = p.community_sizes()
    intra_possible = int(np.sum(sizes * (sizes - 1) // 2))
    intra_edges = sum(1 for u, v in g.edge_set if p.labels[u] == p.labels[v])
    avail_intra = intra_possible - intra_edges
    avail_inter = (g.n * (g.n - 1) // 2 - intra_possible) - (g.m - intra_edges)
    if intra_count > avail_intra:
        raise ValueError(f"only {avail_intra} intra non-edges exist, {intra_count} requested")
    if inter_count > avail_inter:
        raise ValueError(f"only {avail_inter} inter non-edges exist, {inter_count} requested")

    rng = random.Random(derive_seed(seed, "negatives"))
    chosen: set[tuple[int, int]] = set()
    out: list[tuple[int, int, str]] = []
    need = {INTRA: intra_count, INTER: inter_count}
    attempts = 0
    while need[INTRA] > 0 or need[INTER] > 0:
        attempts += 1
        if attempts > max_attempts:
            raise RuntimeError("negative sampling exceeded the attempt budget")
        u = rng.randrange(g.n)
        v = rng.randrange(g.n)
        if u == v:
            continue
        key = (u, v) if u < v else (v, u)
        if key in chosen or key in g.edge_set:
            continue
        kind = edge_kind(p, u, v)
        if need[kind] > 0:
            chosen.add(key)
            out.append((key[0], key[1], kind))
            need[kind] -= 1
    return out


def stratified_split(examples: Sequence[tuple], train_ratio: float = 0.5, seed: int = 0):
    """Split (u, v, label, kind) records per (label, kind) stratum.

    floor(train_ratio * size) of each stratum goes to train, the rest to
    test, after a seeded per-stratum shuffle.
    """
    if not 0 < train_ratio < 1:
        raise ValueError("train_ratio must be in (0, 1)")
    labels = [rec[2] for rec in examples]
    kinds = [rec[3] for rec in examples]
    train_idx, test_idx = _stratified_indices(labels, kinds, train_ratio, seed)
    return [examples[i] for i in train_idx], [examples[i] for i in test_idx]


def _stratified_indices(labels, kinds, train_ratio, seed):
    rng = random.Random(derive_seed(seed, "split"))
    train: list[int] = []
    test: list[int] = []
    for label in (1, 0):
        for kind in (INTRA, INTER):
            idx = [i for i in range(len(labels)) if labels[i] == label and kinds[i] == kind]
            if not idx:
                warnings.warn(f"empty stratum (label={label}, kind={kind})")
                continue
            rng.shuffle(idx)
            cut = int(train_ratio * len(idx))
            train.extend(idx[:cut])
            test.extend(idx[cut:])
    return np.array(train, dtype=np.int64), np.array(test, dtype=np.int64)


# ---------------------------------------------------------------------------
# ROC-AUC


def roc_auc(scores: Sequence[float], labels: Sequence[int]) -> float:
    """Mann-Whitney form: P(score_pos > score_neg), ties counted 0.5."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    n_pos = int(labels.sum())
    n_neg = len(labels) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValueError("roc_auc needs both classes")
    order = np.argsort(scores, kind="mergesort")
    ranks = np.empty(len(scores), dtype=np.float64)
    sorted_scores = scores[order]
    i = 0
    while i < len(scores):
        j = i
        while j + 1 < len(scores) and sorted_scores[j + 1] == sorted_scores[i]:
            j += 1
        ranks[order[i:j + 1]] = 0.5 * ((i + 1) + (j + 1))  # average rank, 1-based
        i = j + 1
    rank_pos = float(ranks[labels == 1].sum())
    return (rank_pos - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)


def _safe_auc(scores, labels):
    try:
        return roc_auc(scores, labels)
    except ValueError:
        return None


# ---------------------------------------------------------------------------
# Dataset assembly


@dataclass
class LinkPredDataset:
    g_ne: Graph
    positives: list[tuple[int, int, str]]
    negatives: list[tuple[int, int, str]]
    train_idx: np.ndarray  # indices into positives + negatives
    test_idx: np.ndarray
    seed: int
    quota_shortfall: dict[str, int]

    @property
    def pairs(self) -> list[tuple[int, int]]:
        return [(u, v) for u, v, _ in self.positives + self.negatives]

    @property
    def labels(self) -> np.ndarray:
        return np.array([1] * len(self.positives) + [0] * len(self.negatives), dtype=np.int64)

    @property
    def kinds(self) -> list[str]:
        return [k for _, _, k in self.positives + self.negatives]


def build_dataset(g: Graph, p: Partition, frac: float = 0.1,
                  train_ratio: float = 0.5, seed: int = 0) -> LinkPredDataset:
    quotas = holdout_quotas(g, p, frac)
    g_ne, positives = holdout_split(g, p, frac, seed)
    got = {INTRA: sum(1 for r in positives if r[2] == INTRA),
           INTER: sum(1 for r in positives if r[2] == INTER)}
    negatives = sample_negatives(g, p, got[INTRA], got[INTER], seed)
    labels = [1] * len(positives) + [0] * len(negatives)
    kinds = [r[2] for r in positives] + [r[2] for r in negatives]
    train_idx, test_idx = _stratified_indices(labels, kinds, train_ratio, seed)
    shortfall = {k: quotas[k] - got[k] for k in quotas}
    return LinkPredDataset(g_ne, positives, negatives, train_idx, test_idx, seed, shortfall)


# ---------------------------------------------------------------------------
# Experiment runner


@dataclass(frozen=True)
class ExperimentConfig:
    method: str = "nodesim"
    operator: str = "hadamard"
    walk: WalkParams = field(default_factory=WalkParams)
    sg: SkipGramConfig = field(default_factory=SkipGramConfig)
    holdout_frac: float = 0.1
    train_ratio: float = 0.5
    repeats: int = 5
    seed: int = 0
    detector: str = "louvain"
    community_feature: bool = True
    fixed_holdout: bool = False
    reg: float = 1e-4
    threads: int = 1
    zero_timing: bool = False

    def __post_init__(self):
        if self.method not in ALL_METHODS:
            raise ValueError(f"unknown method {self.method!r}; choose from {ALL_METHODS}")
        if self.repeats < 1:
            raise ValueError("repeats must be >= 1")

    def params_record(self) -> dict:
        return {
            "alpha": self.walk.alpha, "beta": self.walk.beta,
            "gamma": self.walk.gamma, "walk_length": self.walk.walk_length,
            "dim": self.sg.dim, "window": self.sg.window,
            "negatives": self.sg.negatives, "epochs": self.sg.epochs,
            "lr_start": self.sg.lr_start, "lr_end": self.sg.lr_end,
            "holdout_frac": self.holdout_frac, "train_ratio": self.train_ratio,
            "repeats": self.repeats, "seed": self.seed,
            "detector": self.detector, "community_feature": self.community_feature,
            "fixed_holdout": self.fixed_holdout, "reg": self.reg,
        }


@dataclass
class RunResult:
    auc_total: float | None
    auc_intra: float | None
    auc_inter: float | None
    seconds: float
    note: str = ""

    def to_dict(self) -> dict:
        return {"auc_total": self.auc_total, "auc_intra": self.auc_intra,
                "auc_inter": self.auc_inter, "seconds": self.seconds,
                **({"note": self.note} if self.note else {})}


@dataclass
class EvalReport:
    method: str
    operator: str | None
    params: dict
    runs: list[RunResult]

    def mean(self) -> dict:
        out = {}
        for key in ("auc_total", "auc_intra", "auc_inter", "seconds"):
            values = [getattr(r, key) for r in self.runs if getattr(r, key) is not None]
            out[key] = float(np.mean(values)) if values else None
        return out

    def to_dict(self) -> dict:
        return {"method": self.method, "operator": self.operator,
                "params": self.params, "runs": [r.to_dict() for r in self.runs],
                "mean": self.mean()}


def _heuristic_scores(ds: LinkPredDataset, method: str):
    pairs = ds.pairs
    return np.array(similarity.score_pairs(ds.g_ne, pairs, HEURISTIC_METHODS[method]))


def _embedding_scores(ds: LinkPredDataset, p: Partition, config: ExperimentConfig, rs: int):
    walk = replace(config.walk, seed=derive_seed(rs, "walks"))
    if config.method == "nodesim":
        table = build_nodesim_transitions(ds.g_ne, p, walk.alpha, walk.beta)
        corpus = nodesim_walks(table, walk, threads=config.threads)
        use_bit = config.community_feature
    else:  # deepwalk baseline: plain walks, no community information
        corpus = uniform_walks(ds.g_ne, walk, threads=config.threads)
        use_bit = False
    sg = replace(config.sg, seed=derive_seed(rs, "sgns"))
    emb = train_skipgram(corpus, sg, threads=config.threads, labels=ds.g_ne.node_names)

    X = assemble_features(emb, p if use_bit else None, ds.pairs,
                          config.operator, community_feature=use_bit)
    y = ds.labels
    model = train_logreg(X[ds.train_idx], y[ds.train_idx], reg=config.reg,
                         seed=derive_seed(rs, "logreg"))
    scores = np.full(len(y), np.nan)
    scores[ds.test_idx] = predict_proba_matrix(model, X[ds.test_idx])
    scores[ds.train_idx] = predict_proba_matrix(model, X[ds.train_idx])
    return scores


def _run_repeat(g: Graph, config: ExperimentConfig, partition: Partition | None,
                rs: int, reuse: tuple[LinkPredDataset, Partition] | None):
    if reuse is not None:
        ds, p = reuse
    else:
        p = partition if partition is not None else detect(g, config.detector,
                                                           derive_seed(rs, "communities"))
        ds = build_dataset(g, p, config.holdout_frac, config.train_ratio, rs)

    if config.method in HEURISTIC_METHODS:
        scores = _heuristic_scores(ds, config.method)
    elif config.method == "random":
        rng = np.random.default_rng(derive_seed(rs, "randscores"))
        scores = rng.random(len(ds.labels))
    else:
        scores = _embedding_scores(ds, p, config, rs)

    labels = ds.labels
    kinds = np.array(ds.kinds)
    test = ds.test_idx
    auc_total = _safe_auc(scores[test], labels[test])
    intra_mask = test[kinds[test] == INTRA]
    inter_mask = test[kinds[test] == INTER]
    auc_intra = _safe_auc(scores[intra_mask], labels[intra_mask]) if len(intra_mask) else None
    auc_inter = _safe_auc(scores[inter_mask], labels[inter_mask]) if len(inter_mask) else None

    extras = {}
    if config.method in HEURISTIC_METHODS:
        train_pos = [i for i in ds.train_idx if labels[i] == 1]
        preds = heuristic_classify(scores[train_pos], scores[test])
        extras["threshold_accuracy"] = float(np.mean(preds == labels[test]))
    return ds, p, auc_total, auc_intra, auc_inter, extras


def run_experiment(g: Graph, config: ExperimentConfig,
                   partition: Partition | None = None) -> EvalReport:
    """Repeat the full pipeline (holdout, communities, scoring, AUC) and
    aggregate. Failed repeats are recorded with a note instead of aborting."""
    runs: list[RunResult] = []
    first: tuple[LinkPredDataset, Partition] | None = None
    for r in range(config.repeats):
        rs = derive_seed(config.seed, "repeat", r)
        start = time.perf_counter()
        try:
            reuse = first if (config.fixed_holdout and first is not None) else None
            ds, p, auc_total, auc_intra, auc_inter, extras = _run_repeat(
                g, config, partition, rs, reuse)
            if config.fixed_holdout and first is None:
                first = (ds, p)
            seconds = 0.0 if config.zero_timing else time.perf_counter() - start
            note = ";".join(f"{k}={v:.4f}" for k, v in extras.items())
            runs.append(RunResult(auc_total, auc_intra, auc_inter, seconds, note))
        except Exception as exc:  # noqa: BLE001 - report partial results
            seconds = 0.0 if config.zero_timing else time.perf_counter() - start
            runs.append(RunResult(None, None, None, seconds, f"failed: {exc}"))
    operator = config.operator if config.method in EMBEDDING_METHODS else None
    return EvalReport(config.method, operator, config.params_record(), runs)


# ---------------------------------------------------------------------------
# Parameter sweeps


def _apply_point(config: ExperimentConfig, point: dict) -> ExperimentConfig:
    walk_fields = {k: v for k, v in point.items() if k in ("alpha", "beta", "gamma", "walk_length")}
    sg_fields = {k: v for k, v in point.items() if k in ("dim", "window")}
    top_fields = {k: v for k, v in point.items() if k == "train_ratio"}
    out = config
    if walk_fields:
        out = replace(out, walk=replace(out.walk, **walk_fields))
    if sg_fields:
        out = replace(out, sg=replace(out.sg, **{("dim" if k == "dim" else "window"): int(v) for k, v in sg_fields.items()}))
    if top_fields:
        out = replace(out, **top_fields)
    return out


def sweep(g: Graph, base: ExperimentConfig, grid: dict[str, Sequence],
          partition: Partition | None = None) -> list[EvalReport]:
    """One report per grid point (cartesian product); unvaried parameters
    stay at the base config's defaults. Per-point failures do not abort."""
    for key in grid:
        if key not in SWEEPABLE:
            raise ValueError(f"cannot sweep {key!r}; choose from {SWEEPABLE}")
    if not grid:
        return [run_experiment(g, base, partition)]
    keys = sorted(grid)
    reports = []
    for combo in product(*(grid[k] for k in keys)):
        point = dict(zip(keys, combo))
        config = _apply_point(base, point)
        try:
            reports.append(run_experiment(g, config, partition))
        except Exception as exc:  # noqa: BLE001
            report = EvalReport(base.method, base.operator, {**base.params_record(), **point},
                                [RunResult(None, None, None, 0.0, f"failed: {exc}")])
            reports.append(report)
    return reports


# ---------------------------------------------------------------------------
# Report serialization


def write_report_json(report: EvalReport, sink) -> None:
    if isinstance(sink, (str, Path)):
        with open(sink, "w", encoding="utf-8") as fh:
            write_report_json(report, fh)
            return
    json.dump(report.to_dict(), sink, indent=2)
    sink.write("\n")


def write_sweep_csv(reports: list[EvalReport], grid_keys: Sequence[str], sink) -> None:
    if isinstance(sink, (str, Path)):
        with open(sink, "w", encoding="utf-8", newline="") as fh:
            write_sweep_csv(reports, grid_keys, fh)
            return
    writer = csv.writer(sink)
    keys = list(grid_keys)
    writer.writerow(["method", "operator", *keys,
                     "auc_total_mean", "auc_intra_mean", "auc_inter_mean", "seconds_mean"])
    for report in reports:
        mean = report.mean()
        writer.writerow([report.method, report.operator or "",
                         *[report.params.get(k) for k in keys],
                         mean["auc_total"], mean["auc_intra"], mean["auc_inter"],
                         mean["seconds"]])
