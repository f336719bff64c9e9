"""Synthetic graphs with planted communities, plus the bundled karate
fixture and the 2-D embedding case study.

The generator seeds every community with a complete graph of m nodes,
then grows the network one node per community per round. Each new node
draws m edges by preferential attachment; the first edge always lands in
the node's home community and the remaining ones are intra with a
probability calibrated so the overall intra fraction converges to
``intra_ratio``.
"""

from __future__ import annotations

import csv
import random
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .communities import Partition, louvain
from .embedding import SkipGramConfig, train_skipgram
from .graph import Graph, is_connected, load_edge_list
from .seeds import derive_seed
from .walks import WalkParams, build_nodesim_transitions, nodesim_walks

_MAX_CONNECT_RETRIES = 10
_MAX_COLLISION_RESAMPLES = 100


@dataclass(frozen=True)
class SccpParams:
    n: int
    c: int
    m: int = 4
    intra_ratio: float = 0.75
    seed: int = 0

    def __post_init__(self):
        if self.c < 1 or self.m < 1:
            raise ValueError("need c >= 1 and m >= 1")
        if self.n % self.c != 0:
            raise ValueError("n must be divisible by c")
        if self.n // self.c <= self.m:
            raise ValueError("community size n/c must exceed m")
        if not 0 < self.intra_ratio <= 1:
            raise ValueError("intra_ratio must be in (0, 1]")


def sccp_generate(params: SccpParams) -> tuple[Graph, Partition]:
    """Scale-free graph with c equal communities and a controlled
    intra/inter edge ratio; retries with fresh streams if disconnected."""
    last_error = None
    for attempt in range(_MAX_CONNECT_RETRIES):
        g, p = _sccp_attempt(params, attempt)
        if params.intra_ratio == 1.0 or is_connected(g):
            return g, p
        last_error = f"attempt {attempt}: generated graph disconnected"
    raise RuntimeError(f"SCCP generation failed to produce a connected graph ({last_error})")


def _sccp_attempt(params: SccpParams, attempt: int) -> tuple[Graph, Partition]:
    rng = random.Random(derive_seed(params.seed, "sccp", attempt))
    n, c, m, ratio = params.n, params.c, params.m, params.intra_ratio
    # beyond the forced first intra edge, calibrate the remaining draws so a
    # new node contributes m*ratio intra edges in expectation
    extra_intra = (m * ratio - 1.0) / (m - 1) if m > 1 else 1.0
    extra_intra = min(max(extra_intra, 0.0), 1.0)

    labels = np.empty(n, dtype=np.int64)
    members: list[list[int]] = [[] for _ in range(c)]
    # degree-proportional draws: one slot per unit of degree
    slots: list[list[int]] = [[] for _ in range(c)]
    edges: list[tuple[int, int]] = []
    next_id = 0

    def add_edge(u, v):
        edges.append((u, v))
        slots[labels[u]].append(u)
        slots[labels[v]].append(v)

    for comm in range(c):
        seed_nodes = list(range(next_id, next_id + m))
        next_id += m
        for u in seed_nodes:
            labels[u] = comm
        members[comm].extend(seed_nodes)
        for i, u in enumerate(seed_nodes):
            for v in seed_nodes[i + 1:]:
                add_edge(u, v)

    rounds = n // c - m
    for _ in range(rounds):
        for comm in range(c):
            x = next_id
            next_id += 1
            labels[x] = comm
            linked: set[int] = set()
            for e in range(m):
                intra = e == 0 or rng.random() < extra_intra
                target_comm = comm if intra else _other_community(rng, c, comm)
                target = _draw_target(rng, slots[target_comm], members[target_comm], x, linked)
                linked.add(target)
                add_edge(x, target)
            members[comm].append(x)

    g = Graph(n, edges)
    return g, Partition(labels, c)


def _other_community(rng, c, home):
    pick = rng.randrange(c - 1)
    return pick if pick < home else pick + 1


def _draw_target(rng, slot_list, member_list, x, linked):
    for _ in range(_MAX_COLLISION_RESAMPLES):
        cand = slot_list[rng.randrange(len(slot_list))]
        if cand != x and cand not in linked:
            return cand
    remaining = [u for u in member_list if u != x and u not in linked]
    return remaining[rng.randrange(len(remaining))]


def intra_edge_fraction(g: Graph, p: Partition) -> float:
    intra = sum(1 for u, v in g.edge_set if p.labels[u] == p.labels[v])
    return intra / g.m


# ---------------------------------------------------------------------------
# Karate fixture and case study


def karate() -> Graph:
    """The classic 34-node karate club graph, bundled with the package."""
    ref = resources.files("nodesim.data").joinpath("karate.edges")
    with ref.open("r", encoding="utf-8") as fh:
        return load_edge_list(fh)


def case_study_2d(g: Graph, walk: WalkParams, sg: SkipGramConfig,
                  partition: Partition | None = None):
    """Louvain + biased walks + skip-gram at d=2; rows of (node, x, y, community)."""
    if sg.dim != 2:
        raise ValueError("case study requires dim=2")
    p = partition if partition is not None else louvain(g, derive_seed(walk.seed, "case-communities"))
    table = build_nodesim_transitions(g, p, walk.alpha, walk.beta)
    corpus = nodesim_walks(table, walk)
    emb = train_skipgram(corpus, sg, labels=g.node_names)
    rows = [(g.node_names[u], float(emb.input_vectors[u, 0]), float(emb.input_vectors[u, 1]),
             int(p.labels[u])) for u in range(g.n)]
    return rows, p


def write_case_study_csv(rows, sink) -> None:
    if isinstance(sink, (str, Path)):
        with open(sink, "w", encoding="utf-8", newline="") as fh:
            write_case_study_csv(rows, fh)
            return
    writer = csv.writer(sink)
    writer.writerow(["node", "x", "y", "community"])
    for node, x, y, comm in rows:
        writer.writerow([node, f"{x:.9g}", f"{y:.9g}", comm])


def mean_pairwise_distances(rows) -> tuple[float, float]:
    """(mean intra-community, mean inter-community) Euclidean distance."""
    coords = np.array([[x, y] for _, x, y, _ in rows])
    comms = np.array([comm for _, _, _, comm in rows])
    intra, inter = [], []
    for i in range(len(rows)):
        for j in range(i + 1, len(rows)):
            d = float(np.hypot(*(coords[i] - coords[j])))
            (intra if comms[i] == comms[j] else inter).append(d)
    return float(np.mean(intra)), float(np.mean(inter))
