"""Command-line front end: reproducible pipelines composed through files.

Subcommands: communities, embed, split, predict, evaluate, sweep,
generate, case-study. All randomness hangs off --seed; report paths
write a matplotlib figure next to the delimited/JSON output unless
--no-figure is given.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import plots
from .communities import Partition, detect, load_partition, modularity, save_partition
from .embedding import SkipGramConfig, load_embedding, save_embedding, train_skipgram
from .evaluation import (ALL_METHODS, EMBEDDING_METHODS, ExperimentConfig, build_dataset,
                         roc_auc, run_experiment, sweep, write_report_json, write_sweep_csv)
from .graph import load_edge_list, save_edge_list
from .linkpred import PAIR_OPERATORS, assemble_features, predict_proba_matrix, train_logreg
from .seeds import derive_seed
from .synth import (SccpParams, case_study_2d, karate, sccp_generate, write_case_study_csv)
from .walks import WalkParams, build_nodesim_transitions, dump_corpus, nodesim_walks, uniform_walks

# embedding/walk defaults shared by every subcommand that trains
_DEFAULTS = dict(alpha=1.0, beta=1.5, gamma=10, walk_length=80, dim=128, window=5,
                 negatives=5, epochs=1, lr_start=0.025, lr_end=0.0001)


def _add_walk_flags(sub, with_dim=True):
    sub.add_argument("--alpha", type=float, default=_DEFAULTS["alpha"],
                     help="intra-community walk weight (default %(default)s)")
    sub.add_argument("--beta", type=float, default=_DEFAULTS["beta"],
                     help="inter-community walk weight (default %(default)s)")
    sub.add_argument("--gamma", type=int, default=_DEFAULTS["gamma"],
                     help="walks per node (default %(default)s)")
    sub.add_argument("--walk-length", type=int, default=_DEFAULTS["walk_length"],
                     help="nodes per walk (default %(default)s)")
    if with_dim:
        sub.add_argument("--dim", type=int, default=_DEFAULTS["dim"],
                         help="embedding dimension (default %(default)s)")
    sub.add_argument("--window", type=int, default=_DEFAULTS["window"],
                     help="context radius (default %(default)s)")
    sub.add_argument("--negatives", type=int, default=_DEFAULTS["negatives"],
                     help="negative samples per pair (default %(default)s)")
    sub.add_argument("--epochs", type=int, default=_DEFAULTS["epochs"],
                     help="corpus passes (default %(default)s)")
    sub.add_argument("--lr-start", type=float, default=_DEFAULTS["lr_start"],
                     help="initial learning rate (default %(default)s)")
    sub.add_argument("--lr-end", type=float, default=_DEFAULTS["lr_end"],
                     help="final learning rate (default %(default)s)")
    sub.add_argument("--window-strict-paper", action="store_true",
                     help="use context radius window-1 instead of window")


def _add_common(sub):
    sub.add_argument("--seed", type=int, default=0, help="master rng seed (default %(default)s)")
    sub.add_argument("--threads", type=int, default=1,
                     help="worker threads; 1 keeps runs deterministic (default %(default)s)")


def _walk_params(args) -> WalkParams:
    return WalkParams(alpha=args.alpha, beta=args.beta, gamma=args.gamma,
                      walk_length=args.walk_length, seed=args.seed)


def _sg_config(args, dim=None) -> SkipGramConfig:
    return SkipGramConfig(dim=dim if dim is not None else args.dim, window=args.window,
                          negatives=args.negatives, epochs=args.epochs,
                          lr_start=args.lr_start, lr_end=args.lr_end, seed=args.seed,
                          strict_paper_window=args.window_strict_paper)


def _load_graph_and_partition(args):
    g = load_edge_list(args.graph)
    if getattr(args, "communities", None):
        p = load_partition(args.communities, g)
    else:
        p = detect(g, getattr(args, "detector", "louvain"), derive_seed(args.seed, "communities"))
    return g, p


def _labels_for(g, keep_labels):
    return list(g.node_names) if keep_labels else [str(i) for i in range(g.n)]


# ---------------------------------------------------------------------------
# Subcommand implementations


def _cmd_communities(args) -> int:
    g = load_edge_list(args.graph)
    p = detect(g, args.method, args.seed)
    save_partition(p, g, args.out)
    q = modularity(g, p) if g.m else float("nan")
    print(f"communities={p.c} modularity={q:.4f} -> {args.out}")
    return 0


def _cmd_embed(args) -> int:
    g = load_edge_list(args.graph)
    walk = _walk_params(args)
    if args.method == "nodesim":
        if args.communities:
            p = load_partition(args.communities, g)
        else:
            p = detect(g, args.detector, derive_seed(args.seed, "communities"))
        table = build_nodesim_transitions(g, p, walk.alpha, walk.beta)
        corpus = nodesim_walks(table, walk, threads=args.threads)
    else:
        corpus = uniform_walks(g, walk, threads=args.threads)
    if args.walks_out:
        dump_corpus(corpus, args.walks_out,
                    names=g.node_names if args.keep_labels else None)
    emb = train_skipgram(corpus, _sg_config(args), threads=args.threads,
                         labels=_labels_for(g, args.keep_labels))
    save_embedding(emb, args.out)
    print(f"embedding {emb.n}x{emb.dim} -> {args.out}")
    return 0


def _cmd_split(args) -> int:
    g, p = _load_graph_and_partition(args)
    ds = build_dataset(g, p, args.frac, args.train_ratio, args.seed)

    def label(u):
        return g.node_names[u] if args.keep_labels else str(u)

    prefix = Path(args.out_prefix)
    prefix.parent.mkdir(parents=True, exist_ok=True)
    residual = f"{prefix}_residual.edges"
    save_edge_list(ds.g_ne, residual, keep_labels=args.keep_labels)
    comm_path = f"{prefix}_communities.txt"
    with open(comm_path, "w", encoding="utf-8") as fh:
        for u in range(g.n):
            fh.write(f"{label(u)} {p.labels[u]}\n")
    pairs_path = f"{prefix}_pairs.tsv"
    train_set = set(int(i) for i in ds.train_idx)
    with open(pairs_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, delimiter="\t")
        writer.writerow(["u", "v", "label", "kind", "split"])
        records = ds.positives + ds.negatives
        labels = ds.labels
        for i, (u, v, kind) in enumerate(records):
            writer.writerow([label(u), label(v), int(labels[i]), kind,
                             "train" if i in train_set else "test"])
    shortfall = {k: v for k, v in ds.quota_shortfall.items() if v}
    note = f" (quota shortfall: {shortfall})" if shortfall else ""
    print(f"split: {len(ds.positives)} positives, {len(ds.negatives)} negatives{note}")
    print(f"  -> {residual}\n  -> {comm_path}\n  -> {pairs_path}")
    return 0


def _read_community_map(path) -> dict[str, int]:
    out: dict[str, int] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith(("#", "%")):
                continue
            name, comm = line.split()
            out[name] = int(comm)
    return out


def _cmd_predict(args) -> int:
    emb = load_embedding(args.embedding)
    comm_map = _read_community_map(args.communities) if args.communities else None
    use_bit = not args.no_community_feature
    if use_bit and comm_map is None:
        print("error: --communities is required unless --no-community-feature is set",
              file=sys.stderr)
        return 1

    rows = []
    with open(args.pairs, "r", encoding="utf-8") as fh:
        reader = csv.DictReader(fh, delimiter="\t")
        for rec in reader:
            rows.append((rec["u"], rec["v"], int(rec["label"]), rec["kind"], rec["split"]))

    partition = None
    if use_bit:
        raw = [comm_map[lab] for lab in emb.labels]
        remap = {c: i for i, c in enumerate(sorted(set(raw)))}
        partition = Partition(np.array([remap[c] for c in raw]), len(remap))
    pair_ids = [(emb.node_index[u], emb.node_index[v]) for u, v, _, _, _ in rows]
    X = assemble_features(emb, partition, pair_ids, args.operator, community_feature=use_bit)
    y = np.array([lab for _, _, lab, _, _ in rows], dtype=np.int64)
    kinds = np.array([kind for _, _, _, kind, _ in rows])
    is_train = np.array([split == "train" for _, _, _, _, split in rows])

    model = train_logreg(X[is_train], y[is_train], reg=args.reg, seed=args.seed)
    scores = predict_proba_matrix(model, X)
    test = ~is_train

    def auc_or_none(mask):
        try:
            return roc_auc(scores[mask], y[mask])
        except ValueError:
            return None

    result = {
        "operator": args.operator,
        "community_feature": use_bit,
        "n_train": int(is_train.sum()),
        "n_test": int(test.sum()),
        "auc_total": auc_or_none(test),
        "auc_intra": auc_or_none(test & (kinds == "intra")),
        "auc_inter": auc_or_none(test & (kinds == "inter")),
    }
    with open(args.out, "w", encoding="utf-8") as fh:
        json.dump(result, fh, indent=2)
        fh.write("\n")
    if args.scores_out:
        with open(args.scores_out, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, delimiter="\t")
            writer.writerow(["u", "v", "label", "kind", "split", "score"])
            for (u, v, lab, kind, split), s in zip(rows, scores):
                writer.writerow([u, v, lab, kind, split, f"{s:.9g}"])
    print(f"predict: auc_total={result['auc_total']} -> {args.out}")
    return 0


def _experiment_config(args, method=None) -> ExperimentConfig:
    return ExperimentConfig(
        method=method or args.method,
        operator=args.operator,
        walk=_walk_params(args),
        sg=_sg_config(args),
        holdout_frac=args.frac,
        train_ratio=args.train_ratio,
        repeats=args.repeats,
        seed=args.seed,
        detector=args.detector,
        community_feature=not args.no_community_feature,
        fixed_holdout=args.fixed_holdout,
        reg=args.reg,
        threads=args.threads,
        zero_timing=args.deterministic,
    )


def _cmd_evaluate(args) -> int:
    g = load_edge_list(args.graph)
    partition = load_partition(args.communities, g) if args.communities else None
    report = run_experiment(g, _experiment_config(args), partition)
    write_report_json(report, args.out)
    if not args.no_figure:
        plots.eval_report_figure(report, str(Path(args.out).with_suffix(".png")))
    mean = report.mean()
    print(f"{report.method}: mean auc_total={mean['auc_total']} "
          f"auc_intra={mean['auc_intra']} auc_inter={mean['auc_inter']} -> {args.out}")
    return 0


def _parse_grid(specs) -> dict[str, list[float]]:
    grid: dict[str, list[float]] = {}
    for spec_str in specs or []:
        if "=" not in spec_str:
            raise ValueError(f"--grid expects name=v1,v2,... (got {spec_str!r})")
        name, values = spec_str.split("=", 1)
        grid[name.strip()] = [float(v) for v in values.split(",") if v.strip()]
    return grid


def _cmd_sweep(args) -> int:
    g = load_edge_list(args.graph)
    partition = load_partition(args.communities, g) if args.communities else None
    grid = _parse_grid(args.grid)
    reports = sweep(g, _experiment_config(args), grid, partition)
    keys = sorted(grid)
    csv_path = f"{args.out_prefix}.csv"
    write_sweep_csv(reports, keys, csv_path)
    json_path = f"{args.out_prefix}.json"
    with open(json_path, "w", encoding="utf-8") as fh:
        json.dump([r.to_dict() for r in reports], fh, indent=2)
        fh.write("\n")
    if not args.no_figure:
        plots.sweep_figure(reports, keys, f"{args.out_prefix}.png")
    print(f"sweep: {len(reports)} grid points -> {csv_path}")
    return 0


def _cmd_generate(args) -> int:
    params = SccpParams(n=args.nodes, c=args.communities_count, m=args.edges_per_node,
                        intra_ratio=args.intra_ratio, seed=args.seed)
    g, p = sccp_generate(params)
    save_edge_list(g, args.out)
    with open(args.communities_out, "w", encoding="utf-8") as fh:
        for u in range(g.n):
            fh.write(f"{u} {p.labels[u]}\n")
    print(f"generated n={g.n} m={g.m} communities={p.c} -> {args.out}")
    return 0


def _cmd_case_study(args) -> int:
    g = load_edge_list(args.graph) if args.graph else karate()
    partition = load_partition(args.communities, g) if args.communities else None
    walk = _walk_params(args)
    sg = _sg_config(args, dim=2)
    rows, p = case_study_2d(g, walk, sg, partition)
    write_case_study_csv(rows, args.out)
    if not args.no_figure:
        plots.case_study_figure(rows, str(Path(args.out).with_suffix(".png")))
    print(f"case study: {len(rows)} nodes, {p.c} communities -> {args.out}")
    return 0


# ---------------------------------------------------------------------------
# Parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nodesim",
        description="Community-aware random-walk embeddings and diverse link prediction")
    subs = parser.add_subparsers(dest="command", required=True)

    sp = subs.add_parser("communities", help="detect communities and write a community file")
    sp.add_argument("--graph", required=True, help="edge-list file")
    sp.add_argument("--method", choices=("louvain", "labelprop"), default="louvain")
    sp.add_argument("--out", required=True, help="output community file")
    _add_common(sp)
    sp.set_defaults(func=_cmd_communities)

    sp = subs.add_parser("embed", help="train a node embedding and write it as text")
    sp.add_argument("--graph", required=True)
    sp.add_argument("--method", choices=EMBEDDING_METHODS, default="nodesim")
    sp.add_argument("--communities", help="community file (default: run louvain)")
    sp.add_argument("--detector", choices=("louvain", "labelprop"), default="louvain")
    sp.add_argument("--out", required=True, help="output embedding file")
    sp.add_argument("--walks-out", help="optionally dump the walk corpus")
    sp.add_argument("--keep-labels", action="store_true",
                    help="write original node labels instead of internal ids")
    _add_walk_flags(sp)
    _add_common(sp)
    sp.set_defaults(func=_cmd_embed)

    sp = subs.add_parser("split", help="holdout split + negatives + train/test strata")
    sp.add_argument("--graph", required=True)
    sp.add_argument("--communities", help="community file (default: run louvain)")
    sp.add_argument("--detector", choices=("louvain", "labelprop"), default="louvain")
    sp.add_argument("--frac", type=float, default=0.1, help="holdout fraction per edge kind")
    sp.add_argument("--train-ratio", type=float, default=0.5)
    sp.add_argument("--out-prefix", required=True)
    sp.add_argument("--keep-labels", action="store_true")
    _add_common(sp)
    sp.set_defaults(func=_cmd_split)

    sp = subs.add_parser("predict", help="train/evaluate a link classifier from files")
    sp.add_argument("--embedding", required=True, help="embedding file from 'embed'")
    sp.add_argument("--pairs", required=True, help="pairs TSV from 'split'")
    sp.add_argument("--communities", help="community file matching the pairs labels")
    sp.add_argument("--operator", choices=PAIR_OPERATORS, default="hadamard")
    sp.add_argument("--no-community-feature", action="store_true",
                    help="ablation: drop the community bit from the features")
    sp.add_argument("--reg", type=float, default=1e-4)
    sp.add_argument("--out", required=True, help="output JSON report")
    sp.add_argument("--scores-out", help="optional per-pair score TSV")
    _add_common(sp)
    sp.set_defaults(func=_cmd_predict)

    for name in ("evaluate", "sweep"):
        sp = subs.add_parser(name, help=("end-to-end evaluation" if name == "evaluate"
                                         else "evaluation over a parameter grid"))
        sp.add_argument("--graph", required=True)
        sp.add_argument("--method", choices=ALL_METHODS, default="nodesim")
        sp.add_argument("--operator", choices=PAIR_OPERATORS, default="hadamard")
        sp.add_argument("--communities", help="external community file")
        sp.add_argument("--detector", choices=("louvain", "labelprop"), default="louvain")
        sp.add_argument("--frac", type=float, default=0.1)
        sp.add_argument("--train-ratio", type=float, default=0.5)
        sp.add_argument("--repeats", type=int, default=5)
        sp.add_argument("--no-community-feature", action="store_true")
        sp.add_argument("--fixed-holdout", action="store_true",
                        help="reuse the first repeat's holdout instead of redrawing")
        sp.add_argument("--reg", type=float, default=1e-4)
        sp.add_argument("--deterministic", action="store_true",
                        help="zero timing fields so outputs are byte-stable")
        sp.add_argument("--no-figure", action="store_true")
        _add_walk_flags(sp)
        _add_common(sp)
        if name == "evaluate":
            sp.add_argument("--out", required=True, help="output JSON report")
            sp.set_defaults(func=_cmd_evaluate)
        else:
            sp.add_argument("--grid", action="append",
                            help="name=v1,v2,... (repeatable; empty = defaults only)")
            sp.add_argument("--out-prefix", required=True)
            sp.set_defaults(func=_cmd_sweep)

    sp = subs.add_parser("generate", help="synthetic graph with planted communities")
    sp.add_argument("--nodes", type=int, required=True)
    sp.add_argument("--communities-count", type=int, required=True)
    sp.add_argument("--edges-per-node", type=int, default=4)
    sp.add_argument("--intra-ratio", type=float, default=0.75)
    sp.add_argument("--out", required=True, help="output edge-list file")
    sp.add_argument("--communities-out", required=True, help="output community file")
    _add_common(sp)
    sp.set_defaults(func=_cmd_generate)

    sp = subs.add_parser("case-study", help="2-D embedding of a small graph (default karate)")
    sp.add_argument("--graph", help="edge-list file (default: bundled karate club)")
    sp.add_argument("--communities", help="community file (default: run louvain)")
    sp.add_argument("--out", required=True, help="output CSV of node,x,y,community")
    sp.add_argument("--no-figure", action="store_true")
    _add_walk_flags(sp, with_dim=False)
    _add_common(sp)
    sp.set_defaults(func=_cmd_case_study)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, RuntimeError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
