"""Community- and similarity-biased random-walk node embeddings with
diverse (intra- vs inter-community) link prediction."""

from .communities import (Partition, edge_kind, label_propagation_async, load_partition,
                          louvain, modularity, save_partition)
from .embedding import (Embedding, SkipGramConfig, context_pairs, load_embedding,
                        save_embedding, train_skipgram)
from .evaluation import (EvalReport, ExperimentConfig, LinkPredDataset, build_dataset,
                         holdout_split, roc_auc, run_experiment, sample_negatives,
                         stratified_split, sweep)
from .graph import Graph, is_connected, load_edge_list, remove_edges, save_edge_list
from .linkpred import (LogRegModel, assemble_features, heuristic_classify, pair_embed,
                       predict_proba, train_logreg)
from .similarity import pair_score, score_pairs
from .synth import SccpParams, case_study_2d, karate, sccp_generate
from .walks import (TransitionTable, WalkCorpus, WalkParams, build_nodesim_transitions,
                    dump_corpus, nodesim_walks, uniform_walks)

__version__ = "0.1.0"

__all__ = [
    "Graph", "load_edge_list", "save_edge_list", "is_connected", "remove_edges",
    "Partition", "louvain", "label_propagation_async", "modularity", "edge_kind",
    "load_partition", "save_partition",
    "pair_score", "score_pairs",
    "WalkParams", "TransitionTable", "WalkCorpus", "build_nodesim_transitions",
    "nodesim_walks", "uniform_walks", "dump_corpus",
    "SkipGramConfig", "Embedding", "context_pairs", "train_skipgram",
    "save_embedding", "load_embedding",
    "pair_embed", "assemble_features", "LogRegModel", "train_logreg",
    "predict_proba", "heuristic_classify",
    "LinkPredDataset", "EvalReport", "ExperimentConfig", "holdout_split",
    "sample_negatives", "stratified_split", "roc_auc", "build_dataset",
    "run_experiment", "sweep",
    "SccpParams", "sccp_generate", "karate", "case_study_2d",
]
