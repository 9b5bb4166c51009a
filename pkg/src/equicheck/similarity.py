"""Symbolic similarity gates: Jaccard over abstract graphs, best-match
similarity over def-use path sets, and the threshold decision that lets an
analyzer skip its model call.

Cross-graph paths are compared as node-KIND sequences; raw node ids are not
comparable between graphs.
"""

from __future__ import annotations

from dataclasses import dataclass

from .cfg import AbstractGraph, Cfg
from .dfg import DataFlowSummary

DEFAULT_THRESHOLD = 0.7


@dataclass(frozen=True)
class SimilarityConfig:
    threshold: float = DEFAULT_THRESHOLD
    node_weight: float = 0.5
    edge_weight: float = 0.5
    path_metric: str = "edit"  # "edit" | "jaccard"

    def __post_init__(self):
        if not 0.0 <= self.threshold <= 1.0:
            raise ValueError("threshold must lie in [0, 1]")
        if abs(self.node_weight + self.edge_weight - 1.0) > 1e-9:
            raise ValueError("node_weight + edge_weight must equal 1")
        if self.path_metric not in ("edit", "jaccard"):
            raise ValueError("path_metric must be 'edit' or 'jaccard'")


@dataclass(frozen=True)
class GateDecision:
    score: float
    skipped_llm: bool


def jaccard(a, b) -> float:
    a, b = set(a), set(b)
    if not a and not b:
        return 1.0
    return len(a & b) / len(a | b)


def cfg_similarity(src: AbstractGraph, tgt: AbstractGraph,
                   config: SimilarityConfig = SimilarityConfig()) -> float:
    node_sim = jaccard(src.node_types, tgt.node_types)
    edge_sim = jaccard(src.edge_triples, tgt.edge_triples)
    return config.node_weight * node_sim + config.edge_weight * edge_sim


def kind_sequence(path_ids, cfg: Cfg) -> tuple[str, ...]:
    return tuple(cfg.node(i).kind.value for i in path_ids)


def levenshtein(a, b) -> int:
    if len(a) < len(b):
        a, b = b, a
    previous = list(range(len(b) + 1))
    for i, x in enumerate(a, start=1):
        current = [i]
        for j, y in enumerate(b, start=1):
            cost = 0 if x == y else 1
            current.append(min(previous[j] + 1, current[j - 1] + 1, previous[j - 1] + cost))
        previous = current
    return previous[-1]


def path_similarity(p, q, metric: str = "edit") -> float:
    """Similarity of two token sequences (node-kind sequences)."""
    p, q = tuple(p), tuple(q)
    if not p and not q:
        return 1.0
    if metric == "jaccard":
        return jaccard(p, q)
    return 1.0 - levenshtein(p, q) / max(len(p), len(q))


def path_set_similarity_sequences(src_paths, tgt_paths, metric: str = "edit") -> float:
    """Best-match average over two collections of token sequences, symmetric
    by construction: (directional(src→tgt) + directional(tgt→src)) / 2."""
    src_paths = [tuple(p) for p in src_paths]
    tgt_paths = [tuple(p) for p in tgt_paths]
    if not src_paths and not tgt_paths:
        return 1.0
    if not src_paths or not tgt_paths:
        return 0.0
    return (
        _directional(src_paths, tgt_paths, metric)
        + _directional(tgt_paths, src_paths, metric)
    ) / 2.0


def _directional(from_paths, to_paths, metric) -> float:
    total = 0.0
    for p in from_paths:
        best = 0.0
        for q in to_paths:
            best = max(best, path_similarity(p, q, metric))
        total += best
    return total / len(from_paths)


def path_set_similarity(src: DataFlowSummary, src_cfg: Cfg,
                        tgt: DataFlowSummary, tgt_cfg: Cfg,
                        config: SimilarityConfig = SimilarityConfig()) -> float:
    src_seqs = [
        kind_sequence(p.node_ids, src_cfg)
        for paths in src.paths.values()
        for p in paths
    ]
    tgt_seqs = [
        kind_sequence(p.node_ids, tgt_cfg)
        for paths in tgt.paths.values()
        for p in paths
    ]
    return path_set_similarity_sequences(src_seqs, tgt_seqs, config.path_metric)


def gate(score: float, config: SimilarityConfig = SimilarityConfig()) -> GateDecision:
    if not 0.0 <= score <= 1.0:
        raise ValueError("score must lie in [0, 1]")
    return GateDecision(score=score, skipped_llm=score >= config.threshold)
