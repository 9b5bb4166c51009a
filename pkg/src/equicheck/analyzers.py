"""The six semantic sub-analyzers and their fan-out orchestrator.

The control-flow and data-flow analyzers are gated by symbolic similarity
scores and skip the model entirely when the gate fires; the exception
analyzer short-circuits when neither fragment contains error-handling
constructs. The other analyzers are prompt-only.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

from .cfg import Cfg, abstract_graph, render_cfg_text
from .dfg import DataFlowSummary, render_paths_text
from .errors import AnalyzerUnavailable, EquicheckError
from .gateway import ChatRequest, Gateway, Usage
from .languages import TranslationPair, get_adapter
from .prompts import analyzer_prompt
from .similarity import SimilarityConfig, cfg_similarity, gate, path_set_similarity

ANALYZER_ORDER = ("control_flow", "data_flow", "io", "lib_api", "exception", "spec")

GATED_VERDICT = {"is_equivalent": "yes"}


@dataclass
class AnalyzerVerdict:
    analyzer: str
    is_equivalent: str  # "yes" | "no" | "unavailable"
    explanation: str = ""
    counterexample: Optional[str] = None
    suggestions: Optional[str] = None
    skipped_by_gate: bool = False
    gate_score: Optional[float] = None
    usage: Usage = field(default_factory=Usage)

    def to_dict(self) -> dict:
        return {
            "analyzer": self.analyzer,
            "is_equivalent": self.is_equivalent,
            "explanation": self.explanation,
            "counterexample": self.counterexample,
            "suggestions": self.suggestions,
            "skipped_by_gate": self.skipped_by_gate,
            "gate_score": self.gate_score,
            "usage": self.usage.to_dict(),
        }


@dataclass
class SemanticReport:
    verdicts: dict[str, AnalyzerVerdict]

    def __post_init__(self):
        missing = [a for a in ANALYZER_ORDER if a not in self.verdicts]
        if missing:
            raise ValueError(f"semantic report missing analyzers: {missing}")

    def to_dict(self) -> dict:
        return {a: self.verdicts[a].to_dict() for a in ANALYZER_ORDER}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


@dataclass
class AnalyzerSettings:
    model_id: str = "mock-model"
    similarity: SimilarityConfig = field(default_factory=SimilarityConfig)
    cfg_threshold: Optional[float] = None
    df_threshold: Optional[float] = None
    max_output_tokens: int = 4096
    gates_enabled: bool = True

    def cfg_gate_config(self) -> SimilarityConfig:
        if self.cfg_threshold is None:
            return self.similarity
        return SimilarityConfig(
            threshold=self.cfg_threshold,
            node_weight=self.similarity.node_weight,
            edge_weight=self.similarity.edge_weight,
            path_metric=self.similarity.path_metric,
        )

    def df_gate_config(self) -> SimilarityConfig:
        if self.df_threshold is None:
            return self.similarity
        return SimilarityConfig(
            threshold=self.df_threshold,
            node_weight=self.similarity.node_weight,
            edge_weight=self.similarity.edge_weight,
            path_metric=self.similarity.path_metric,
        )


def _fragments(pair: TranslationPair) -> dict:
    return {
        "src_lang": str(pair.source.language),
        "src_code": pair.source.source_text,
        "tgt_lang": str(pair.target.language),
        "tgt_code": pair.target.source_text,
    }


def _ask(analyzer: str, pair: TranslationPair, gateway: Gateway,
         settings: AnalyzerSettings, structures: str = "",
         required_keys=("is_equivalent",), usage: Optional[Usage] = None,
         gate_score: Optional[float] = None) -> AnalyzerVerdict:
    usage = usage or Usage()
    prompt = analyzer_prompt(analyzer, structures=structures, **_fragments(pair))
    req = ChatRequest(
        model_id=settings.model_id,
        user_text=prompt,
        max_output_tokens=settings.max_output_tokens,
    )
    try:
        obj = gateway.complete_json(req, list(required_keys), usage)
    except EquicheckError as exc:
        raise AnalyzerUnavailable(f"{analyzer}: {exc}")
    return AnalyzerVerdict(
        analyzer=analyzer,
        is_equivalent=str(obj.get("is_equivalent", "")).lower(),
        explanation=str(obj.get("explanation", "")),
        counterexample=_opt(obj.get("counterexample")),
        suggestions=_opt(obj.get("suggestions")),
        gate_score=gate_score,
        usage=usage,
    )


def _opt(value) -> Optional[str]:
    if value is None or value == "":
        return None
    return str(value)


def _gated(analyzer: str, score: float) -> AnalyzerVerdict:
    return AnalyzerVerdict(
        analyzer=analyzer,
        is_equivalent=GATED_VERDICT["is_equivalent"],
        explanation="structural similarity above threshold; model skipped",
        skipped_by_gate=True,
        gate_score=score,
    )


def analyze_control_flow(pair: TranslationPair, src_cfg: Optional[Cfg],
                         tgt_cfg: Optional[Cfg], gateway: Gateway,
                         settings: AnalyzerSettings) -> AnalyzerVerdict:
    if src_cfg is None or tgt_cfg is None:
        verdict = _ask(
            "control_flow", pair, gateway, settings,
            structures="(control-flow graphs unavailable: fragment failed to parse)",
        )
        return verdict
    config = settings.cfg_gate_config()
    score = cfg_similarity(abstract_graph(src_cfg), abstract_graph(tgt_cfg), config)
    if settings.gates_enabled and gate(score, config).skipped_llm:
        return _gated("control_flow", score)
    structures = (
        "Source control-flow graph:\n" + render_cfg_text(src_cfg)
        + "\nTarget control-flow graph:\n" + render_cfg_text(tgt_cfg)
    )
    return _ask("control_flow", pair, gateway, settings,
                structures=structures, gate_score=score)


def analyze_data_flow(pair: TranslationPair, src_df: Optional[DataFlowSummary],
                      src_cfg: Optional[Cfg], tgt_df: Optional[DataFlowSummary],
                      tgt_cfg: Optional[Cfg], gateway: Gateway,
                      settings: AnalyzerSettings) -> AnalyzerVerdict:
    if src_df is None or tgt_df is None or src_cfg is None or tgt_cfg is None:
        return _ask(
            "data_flow", pair, gateway, settings,
            structures="(data-flow paths unavailable: fragment failed to parse)",
        )
    config = settings.df_gate_config()
    score = path_set_similarity(src_df, src_cfg, tgt_df, tgt_cfg, config)
    if settings.gates_enabled and gate(score, config).skipped_llm:
        return _gated("data_flow", score)
    structures = (
        "Source data-flow paths:\n" + render_paths_text(src_df)
        + "\nTarget data-flow paths:\n" + render_paths_text(tgt_df)
    )
    return _ask("data_flow", pair, gateway, settings,
                structures=structures, gate_score=score)


def analyze_io(pair: TranslationPair, gateway: Gateway,
               settings: AnalyzerSettings) -> AnalyzerVerdict:
    usage = Usage()
    verdict = _ask("io", pair, gateway, settings, usage=usage)
    if verdict.is_equivalent == "no" and not verdict.counterexample:
        # "no" without a witness input is unusable; ask once more
        retry = _ask(
            "io", pair, gateway, settings,
            structures=(
                "Your verdict must include a concrete counterexample input "
                "that triggers dissimilar IO behavior."
            ),
            required_keys=("is_equivalent", "counterexample"),
            usage=usage,
        )
        if retry.is_equivalent == "no" and not retry.counterexample:
            raise AnalyzerUnavailable(
                "io: inequivalence claimed without a counterexample input"
            )
        retry.usage = usage
        return retry
    return verdict


def analyze_library(pair: TranslationPair, gateway: Gateway,
                    settings: AnalyzerSettings) -> AnalyzerVerdict:
    return _ask("lib_api", pair, gateway, settings)


def has_error_handling(pair: TranslationPair) -> bool:
    for fragment in (pair.source, pair.target):
        markers = get_adapter(fragment.language).error_handling_markers
        if any(m in fragment.source_text for m in markers):
            return True
    return False


def analyze_exceptions(pair: TranslationPair, gateway: Gateway,
                       settings: AnalyzerSettings) -> AnalyzerVerdict:
    if settings.gates_enabled and not has_error_handling(pair):
        return AnalyzerVerdict(
            analyzer="exception",
            is_equivalent="yes",
            explanation=(
                "neither fragment implements explicit error handling; "
                "deemed equivalent for this dimension"
            ),
            skipped_by_gate=True,
        )
    return _ask("exception", pair, gateway, settings)


def analyze_spec(pair: TranslationPair, gateway: Gateway,
                 settings: AnalyzerSettings) -> AnalyzerVerdict:
    return _ask("spec", pair, gateway, settings)


def _unavailable(analyzer: str, reason: str) -> AnalyzerVerdict:
    return AnalyzerVerdict(
        analyzer=analyzer,
        is_equivalent="unavailable",
        explanation=f"analysis unavailable: {reason}",
    )


def run_semantic_analyzer(pair: TranslationPair, gateway: Gateway,
                          settings: AnalyzerSettings,
                          src_cfg: Optional[Cfg] = None,
                          tgt_cfg: Optional[Cfg] = None,
                          src_df: Optional[DataFlowSummary] = None,
                          tgt_df: Optional[DataFlowSummary] = None,
                          parallel: bool = True) -> SemanticReport:
    tasks = {
        "control_flow": lambda: analyze_control_flow(
            pair, src_cfg, tgt_cfg, gateway, settings
        ),
        "data_flow": lambda: analyze_data_flow(
            pair, src_df, src_cfg, tgt_df, tgt_cfg, gateway, settings
        ),
        "io": lambda: analyze_io(pair, gateway, settings),
        "lib_api": lambda: analyze_library(pair, gateway, settings),
        "exception": lambda: analyze_exceptions(pair, gateway, settings),
        "spec": lambda: analyze_spec(pair, gateway, settings),
    }

    def run_one(name):
        try:
            return tasks[name]()
        except EquicheckError as exc:
            return _unavailable(name, str(exc))

    if parallel:
        with ThreadPoolExecutor(max_workers=len(ANALYZER_ORDER)) as pool:
            futures = {name: pool.submit(run_one, name) for name in ANALYZER_ORDER}
            verdicts = {name: futures[name].result() for name in ANALYZER_ORDER}
    else:
        verdicts = {name: run_one(name) for name in ANALYZER_ORDER}
    return SemanticReport(verdicts)
