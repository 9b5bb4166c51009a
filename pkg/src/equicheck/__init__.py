"""Cross-language translation validation: symbolic graph gates, semantic
analyzers, a test generation/repair agent stage, and a final verdict."""

from .analyzers import (
    ANALYZER_ORDER,
    AnalyzerSettings,
    AnalyzerVerdict,
    SemanticReport,
    run_semantic_analyzer,
)
from .cfg import Cfg, EdgeKind, NodeKind, abstract_graph, build_cfg, render_cfg_text
from .dfg import DataFlowSummary, extract_def_use, render_paths_text
from .errors import EquicheckError
from .gateway import (
    ChatRequest,
    ChatResponse,
    Gateway,
    HttpBackend,
    MockBackend,
    ReplayBackend,
    RunLog,
    Usage,
)
from .languages import (
    FunctionFragment,
    LanguageId,
    TranslationPair,
    get_adapter,
    parse_fragment,
    supported_languages,
)
from .pipeline import (
    BatchSummary,
    PairEntry,
    PairManifest,
    RunConfig,
    replay_run,
    run_batch,
    validate_pair,
)
from .similarity import (
    SimilarityConfig,
    cfg_similarity,
    gate,
    jaccard,
    path_set_similarity,
    path_similarity,
)
from .verdict import EQ, NEQ, VF, FinalVerdict, assemble_report, run_verdict_agent

__version__ = "0.1.0"

__all__ = [
    "ANALYZER_ORDER",
    "AnalyzerSettings",
    "AnalyzerVerdict",
    "BatchSummary",
    "Cfg",
    "ChatRequest",
    "ChatResponse",
    "DataFlowSummary",
    "EQ",
    "EdgeKind",
    "EquicheckError",
    "FinalVerdict",
    "FunctionFragment",
    "Gateway",
    "HttpBackend",
    "LanguageId",
    "MockBackend",
    "NEQ",
    "NodeKind",
    "PairEntry",
    "PairManifest",
    "ReplayBackend",
    "RunConfig",
    "RunLog",
    "SemanticReport",
    "SimilarityConfig",
    "TranslationPair",
    "Usage",
    "VF",
    "abstract_graph",
    "assemble_report",
    "build_cfg",
    "cfg_similarity",
    "extract_def_use",
    "gate",
    "get_adapter",
    "jaccard",
    "parse_fragment",
    "path_set_similarity",
    "path_similarity",
    "render_cfg_text",
    "render_paths_text",
    "replay_run",
    "run_batch",
    "run_semantic_analyzer",
    "run_verdict_agent",
    "supported_languages",
    "validate_pair",
]
