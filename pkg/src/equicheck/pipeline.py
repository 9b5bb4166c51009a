"""End-to-end orchestration: one translation pair at a time (parse, graphs,
semantic analyzers, test generation/repair agent, final verdict, report), a
batch runner over a manifest, and replay of recorded runs.

Run directory layout, per pair:
``runs/<run-id>/manifest.json`` and ``runs/<run-id>/<pair-id>/{report.json,
llm/, agent/transcript.txt, agent/stage.json, tests/}``.
"""

from __future__ import annotations

import json
import shutil
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

from .agent import (
    AgentConfig,
    AgentReport,
    build_agent_prompt,
    prepare_workspace,
    run_agent,
    run_generated_tests,
    validate_patch,
)
from .analyzers import AnalyzerSettings, SemanticReport, run_semantic_analyzer
from .cfg import build_cfg
from .dfg import extract_def_use
from .errors import (
    AgentCrash,
    AgentTimeout,
    ConfigError,
    EquicheckError,
    IncompleteLog,
    MalformedAgentOutput,
    MissingToolchain,
    PatchApplyError,
)
from .gateway import Gateway, HttpBackend, MockBackend, ReplayBackend, RunLog
from .languages import (
    FunctionFragment,
    TranslationPair,
    get_adapter,
    language_from_name,
)
from .similarity import SimilarityConfig
from .verdict import VF, FinalVerdict, assemble_report, config_hash, run_verdict_agent

SCHEMA_VERSION = 1

_MOCK_DEFAULT = json.dumps(
    {
        "is_equivalent": "yes",
        "explanation": "scripted default response",
        "summary": "scripted default response",
    }
)

_MOCK_INSUFFICIENT = json.dumps(
    {
        "is_equivalent": "unknown",
        "summary": "agent stage did not complete; evidence insufficient",
    }
)

_MOCK_NOT_EQUIVALENT = json.dumps(
    {
        "is_equivalent": "no",
        "explanation": "a stage reported inequivalence",
        "summary": "test execution demonstrated inequivalent behavior",
    }
)

# The built-in mock answers "yes" everywhere except: adjudication over a
# failed agent stage (declined, so process failures surface as VF) and
# adjudication over an embedded "no" finding (confirmed, so agent evidence
# surfaces as NEQ). The quoted-key needle only occurs in serialized reports,
# never in analyzer prompt templates.
_MOCK_RULES = [
    ("agent_status: timeout", _MOCK_INSUFFICIENT),
    ("agent_status: crash", _MOCK_INSUFFICIENT),
    ("agent_status: malformed", _MOCK_INSUFFICIENT),
    ('"is_equivalent": "no"', _MOCK_NOT_EQUIVALENT),
]


@dataclass
class RunConfig:
    model_id: str = "mock-model"
    backend: str = "mock"  # mock | remote | replay
    similarity: SimilarityConfig = field(default_factory=SimilarityConfig)
    cfg_threshold: Optional[float] = None
    df_threshold: Optional[float] = None
    timeout_s: float = 1000.0
    test_timeout_s: float = 60.0
    agent_cmd: list[str] = field(default_factory=list)
    no_semantic_analysis: bool = False
    standalone_agent: bool = False
    same_language_override: bool = False
    parallelism: int = 1
    token_ceiling: Optional[int] = None

    def __post_init__(self):
        if self.timeout_s <= 0:
            raise ConfigError("timeout_s must be positive")
        if self.parallelism < 1:
            raise ConfigError("parallelism must be at least 1")
        if self.no_semantic_analysis and self.standalone_agent:
            raise ConfigError(
                "--no-semantic-analysis and --standalone-agent are mutually exclusive"
            )
        if self.backend not in ("mock", "remote", "replay"):
            raise ConfigError(f"unknown backend kind {self.backend!r}")

    def to_dict(self) -> dict:
        # everything that shapes the report; backend kind stays out so a
        # replay (backend=replay) hashes identically to the recorded run
        return {
            "schema_version": SCHEMA_VERSION,
            "model_id": self.model_id,
            "similarity": {
                "threshold": self.similarity.threshold,
                "node_weight": self.similarity.node_weight,
                "edge_weight": self.similarity.edge_weight,
                "path_metric": self.similarity.path_metric,
            },
            "cfg_threshold": self.cfg_threshold,
            "df_threshold": self.df_threshold,
            "timeout_s": self.timeout_s,
            "test_timeout_s": self.test_timeout_s,
            "agent_cmd": list(self.agent_cmd),
            "no_semantic_analysis": self.no_semantic_analysis,
            "standalone_agent": self.standalone_agent,
            "same_language_override": self.same_language_override,
        }

    @classmethod
    def from_dict(cls, data: dict, backend: str = "mock",
                  parallelism: int = 1) -> "RunConfig":
        sim = data.get("similarity", {})
        return cls(
            model_id=data.get("model_id", "mock-model"),
            backend=backend,
            similarity=SimilarityConfig(
                threshold=sim.get("threshold", 0.7),
                node_weight=sim.get("node_weight", 0.5),
                edge_weight=sim.get("edge_weight", 0.5),
                path_metric=sim.get("path_metric", "edit"),
            ),
            cfg_threshold=data.get("cfg_threshold"),
            df_threshold=data.get("df_threshold"),
            timeout_s=data.get("timeout_s", 1000.0),
            test_timeout_s=data.get("test_timeout_s", 60.0),
            agent_cmd=list(data.get("agent_cmd", [])),
            no_semantic_analysis=data.get("no_semantic_analysis", False),
            standalone_agent=data.get("standalone_agent", False),
            same_language_override=data.get("same_language_override", False),
            parallelism=parallelism,
        )


@dataclass(frozen=True)
class PairEntry:
    pair_id: str
    source_project: str
    target_project: str
    source_language: str
    target_language: str
    source_locator: dict
    target_locator: dict
    # optional per-pair override of the batch-wide agent command
    agent_cmd: Optional[tuple[str, ...]] = None

    def to_dict(self) -> dict:
        return {
            "pair_id": self.pair_id,
            "source_project": self.source_project,
            "target_project": self.target_project,
            "source_language": self.source_language,
            "target_language": self.target_language,
            "source_locator": dict(self.source_locator),
            "target_locator": dict(self.target_locator),
            "agent_cmd": list(self.agent_cmd) if self.agent_cmd else None,
        }


@dataclass
class PairManifest:
    entries: list[PairEntry]

    def __post_init__(self):
        ids = [e.pair_id for e in self.entries]
        if len(ids) != len(set(ids)):
            raise ConfigError("manifest pair ids must be unique")

    @classmethod
    def from_dict(cls, data: dict) -> "PairManifest":
        entries = []
        for raw in data.get("pairs", []):
            try:
                entries.append(
                    PairEntry(
                        pair_id=raw["pair_id"],
                        source_project=raw["source_project"],
                        target_project=raw["target_project"],
                        source_language=raw["source_language"],
                        target_language=raw["target_language"],
                        source_locator=raw["source_locator"],
                        target_locator=raw["target_locator"],
                        agent_cmd=tuple(raw["agent_cmd"]) if raw.get("agent_cmd") else None,
                    )
                )
            except KeyError as exc:
                raise ConfigError(f"manifest entry missing key: {exc}")
        return cls(entries)

    @classmethod
    def from_file(cls, path: Path) -> "PairManifest":
        return cls.from_dict(json.loads(Path(path).read_text()))

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "pairs": [e.to_dict() for e in self.entries],
        }


@dataclass
class BatchSummary:
    counts: dict[str, int]
    decisions: dict[str, str]
    telemetry: dict

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "counts": self.counts,
            "decisions": self.decisions,
            "telemetry": self.telemetry,
        }


def resolve_fragment(project_root: str, locator: dict,
                     language_name: str) -> FunctionFragment:
    lang = language_from_name(language_name)
    adapter = get_adapter(lang)
    file_rel = locator["file"]
    path = Path(project_root) / file_rel
    text = path.read_text()
    if "name" in locator:
        span = adapter.find_function(text, locator["name"])
        if span is None:
            raise ConfigError(
                f"function {locator['name']!r} not found in {path}"
            )
        start, end = span
    else:
        start, end = int(locator["start_line"]), int(locator["end_line"])
    lines = text.splitlines()
    if not (1 <= start <= end <= len(lines)):
        raise ConfigError(f"line span {start}-{end} out of range for {path}")
    fragment_text = "\n".join(lines[start - 1 : end])
    return FunctionFragment(
        language=lang,
        source_text=fragment_text,
        file_path=str(file_rel),
        span=(start, end),
    )


def make_backend(config: RunConfig, llm_dir: Optional[Path] = None):
    if config.backend == "mock":
        return MockBackend(rules=_MOCK_RULES, default=_MOCK_DEFAULT)
    if config.backend == "remote":
        return HttpBackend()
    if config.backend == "replay":
        if llm_dir is None:
            raise ConfigError("replay backend needs a recorded llm directory")
        return ReplayBackend(llm_dir)
    raise ConfigError(f"unknown backend kind {config.backend!r}")


def _agent_stage(pair: TranslationPair, entry: PairEntry, config: RunConfig,
                 semantic_report: Optional[SemanticReport],
                 pair_dir: Path, run_log: RunLog) -> tuple[Optional[AgentReport], str, Optional[dict], Optional[bool]]:
    """Run the external agent. Returns (report, status, test_results,
    patch_validated). Failures degrade to a status string; the verdict
    stage decides what they mean."""
    agent_cmd = list(entry.agent_cmd) if entry.agent_cmd else config.agent_cmd
    if not agent_cmd:
        run_log.event("agent: skipped (no agent_cmd configured)")
        return None, "skipped", None, None
    agent_config = AgentConfig(
        agent_cmd=agent_cmd,
        timeout_s=config.timeout_s,
        test_timeout_s=config.test_timeout_s,
    )
    try:
        workspace = prepare_workspace(
            Path(entry.source_project),
            Path(entry.target_project),
            agent_config,
            pair_dir / "workspace",
            required_languages=(pair.source.language, pair.target.language),
        )
    except MissingToolchain as exc:
        run_log.event(f"agent: skipped ({exc})")
        return None, "skipped", None, None
    prompt = build_agent_prompt(
        pair,
        semantic_report,
        no_semantic_analysis=config.no_semantic_analysis or config.standalone_agent,
    )
    try:
        report = run_agent(prompt, workspace, agent_config)
    except AgentTimeout as exc:
        run_log.event(f"agent: timeout ({exc})")
        return None, "timeout", None, None
    except AgentCrash as exc:
        run_log.event(f"agent: crash ({exc})")
        return None, "crash", None, None
    except MalformedAgentOutput as exc:
        run_log.event(f"agent: malformed output ({exc})")
        return None, "malformed", None, None

    test_results = run_generated_tests(workspace, report.tests,
                                       config.test_timeout_s)
    patch_validated: Optional[bool] = None
    if report.patch and report.is_equivalent == "no":
        failing = [t for t in report.tests
                   if test_results.get(t["path"], "").startswith("fail")]
        try:
            patch_validated = validate_patch(workspace, report.patch, failing,
                                             config.test_timeout_s)
        except (PatchApplyError, EquicheckError) as exc:
            run_log.event(f"patch validation failed: {exc}")
            patch_validated = False

    _persist_agent_artifacts(workspace.root, pair_dir, report)
    return report, "completed", test_results, patch_validated


def _persist_agent_artifacts(workspace_root: Path, pair_dir: Path,
                             report: AgentReport) -> None:
    agent_dir = pair_dir / "agent"
    agent_dir.mkdir(parents=True, exist_ok=True)
    transcript_src = workspace_root / "agent" / "transcript.txt"
    if transcript_src.exists() and transcript_src != agent_dir / "transcript.txt":
        shutil.copy2(transcript_src, agent_dir / "transcript.txt")
    tests_dir = pair_dir / "tests"
    for entry in report.tests:
        src = workspace_root / entry["path"]
        if src.exists():
            side = "source" if entry is report.tests[0] else "target"
            dst = tests_dir / side / Path(entry["path"]).name
            dst.parent.mkdir(parents=True, exist_ok=True)
            shutil.copy2(src, dst)


def validate_pair(entry: PairEntry, config: RunConfig, run_dir: Path,
                  backend=None,
                  recorded_agent: Optional[dict] = None) -> dict:
    pair_dir = Path(run_dir) / entry.pair_id
    pair_dir.mkdir(parents=True, exist_ok=True)
    run_log = RunLog(pair_dir)
    if backend is None:
        backend = make_backend(config, llm_dir=pair_dir / "llm")
    gateway = Gateway(backend, run_log=run_log if config.backend != "replay" else None,
                      token_ceiling=config.token_ceiling)

    warnings: list[str] = []
    source = resolve_fragment(entry.source_project, entry.source_locator,
                              entry.source_language)
    target = resolve_fragment(entry.target_project, entry.target_locator,
                              entry.target_language)
    pair = TranslationPair(source=source, target=target,
                           same_language_override=config.same_language_override)

    src_cfg = tgt_cfg = src_df = tgt_df = None
    try:
        src_cfg = build_cfg(source)
        src_df = extract_def_use(source, src_cfg)
    except EquicheckError as exc:
        warnings.append(f"source graphs unavailable: {exc}")
    try:
        tgt_cfg = build_cfg(target)
        tgt_df = extract_def_use(target, tgt_cfg)
    except EquicheckError as exc:
        warnings.append(f"target graphs unavailable: {exc}")

    semantic_report: Optional[SemanticReport] = None
    if not config.standalone_agent:
        settings = AnalyzerSettings(
            model_id=config.model_id,
            similarity=config.similarity,
            cfg_threshold=config.cfg_threshold,
            df_threshold=config.df_threshold,
            gates_enabled=not config.no_semantic_analysis,
        )
        semantic_report = run_semantic_analyzer(
            pair, gateway, settings,
            src_cfg=src_cfg, tgt_cfg=tgt_cfg, src_df=src_df, tgt_df=tgt_df,
        )

    if recorded_agent is not None:
        agent_status = recorded_agent["status"]
        raw = recorded_agent.get("report")
        agent_report = AgentReport.from_dict(raw) if raw else None
        test_results = recorded_agent.get("test_results")
        patch_validated = recorded_agent.get("patch_validated")
    else:
        agent_report, agent_status, test_results, patch_validated = _agent_stage(
            pair, entry, config, semantic_report, pair_dir, run_log
        )
        stage = {
            "status": agent_status,
            "report": agent_report.to_dict() if agent_report else None,
            "test_results": test_results,
            "patch_validated": patch_validated,
        }
        agent_dir = pair_dir / "agent"
        agent_dir.mkdir(parents=True, exist_ok=True)
        (agent_dir / "stage.json").write_text(
            json.dumps(stage, indent=2, sort_keys=True) + "\n"
        )

    final = run_verdict_agent(semantic_report, agent_report, agent_status,
                              gateway, model_id=config.model_id)
    final.patch_validated = patch_validated

    report = assemble_report(
        pair_id=entry.pair_id,
        source_language=entry.source_language,
        target_language=entry.target_language,
        semantic_report=semantic_report,
        agent_report=agent_report,
        agent_status=agent_status,
        final=final,
        config=config.to_dict(),
        test_results=test_results,
        warnings=warnings,
    )
    (pair_dir / "report.json").write_text(
        json.dumps(report, indent=2, sort_keys=True) + "\n"
    )
    return report


def _vf_row(entry: PairEntry, config: RunConfig, run_dir: Path,
            reason: str) -> dict:
    final = FinalVerdict(verdict=VF, summary=f"pipeline failure: {reason}",
                         source="fallback")
    report = assemble_report(
        pair_id=entry.pair_id,
        source_language=entry.source_language,
        target_language=entry.target_language,
        semantic_report=None,
        agent_report=None,
        agent_status="error",
        final=final,
        config=config.to_dict(),
        warnings=[reason],
    )
    pair_dir = Path(run_dir) / entry.pair_id
    pair_dir.mkdir(parents=True, exist_ok=True)
    (pair_dir / "report.json").write_text(
        json.dumps(report, indent=2, sort_keys=True) + "\n"
    )
    return report


def run_batch(manifest: PairManifest, config: RunConfig,
              run_dir: Path, backend=None) -> BatchSummary:
    run_dir = Path(run_dir)
    run_dir.mkdir(parents=True, exist_ok=True)
    (run_dir / "manifest.json").write_text(
        json.dumps(manifest.to_dict(), indent=2, sort_keys=True) + "\n"
    )

    def run_one(entry: PairEntry) -> dict:
        try:
            return validate_pair(entry, config, run_dir, backend=backend)
        except EquicheckError as exc:
            return _vf_row(entry, config, run_dir, str(exc))
        except OSError as exc:
            return _vf_row(entry, config, run_dir, str(exc))

    if config.parallelism > 1 and len(manifest.entries) > 1:
        with ThreadPoolExecutor(max_workers=config.parallelism) as pool:
            reports = list(pool.map(run_one, manifest.entries))
    else:
        reports = [run_one(e) for e in manifest.entries]

    counts = {"EQ": 0, "NEQ": 0, "VF": 0}
    decisions: dict[str, str] = {}
    tokens_in = tokens_out = calls = 0
    for report in reports:
        decision = report["verdict"]["verdict"]
        counts[decision] += 1
        decisions[report["pair_id"]] = decision
        for section in report.get("semantic_analysis") or {}:
            usage = report["semantic_analysis"][section]["usage"]
            tokens_in += usage["input_tokens"]
            tokens_out += usage["output_tokens"]
            calls += usage["calls"]
        usage = report["verdict"]["usage"]
        tokens_in += usage["input_tokens"]
        tokens_out += usage["output_tokens"]
        calls += usage["calls"]
    summary = BatchSummary(
        counts=counts,
        decisions=decisions,
        telemetry={
            "gateway_calls": calls,
            "input_tokens": tokens_in,
            "output_tokens": tokens_out,
        },
    )
    (run_dir / "summary.json").write_text(
        json.dumps(summary.to_dict(), indent=2, sort_keys=True) + "\n"
    )
    return summary


def replay_pair(pair_dir: Path, entry: PairEntry) -> dict:
    pair_dir = Path(pair_dir)
    report_path = pair_dir / "report.json"
    if not report_path.exists():
        raise IncompleteLog(f"no recorded report at {report_path}")
    stored = json.loads(report_path.read_text())
    if config_hash(stored["config"]) != stored["config_hash"]:
        raise ConfigError(
            f"config hash mismatch in {report_path}: log was edited"
        )
    stage_path = pair_dir / "agent" / "stage.json"
    recorded_agent = (
        json.loads(stage_path.read_text())
        if stage_path.exists()
        else {"status": "skipped", "report": None,
              "test_results": None, "patch_validated": None}
    )
    config = RunConfig.from_dict(stored["config"], backend="replay")
    backend = ReplayBackend(pair_dir / "llm")
    replay_dir = pair_dir / "replay"
    replayed = validate_pair(
        replace(entry, pair_id=entry.pair_id),
        config,
        replay_dir,
        backend=backend,
        recorded_agent=recorded_agent,
    )
    original_bytes = report_path.read_bytes()
    replayed_bytes = (replay_dir / entry.pair_id / "report.json").read_bytes()
    if original_bytes != replayed_bytes:
        raise IncompleteLog(
            f"replay of {entry.pair_id} diverged from the recorded report"
        )
    return replayed


def replay_run(run_dir: Path) -> dict[str, dict]:
    run_dir = Path(run_dir)
    manifest_path = run_dir / "manifest.json"
    if not manifest_path.exists():
        raise IncompleteLog(f"no manifest.json in {run_dir}")
    manifest = PairManifest.from_dict(json.loads(manifest_path.read_text()))
    results: dict[str, dict] = {}
    for entry in manifest.entries:
        results[entry.pair_id] = replay_pair(run_dir / entry.pair_id, entry)
    return results
