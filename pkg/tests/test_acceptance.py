"""Acceptance suite: one test per criterion, each ending with an explicit
pass line so the run log reads as a checklist."""

import dataclasses
import json
import random
import time
from contextlib import contextmanager

import pytest

from equicheck import build_cfg, extract_def_use, render_cfg_text, render_paths_text
from equicheck.agent import AgentConfig, build_agent_prompt, prepare_workspace, validate_patch
from equicheck.analyzers import AnalyzerSettings, run_semantic_analyzer
from equicheck.cfg import AbstractGraph, EdgeKind, NodeKind
from equicheck.errors import PatchApplyError
from equicheck.languages import LanguageId
from equicheck.pipeline import PairEntry, PairManifest, RunConfig, replay_run, run_batch, validate_pair
from equicheck.prompts import FUNCTIONAL_EQUIVALENCE_DEFINITION
from equicheck.similarity import cfg_similarity, gate, path_set_similarity_sequences

from conftest import (
    FAILING_TEST_JS,
    GOLDEN_DIR,
    bug_entry,
    fragment,
    oracle_patch,
    stub_cmd,
    write_eq_response,
    write_neq_response,
    yes_gateway,
)
from test_cfg import SOURCES as CFG_SOURCES
from test_cfg import _oracle_for
from test_similarity import oracle_jaccard, oracle_path_set_similarity

TOL = 1e-12


@contextmanager
def criterion(n, description):
    yield
    print(f"\nACCEPTANCE {n}: PASS - {description}")


def with_agent(entry: PairEntry, cmd: list[str]) -> PairEntry:
    return dataclasses.replace(entry, agent_cmd=tuple(cmd))


def test_criterion_01_figure_reproduction(max_py):
    with criterion(1, "max(a,b) CFG and def-use paths reproduce the reference"):
        started = time.monotonic()
        cfg = build_cfg(max_py)
        summary = extract_def_use(max_py, cfg)
        kinds = sorted(n.kind.value for n in cfg.nodes)
        assert kinds == ["CONDITION", "ENTRY", "PARAMETERS", "RETURN", "RETURN"]
        labels = {e.label for e in cfg.edges if e.label}
        assert labels == {"a > b", "(a <= b)"}
        assert summary.to_dict() == {
            "a": [[0, 1, 2], [0, 1, 2, 3]],
            "b": [[0, 1, 2], [0, 1, 2, 4]],
        }

        def squeeze(text):
            return "".join(text.split())

        assert squeeze(render_cfg_text(cfg)) == squeeze(
            (GOLDEN_DIR / "cfg_max.txt").read_text()
        )
        assert squeeze(render_paths_text(summary)) == squeeze(
            (GOLDEN_DIR / "dfp_max.txt").read_text()
        )
        assert time.monotonic() - started < 1.0


def test_criterion_02_weighted_jaccard_conformance():
    with criterion(2, "cfg_similarity matches the brute-force weighted jaccard"):
        rng = random.Random(20240817)
        node_pool = list(NodeKind)
        edge_pool = [
            (a, k, b) for a in node_pool for k in EdgeKind for b in node_pool
        ]
        for _ in range(100):
            g1 = AbstractGraph(
                node_types=frozenset(
                    rng.sample(node_pool, rng.randint(0, len(node_pool)))
                ),
                edge_triples=frozenset(rng.sample(edge_pool, rng.randint(0, 20))),
            )
            g2 = AbstractGraph(
                node_types=frozenset(
                    rng.sample(node_pool, rng.randint(0, len(node_pool)))
                ),
                edge_triples=frozenset(rng.sample(edge_pool, rng.randint(0, 20))),
            )
            expected = 0.5 * oracle_jaccard(g1.node_types, g2.node_types) \
                + 0.5 * oracle_jaccard(g1.edge_triples, g2.edge_triples)
            assert abs(cfg_similarity(g1, g2) - expected) <= TOL


def test_criterion_03_best_match_path_similarity_conformance():
    with criterion(3, "path_set_similarity matches the enumeration oracle and is symmetric"):
        rng = random.Random(99)
        alphabet = [k.value for k in NodeKind][:6]
        for _ in range(500):
            src = [
                tuple(rng.choice(alphabet) for _ in range(rng.randint(0, 4)))
                for _ in range(rng.randint(0, 3))
            ]
            tgt = [
                tuple(rng.choice(alphabet) for _ in range(rng.randint(0, 4)))
                for _ in range(rng.randint(0, 3))
            ]
            got = path_set_similarity_sequences(src, tgt)
            want = oracle_path_set_similarity(src, tgt)
            assert abs(got - want) <= TOL
            assert abs(got - path_set_similarity_sequences(tgt, src)) <= TOL


def test_criterion_04_gate_semantics(max_pair):
    with criterion(4, "equivalent pairs gate both graph analyzers at zero token cost; 0.7 is inclusive"):
        src_cfg = build_cfg(max_pair.source)
        tgt_cfg = build_cfg(max_pair.target)
        src_df = extract_def_use(max_pair.source, src_cfg)
        tgt_df = extract_def_use(max_pair.target, tgt_cfg)
        report = run_semantic_analyzer(
            max_pair, yes_gateway(), AnalyzerSettings(),
            src_cfg=src_cfg, tgt_cfg=tgt_cfg, src_df=src_df, tgt_df=tgt_df,
            parallel=False,
        )
        data = report.to_dict()
        for name in ("control_flow", "data_flow"):
            assert data[name]["skipped_by_gate"] is True
            assert data[name]["gate_score"] == 1.0
            assert data[name]["usage"]["input_tokens"] == 0
            assert data[name]["usage"]["output_tokens"] == 0
        assert gate(0.7).skipped_llm is True
        assert gate(0.7 - 1e-9).skipped_llm is False


def test_criterion_05_end_to_end_determinism(bug_projects, tmp_path):
    with criterion(5, "6-pair batch yields EQ:3 NEQ:2 VF:1 and replays byte-identically"):
        started = time.monotonic()
        src, tgt = bug_projects
        eq_resp = write_eq_response(tmp_path / "eq.json")
        neq_resp = write_neq_response(tmp_path / "neq.json")
        entries = [
            with_agent(bug_entry(f"eq{i}", src, tgt), stub_cmd(eq_resp))
            for i in range(3)
        ]
        entries += [
            with_agent(bug_entry(f"neq{i}", src, tgt), stub_cmd(neq_resp))
            for i in range(2)
        ]
        entries.append(
            with_agent(
                bug_entry("slow", src, tgt), stub_cmd(eq_resp, "--sleep", "10")
            )
        )
        run_dir = tmp_path / "run"
        summary = run_batch(PairManifest(entries), RunConfig(timeout_s=2.0), run_dir)
        assert summary.counts == {"EQ": 3, "NEQ": 2, "VF": 1}
        # replay_pair raises unless the replayed report is byte-identical
        results = replay_run(run_dir)
        assert len(results) == 6
        replayed_counts = {"EQ": 0, "NEQ": 0, "VF": 0}
        for report in results.values():
            replayed_counts[report["verdict"]["verdict"]] += 1
        assert replayed_counts == summary.counts
        assert time.monotonic() - started < 30.0


def test_criterion_06_patch_validation_protocol(bug_projects, tmp_path):
    with criterion(6, "oracle patch validates; no-op fails; stale context errors; pre-check guards"):
        src, tgt = bug_projects
        ws = prepare_workspace(src, tgt, AgentConfig(), tmp_path / "ws")
        (ws.root / "t_fail.js").write_text(FAILING_TEST_JS)
        failing = [{"language": "javascript", "path": "t_fail.js"}]
        assert validate_patch(ws, oracle_patch(), failing) is True
        # validation must not leave the patch applied
        assert "a + b + 1" in (ws.target_project_copy / "calc.js").read_text()
        noop = (
            "--- a/calc.js\n+++ b/calc.js\n@@ -1,1 +1,1 @@\n"
            "-function add(a, b) {\n+function add(a, b) {\n"
        )
        assert validate_patch(ws, noop, failing) is False
        stale = (
            "--- a/calc.js\n+++ b/calc.js\n@@ -2,1 +2,1 @@\n"
            "-    return a * b;\n+    return a + b;\n"
        )
        with pytest.raises(PatchApplyError):
            validate_patch(ws, stale, failing)
        (ws.root / "t_pass.js").write_text("// trivially passes\n")
        passing = [{"language": "javascript", "path": "t_pass.js"}]
        assert validate_patch(ws, oracle_patch(), passing) is False
        assert validate_patch(ws, oracle_patch(), []) is False


def test_criterion_07_timeout_enforcement(bug_projects, tmp_path):
    with criterion(7, "2 s budget with a sleeping agent returns inside the grace window as VF"):
        src, tgt = bug_projects
        resp = write_eq_response(tmp_path / "resp.json")
        config = RunConfig(timeout_s=2.0, agent_cmd=stub_cmd(resp, "--sleep", "10"))
        started = time.monotonic()
        report = validate_pair(bug_entry("p", src, tgt), config, tmp_path / "run")
        assert time.monotonic() - started < 2.0 + 5.0
        assert report["verdict"]["verdict"] == "VF"
        assert report["test_repair"]["status"] == "timeout"


def test_criterion_08_ablation_flags(bug_projects, tmp_path):
    with criterion(8, "ablations verified by prompt and gateway-log inspection"):
        src, tgt = bug_projects
        resp = write_eq_response(tmp_path / "resp.json")
        base = RunConfig(agent_cmd=stub_cmd(resp))

        config = dataclasses.replace(base, no_semantic_analysis=True)
        report = validate_pair(bug_entry("p", src, tgt), config, tmp_path / "runA")
        prompt = (tmp_path / "runA" / "p" / "workspace" / "agent_prompt.txt").read_text()
        assert "semantic_analysis_results" not in prompt
        sa = report["semantic_analysis"]
        assert sa is not None
        assert all(not sa[a]["skipped_by_gate"] for a in sa)

        config = dataclasses.replace(base, standalone_agent=True)
        report = validate_pair(bug_entry("p", src, tgt), config, tmp_path / "runB")
        assert report["semantic_analysis"] is None
        llm_dir = tmp_path / "runB" / "p" / "llm"
        texts = [
            json.loads(p.read_text())["request"]["user_text"]
            for p in sorted(llm_dir.glob("*.json"))
        ]
        assert texts and all("[stage=verdict" in t for t in texts)


def test_criterion_09_agent_prompt_structure(max_pair):
    with criterion(9, "agent prompt sections appear in the documented order"):
        report = run_semantic_analyzer(max_pair, yes_gateway(), AnalyzerSettings(),
                                       parallel=False)
        prompt = build_agent_prompt(max_pair, report)
        positions = [
            prompt.index("<fragment_details>"),
            prompt.index("<instruction>"),
            prompt.index(FUNCTIONAL_EQUIVALENCE_DEFINITION[:60]),
            prompt.index("<rules_and_general_notes>"),
            prompt.index("<semantic_analysis_results>"),
            prompt.index("<final_response_format>"),
        ]
        assert positions == sorted(positions)
        golden = (GOLDEN_DIR / "agent_prompt.txt").read_text()
        assert build_agent_prompt(max_pair, None) == golden


def test_criterion_10_adapter_parity(tmp_path):
    with criterion(10, "shared CFG oracle suite and a self-pair EQ run for all six languages"):
        for shape, per_lang in CFG_SOURCES.items():
            for language, source in per_lang.items():
                cfg = build_cfg(fragment(source, language=language))
                kinds, edges = _oracle_for(shape, language)
                assert [n.kind.value for n in cfg.nodes] == kinds, (shape, language)
                got = {(e.src, e.dst, e.kind.value) for e in cfg.edges}
                assert got == edges, (shape, language)

        extensions = {
            LanguageId.PYTHON: "py",
            LanguageId.JAVA: "java",
            LanguageId.JAVASCRIPT: "js",
            LanguageId.GO: "go",
            LanguageId.RUST: "rs",
            LanguageId.C: "c",
        }
        for language, source in CFG_SOURCES["max"].items():
            proj = tmp_path / f"proj_{language.value}"
            proj.mkdir()
            filename = f"mod.{extensions[language]}"
            (proj / filename).write_text(source + "\n")
            entry = PairEntry(
                pair_id=f"self_{language.value}",
                source_project=str(proj),
                target_project=str(proj),
                source_language=language.value,
                target_language=language.value,
                source_locator={"file": filename, "name": "max"},
                target_locator={"file": filename, "name": "max"},
            )
            config = RunConfig(same_language_override=True)
            report = validate_pair(entry, config, tmp_path / "runs" / language.value)
            assert report["verdict"]["verdict"] == "EQ", language
