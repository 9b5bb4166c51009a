"""Agent harness: workspace isolation, prompt structure, subprocess
execution, generated-test running, and the patch validation protocol."""

import json
import sys
import time

import pytest

from equicheck.agent import (
    AgentConfig,
    build_agent_prompt,
    prepare_workspace,
    run_agent,
    run_generated_tests,
    tree_checksum,
    validate_patch,
)
from equicheck.analyzers import AnalyzerSettings, run_semantic_analyzer
from equicheck.errors import (
    AgentCrash,
    AgentTimeout,
    MalformedAgentOutput,
    MissingToolchain,
    PatchApplyError,
)
from equicheck.languages import LanguageId
from equicheck.prompts import FUNCTIONAL_EQUIVALENCE_DEFINITION

from conftest import (
    FAILING_TEST_JS,
    GOLDEN_DIR,
    oracle_patch,
    stub_cmd,
    write_eq_response,
    write_neq_response,
    yes_gateway,
)


@pytest.fixture
def workspace(bug_projects, tmp_path):
    src, tgt = bug_projects
    return prepare_workspace(src, tgt, AgentConfig(), tmp_path / "ws")


def test_prepare_workspace_copies_and_isolates(bug_projects, tmp_path):
    src, tgt = bug_projects
    before_src = tree_checksum(src)
    before_tgt = tree_checksum(tgt)
    ws = prepare_workspace(src, tgt, AgentConfig(), tmp_path / "ws")
    assert (ws.source_project_copy / "calc.py").exists()
    assert (ws.target_project_copy / "calc.js").exists()
    (ws.target_project_copy / "calc.js").write_text("mutated")
    assert tree_checksum(src) == before_src
    assert tree_checksum(tgt) == before_tgt


def test_prepare_workspace_missing_project(tmp_path):
    with pytest.raises(IOError):
        prepare_workspace(tmp_path / "nope", tmp_path / "also-nope",
                          AgentConfig(), tmp_path / "ws")


def test_prepare_workspace_missing_toolchain(bug_projects, tmp_path, monkeypatch):
    src, tgt = bug_projects
    monkeypatch.setattr("equicheck.agent.shutil.which", lambda cmd: None)
    with pytest.raises(MissingToolchain):
        prepare_workspace(src, tgt, AgentConfig(), tmp_path / "ws",
                          required_languages=(LanguageId.JAVASCRIPT,))


def test_prompt_structure(max_pair):
    report = run_semantic_analyzer(max_pair, yes_gateway(), AnalyzerSettings(),
                                   parallel=False)
    prompt = build_agent_prompt(max_pair, report)
    order = [
        prompt.index("<fragment_details>"),
        prompt.index(FUNCTIONAL_EQUIVALENCE_DEFINITION[:40]),
        prompt.index("<semantic_analysis_results>"),
        prompt.index("<final_response_format>"),
    ]
    assert order == sorted(order)
    assert "<source_fragment_details>" in prompt
    assert "<target_fragment_details>" in prompt
    assert "<rules_and_general_notes>" in prompt
    # the six-key report object rides along verbatim
    for key in ("control_flow", "data_flow", "io", "lib_api", "exception", "spec"):
        assert f'"{key}"' in prompt


def test_prompt_ablation_omits_semantic_block(max_pair):
    prompt = build_agent_prompt(max_pair, None, no_semantic_analysis=True)
    assert "semantic_analysis_results" not in prompt
    assert "<final_response_format>" in prompt


def test_prompt_deterministic(max_pair):
    assert build_agent_prompt(max_pair, None) == build_agent_prompt(max_pair, None)


def test_prompt_matches_golden(max_pair):
    prompt = build_agent_prompt(max_pair, None)
    assert prompt == (GOLDEN_DIR / "agent_prompt.txt").read_text()


def test_run_agent_scripted_yes(workspace, tmp_path, max_pair):
    resp = write_eq_response(tmp_path / "resp.json")
    report = run_agent("prompt", workspace, AgentConfig(agent_cmd=stub_cmd(resp)))
    assert report.is_equivalent == "yes"
    assert report.patch is None
    assert len(report.tests) == 2
    assert (workspace.root / "t_src.py").exists()
    assert report.transcript_path and "transcript" in report.transcript_path


def test_run_agent_scripted_no_with_patch(workspace, tmp_path):
    resp = write_neq_response(tmp_path / "resp.json")
    report = run_agent("prompt", workspace, AgentConfig(agent_cmd=stub_cmd(resp)))
    assert report.is_equivalent == "no"
    assert report.patch and "+++ b/calc.js" in report.patch


def test_run_agent_timeout(workspace, tmp_path):
    resp = write_eq_response(tmp_path / "resp.json")
    config = AgentConfig(agent_cmd=stub_cmd(resp, "--sleep", "10"), timeout_s=2.0)
    started = time.monotonic()
    with pytest.raises(AgentTimeout):
        run_agent("prompt", workspace, config)
    assert time.monotonic() - started < 2.0 + 5.0


def test_run_agent_crash(workspace, tmp_path):
    resp = write_eq_response(tmp_path / "resp.json")
    config = AgentConfig(agent_cmd=stub_cmd(resp, "--exit-code", "3"))
    with pytest.raises(AgentCrash):
        run_agent("prompt", workspace, config)


def test_run_agent_malformed_then_reask(workspace, tmp_path):
    (tmp_path / "garbage.json").write_text("I could not decide, sorry.")
    config = AgentConfig(agent_cmd=stub_cmd(tmp_path / "garbage.json"))
    with pytest.raises(MalformedAgentOutput):
        run_agent("prompt", workspace, config)
    # the re-ask appended the corrective suffix to the prompt file
    assert "previous output" in (workspace.root / "agent_prompt.txt").read_text()


def test_run_agent_noise_before_json_is_fine(workspace, tmp_path):
    resp = write_eq_response(tmp_path / "resp.json")
    config = AgentConfig(agent_cmd=stub_cmd(resp, "--noise", "thinking... {oops"))
    report = run_agent("prompt", workspace, config)
    assert report.is_equivalent == "yes"


def test_run_generated_tests_pass_fail(workspace):
    (workspace.root / "ok.py").write_text("assert 1 + 1 == 2\n")
    (workspace.root / "bad.py").write_text("raise SystemExit(1)\n")
    tests = [
        {"language": "python", "path": "ok.py"},
        {"language": "python", "path": "bad.py"},
        {"language": "python", "path": "absent.py"},
    ]
    results = run_generated_tests(workspace, tests)
    assert results == {"ok.py": "pass", "bad.py": "fail", "absent.py": "error:missing"}


def test_run_generated_tests_timeout(workspace):
    (workspace.root / "loop.py").write_text("while True:\n    pass\n")
    results = run_generated_tests(
        workspace, [{"language": "python", "path": "loop.py"}], test_timeout_s=1.0
    )
    assert results == {"loop.py": "fail:timeout"}


def _write_failing_test(workspace):
    (workspace.root / "t_fail.js").write_text(FAILING_TEST_JS)
    return [{"language": "javascript", "path": "t_fail.js"}]


def test_validate_patch_oracle_patch(workspace):
    failing = _write_failing_test(workspace)
    assert validate_patch(workspace, oracle_patch(), failing) is True
    # workspace restored: bug still present afterwards
    assert "a + b + 1" in (workspace.target_project_copy / "calc.js").read_text()


def test_validate_patch_noop_patch(workspace):
    failing = _write_failing_test(workspace)
    noop = (
        "--- a/calc.js\n+++ b/calc.js\n@@ -1,1 +1,1 @@\n"
        "-function add(a, b) {\n+function add(a, b) {\n"
    )
    assert validate_patch(workspace, noop, failing) is False


def test_validate_patch_stale_context(workspace):
    failing = _write_failing_test(workspace)
    stale = (
        "--- a/calc.js\n+++ b/calc.js\n@@ -2,1 +2,1 @@\n"
        "-    return a * b;\n+    return a + b;\n"
    )
    with pytest.raises(PatchApplyError):
        validate_patch(workspace, stale, failing)


def test_validate_patch_precheck_rejects_passing_tests(workspace):
    (workspace.root / "t_pass.js").write_text("// trivially passes\n")
    passing = [{"language": "javascript", "path": "t_pass.js"}]
    assert validate_patch(workspace, oracle_patch(), passing) is False


def test_validate_patch_rejects_empty_test_list(workspace):
    assert validate_patch(workspace, oracle_patch(), []) is False
