"""Harness around the external coding agent: workspace isolation, the agent
prompt, subprocess execution with a wall-clock budget, generated-test
execution, and the patch validation protocol (a patch counts as correct only
when every previously failing test passes afterwards).
"""

from __future__ import annotations

import hashlib
import shutil
import subprocess
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .analyzers import SemanticReport
from .errors import (
    AgentCrash,
    AgentTimeout,
    MalformedAgentOutput,
    MissingToolchain,
    PatchApplyError,
    TestHarnessError,
)
from .gateway import extract_json_object
from .languages import LanguageId, TranslationPair, get_adapter, language_from_name
from .patching import apply_unified_diff, make_unified_diff, patch_target_file
from .prompts import FUNCTIONAL_EQUIVALENCE_DEFINITION

DEFAULT_TIMEOUT_S = 1000.0
TIMEOUT_GRACE_S = 5.0
DEFAULT_TEST_TIMEOUT_S = 60.0


@dataclass
class AgentConfig:
    agent_cmd: list[str] = field(default_factory=list)
    timeout_s: float = DEFAULT_TIMEOUT_S
    test_timeout_s: float = DEFAULT_TEST_TIMEOUT_S
    env_allowlist: list[str] = field(default_factory=lambda: ["PATH", "HOME", "LANG"])
    tool_allowlist: list[str] = field(default_factory=lambda: ["read", "write", "shell"])


@dataclass
class Workspace:
    root: Path
    source_project_copy: Path
    target_project_copy: Path
    env_allowlist: list[str] = field(default_factory=list)
    tool_allowlist: list[str] = field(default_factory=list)


@dataclass
class AgentReport:
    is_equivalent: str
    explanation: str = ""
    tests: list[dict] = field(default_factory=list)
    patch: Optional[str] = None
    transcript_path: Optional[str] = None
    turns: int = 0
    elapsed_s: float = 0.0
    status: str = "completed"  # completed | timeout | crash | skipped

    def to_dict(self) -> dict:
        return {
            "is_equivalent": self.is_equivalent,
            "explanation": self.explanation,
            "tests": self.tests,
            "patch": self.patch,
            "transcript_path": self.transcript_path,
            "turns": self.turns,
            "elapsed_s": self.elapsed_s,
            "status": self.status,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "AgentReport":
        return cls(**data)


def tree_checksum(root: Path) -> str:
    digest = hashlib.sha256()
    root = Path(root)
    for path in sorted(root.rglob("*")):
        if path.is_file():
            digest.update(str(path.relative_to(root)).encode())
            digest.update(path.read_bytes())
    return digest.hexdigest()


def prepare_workspace(source_project: Path, target_project: Path,
                      config: AgentConfig, workdir: Path,
                      required_languages: tuple[LanguageId, ...] = ()) -> Workspace:
    source_project = Path(source_project)
    target_project = Path(target_project)
    for p in (source_project, target_project):
        if not p.is_dir():
            raise IOError(f"project root {p} does not exist")
    for lang in required_languages:
        cmd = get_adapter(lang).test_command[0]
        if shutil.which(cmd) is None:
            raise MissingToolchain(str(lang), cmd)
    root = Path(workdir)
    root.mkdir(parents=True, exist_ok=True)
    src_copy = root / "source_project"
    tgt_copy = root / "target_project"
    shutil.copytree(source_project, src_copy, dirs_exist_ok=True)
    shutil.copytree(target_project, tgt_copy, dirs_exist_ok=True)
    return Workspace(
        root=root,
        source_project_copy=src_copy,
        target_project_copy=tgt_copy,
        env_allowlist=list(config.env_allowlist),
        tool_allowlist=list(config.tool_allowlist),
    )


_RULES_AND_NOTES = (
    "1. Consider the semantic analysis results below, but verify their "
    "claims with executable tests rather than trusting them. "
    "2. Generate tests in BOTH the source and the target language that "
    "exercise the fragments on the same inputs. "
    "3. Execute the tests and base your verdict on observed behavior. "
    "4. If the implementations are not equivalent, write a patch (unified "
    "diff against the target fragment's file) that repairs the target. "
    "5. Emit your final answer as a single JSON object in the response "
    "format given below, as the last thing you print."
)

_RESPONSE_FORMAT = (
    '{"is_equivalent": "<yes|no>", "explanation": "<text>", '
    '"tests": [{"language": "<language>", "path": "<file path>", '
    '"content": "<file content>"}], "patch": "<unified diff or null>"}'
)


def build_agent_prompt(pair: TranslationPair,
                       semantic_report: Optional[SemanticReport],
                       no_semantic_analysis: bool = False) -> str:
    src, tgt = pair.source, pair.target
    parts = [
        "<fragment_details>",
        "  <source_fragment_details>",
        f"    path: {src.file_path or '<inline>'}",
        f"    language: {src.language}",
        "    implementation:",
        _indent(src.source_text, 6),
        "  </source_fragment_details>",
        "  <target_fragment_details>",
        f"    path: {tgt.file_path or '<inline>'}",
        f"    language: {tgt.language}",
        "    implementation:",
        _indent(tgt.source_text, 6),
        "  </target_fragment_details>",
        "</fragment_details>",
        "",
        "<instruction>",
        "  You are an expert agent specializing in test generation and code "
        "repair. Based on the analysis from multiple expert agents regarding "
        f"functional equivalence between {src.language} and {tgt.language} "
        "implementations of the given method/function, your task is to "
        "generate tests and repair the target implementation, if necessary.",
        "  <functional_equivalence_definition>",
        _indent(FUNCTIONAL_EQUIVALENCE_DEFINITION, 4),
        "  </functional_equivalence_definition>",
        f"  <rules_and_general_notes>{_RULES_AND_NOTES}</rules_and_general_notes>",
        "</instruction>",
        "",
    ]
    if not no_semantic_analysis:
        body = semantic_report.to_json() if semantic_report is not None else "{}"
        parts += [
            "<semantic_analysis_results>",
            body,
            "</semantic_analysis_results>",
            "",
        ]
    parts += [
        "<final_response_format>",
        _RESPONSE_FORMAT,
        "</final_response_format>",
    ]
    return "\n".join(parts) + "\n"


def _indent(text: str, n: int) -> str:
    pad = " " * n
    return "\n".join(pad + line for line in text.splitlines())


def run_agent(prompt: str, workspace: Workspace, config: AgentConfig) -> AgentReport:
    if not config.agent_cmd:
        raise AgentCrash("no agent_cmd configured")
    prompt_file = workspace.root / "agent_prompt.txt"
    prompt_file.write_text(prompt)
    transcript = workspace.root / "agent" / "transcript.txt"
    transcript.parent.mkdir(parents=True, exist_ok=True)
    started = time.monotonic()
    for attempt in range(2):
        cmd = [
            part.replace("{prompt_file}", str(prompt_file))
            .replace("{workspace}", str(workspace.root))
            for part in config.agent_cmd
        ]
        remaining = config.timeout_s - (time.monotonic() - started)
        if remaining <= 0:
            raise AgentTimeout(f"agent exceeded {config.timeout_s}s budget")
        try:
            proc = subprocess.run(
                cmd,
                cwd=workspace.root,
                capture_output=True,
                text=True,
                timeout=remaining,
            )
        except subprocess.TimeoutExpired as exc:
            _append_transcript(transcript, exc.stdout, exc.stderr)
            raise AgentTimeout(f"agent exceeded {config.timeout_s}s budget")
        _append_transcript(transcript, proc.stdout, proc.stderr)
        if proc.returncode != 0:
            raise AgentCrash(f"agent exited with status {proc.returncode}")
        obj = _last_json_object(proc.stdout)
        if obj is not None and "is_equivalent" in obj:
            elapsed = time.monotonic() - started
            return _report_from_json(obj, workspace, transcript, elapsed, attempt + 1)
        if attempt == 0:
            # structured re-ask: rerun with a corrective suffix
            prompt_file.write_text(
                prompt
                + "\n\nYour previous output did not end with the required "
                "JSON object. Reply again, ending with exactly one JSON "
                "object in the final response format.\n"
            )
    raise MalformedAgentOutput("agent never produced the required JSON object")


def _append_transcript(path: Path, stdout, stderr):
    with open(path, "a") as fh:
        if stdout:
            fh.write(stdout if isinstance(stdout, str) else stdout.decode())
        if stderr:
            fh.write("\n--- stderr ---\n")
            fh.write(stderr if isinstance(stderr, str) else stderr.decode())


def _last_json_object(text: str):
    # search from the last '{' backwards so the *final* object wins
    for start in range(len(text) - 1, -1, -1):
        if text[start] != "{":
            continue
        obj = extract_json_object(text[start:])
        if obj is not None and "is_equivalent" in obj:
            return obj
    return None


def _report_from_json(obj: dict, workspace: Workspace, transcript: Path,
                      elapsed: float, turns: int) -> AgentReport:
    tests = []
    for entry in obj.get("tests") or []:
        if not isinstance(entry, dict) or "path" not in entry:
            continue
        path = workspace.root / entry["path"]
        content = entry.get("content")
        if content is not None and not path.exists():
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(content)
        tests.append(
            {
                "language": entry.get("language", ""),
                "path": str(Path(entry["path"])),
                "content": content,
            }
        )
    patch = obj.get("patch") or None
    if isinstance(patch, dict):
        # full-file replacement fallback: convert to a unified diff
        rel = patch.get("file", "")
        target = workspace.target_project_copy / rel
        old = target.read_text() if target.exists() else ""
        patch = make_unified_diff(old, patch.get("content", ""), rel)
    return AgentReport(
        is_equivalent=str(obj.get("is_equivalent", "")).lower(),
        explanation=str(obj.get("explanation", "")),
        tests=tests,
        patch=patch,
        transcript_path=str(transcript),
        turns=turns,
        elapsed_s=round(elapsed, 3),
    )


def run_generated_tests(workspace: Workspace, tests: list[dict],
                        test_timeout_s: float = DEFAULT_TEST_TIMEOUT_S) -> dict[str, str]:
    results: dict[str, str] = {}
    for entry in tests:
        rel = entry["path"]
        path = workspace.root / rel
        if not path.exists():
            results[rel] = "error:missing"
            continue
        try:
            lang = language_from_name(entry.get("language") or "python")
        except Exception:
            results[rel] = "error:unknown-language"
            continue
        template = get_adapter(lang).test_command
        out_bin = path.with_suffix("")
        cmd = [part.format(file=path, out=out_bin) for part in template]
        if shutil.which(cmd[0]) is None:
            results[rel] = f"error:toolchain-missing:{cmd[0]}"
            continue
        try:
            proc = subprocess.run(
                cmd,
                cwd=workspace.root,
                capture_output=True,
                text=True,
                timeout=test_timeout_s,
            )
        except subprocess.TimeoutExpired:
            results[rel] = "fail:timeout"
            continue
        except OSError as exc:
            raise TestHarnessError(f"could not execute {rel}: {exc}")
        results[rel] = "pass" if proc.returncode == 0 else "fail"
    return results


def validate_patch(workspace: Workspace, patch: str, failing_tests: list[dict],
                   test_timeout_s: float = DEFAULT_TEST_TIMEOUT_S) -> bool:
    """Patch validation protocol: every named test must fail before the
    patch and pass after it. Conservative: tests that already pass before
    patching reject the validation outright."""
    if not failing_tests:
        return False
    before = run_generated_tests(workspace, failing_tests, test_timeout_s)
    if any(status == "pass" for status in before.values()):
        return False
    rel = patch_target_file(patch)
    if rel is None:
        raise PatchApplyError("patch names no target file")
    target = workspace.target_project_copy / rel
    if not target.exists():
        raise PatchApplyError(f"patch target {rel} not found in target project copy")
    original = target.read_text()
    patched = apply_unified_diff(original, patch)
    target.write_text(patched)
    try:
        after = run_generated_tests(workspace, failing_tests, test_timeout_s)
    finally:
        target.write_text(original)
    return all(status == "pass" for status in after.values())
