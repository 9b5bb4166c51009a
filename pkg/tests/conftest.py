"""Shared fixtures: fragment builders, a seeded-bug fixture project pair,
scripted agent responses, and mock gateway helpers."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import pytest

from equicheck.gateway import Gateway, MockBackend
from equicheck.languages import FunctionFragment, LanguageId, TranslationPair
from equicheck.patching import make_unified_diff
from equicheck.pipeline import PairEntry

GOLDEN_DIR = Path(__file__).parent / "golden"

MAX_PY = "def max(a, b):\n    if a > b:\n        return a\n    return b"
MAX_JS = (
    "function max(a, b) {\n"
    "    if (a > b) {\n"
    "        return a;\n"
    "    }\n"
    "    return b;\n"
    "}"
)

YES_JSON = json.dumps({"is_equivalent": "yes", "explanation": "looks equivalent"})
YES_VERDICT_JSON = json.dumps({"is_equivalent": "yes", "summary": "all stages agree"})


def fragment(text: str, language=LanguageId.PYTHON, **kw) -> FunctionFragment:
    return FunctionFragment(language=language, source_text=text, **kw)


@pytest.fixture
def max_py():
    return fragment(MAX_PY)


@pytest.fixture
def max_js():
    return fragment(MAX_JS, language=LanguageId.JAVASCRIPT)


@pytest.fixture
def max_pair(max_py, max_js):
    return TranslationPair(source=max_py, target=max_js)


def yes_gateway(extra_rules=None, run_log=None) -> Gateway:
    """Gateway whose mock answers yes everywhere (extra rules win first)."""
    backend = MockBackend(rules=list(extra_rules or []), default=YES_JSON)
    return Gateway(backend, run_log=run_log)


# ---------------------------------------------------------------------------
# seeded-bug fixture pair: python `add` translated to javascript with an
# off-by-one error; ships with a failing test and the known-good patch
# ---------------------------------------------------------------------------

ADD_PY = "def add(a, b):\n    return a + b\n"
ADD_JS_BUGGY = (
    "function add(a, b) {\n"
    "    return a + b + 1;\n"
    "}\n"
    "module.exports = { add };\n"
)
ADD_JS_FIXED = ADD_JS_BUGGY.replace("a + b + 1", "a + b")

FAILING_TEST_JS = (
    "const { add } = require('./target_project/calc.js');\n"
    "if (add(2, 3) !== 5) { throw new Error('add(2,3) = ' + add(2, 3)); }\n"
)
PASSING_TEST_PY = (
    "import sys\n"
    "sys.path.insert(0, 'source_project')\n"
    "from calc import add\n"
    "assert add(2, 3) == 5\n"
)


@pytest.fixture
def bug_projects(tmp_path):
    """(source_root, target_root) with the seeded off-by-one translation."""
    src = tmp_path / "proj_src"
    tgt = tmp_path / "proj_tgt"
    src.mkdir()
    tgt.mkdir()
    (src / "calc.py").write_text(ADD_PY)
    (tgt / "calc.js").write_text(ADD_JS_BUGGY)
    return src, tgt


def oracle_patch() -> str:
    return make_unified_diff(ADD_JS_BUGGY, ADD_JS_FIXED, "calc.js")


def bug_entry(pair_id: str, src: Path, tgt: Path) -> PairEntry:
    return PairEntry(
        pair_id=pair_id,
        source_project=str(src),
        target_project=str(tgt),
        source_language="python",
        target_language="javascript",
        source_locator={"file": "calc.py", "name": "add"},
        target_locator={"file": "calc.js", "name": "add"},
    )


# ---------------------------------------------------------------------------
# scripted stub-agent command lines
# ---------------------------------------------------------------------------


def stub_cmd(response_file: Path, *extra: str) -> list[str]:
    return [
        sys.executable,
        "-m",
        "equicheck.stub_agent",
        "--prompt",
        "{prompt_file}",
        "--response",
        str(response_file),
        *extra,
    ]


def write_eq_response(path: Path) -> Path:
    path.write_text(
        json.dumps(
            {
                "is_equivalent": "yes",
                "explanation": "behavior matched on sampled inputs",
                "tests": [
                    {"language": "python", "path": "t_src.py", "content": PASSING_TEST_PY},
                    {
                        "language": "javascript",
                        "path": "t_tgt.js",
                        "content": "if (false) { throw new Error('unreachable'); }\n",
                    },
                ],
                "patch": None,
            }
        )
    )
    return path


def write_neq_response(path: Path) -> Path:
    path.write_text(
        json.dumps(
            {
                "is_equivalent": "no",
                "explanation": "target is off by one on every input",
                "tests": [
                    {"language": "python", "path": "t_src.py", "content": PASSING_TEST_PY},
                    {"language": "javascript", "path": "t_tgt.js", "content": FAILING_TEST_JS},
                ],
                "patch": oracle_patch(),
            }
        )
    )
    return path
