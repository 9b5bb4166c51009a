"""CFG construction oracles.

Each fixture shape has a hand-derived oracle (node kinds in id order and the
exact edge set). The same shape is written in all six languages and must
produce the oracle graph exactly.
"""

import pytest

from equicheck import build_cfg, render_cfg_text
from equicheck.cfg import EdgeKind, NodeKind, abstract_graph
from equicheck.languages import FunctionFragment, LanguageId

from conftest import GOLDEN_DIR, MAX_PY, fragment

P = "PARAMETERS"
E = "ENTRY"
C = "CONDITION"
L = "LOOP_HEADER"
ST = "STATEMENT"
R = "RETURN"
TH = "THROW"
BC = "BREAK_CONTINUE"
CA = "CALL_STMT"

SEQ = "SEQUENTIAL"
T = "TRUE_BRANCH"
F = "FALSE_BRANCH"
LB = "LOOP_BACK"
LE = "LOOP_EXIT"

# shape name -> (node kinds by id, edge set of (src, dst, kind))
ORACLES = {
    "max": ([P, E, C, R, R], {(0, 1, SEQ), (1, 2, SEQ), (2, 3, T), (2, 4, F)}),
    "straight": ([P, E, ST, R], {(0, 1, SEQ), (1, 2, SEQ), (2, 3, SEQ)}),
    "while_sum": (
        [P, E, ST, L, ST, R],
        {(0, 1, SEQ), (1, 2, SEQ), (2, 3, SEQ), (3, 4, T), (4, 3, LB), (3, 5, LE)},
    ),
    "if_else": (
        [P, E, C, ST, R, ST, R],
        {(0, 1, SEQ), (1, 2, SEQ), (2, 3, T), (3, 4, SEQ), (2, 5, F), (5, 6, SEQ)},
    ),
    "guard": (
        [P, E, C, R, ST, R],
        {(0, 1, SEQ), (1, 2, SEQ), (2, 3, T), (2, 4, F), (4, 5, SEQ)},
    ),
    "nested_if": (
        [P, E, C, R, C, R, R],
        {(0, 1, SEQ), (1, 2, SEQ), (2, 3, T), (2, 4, F), (4, 5, T), (4, 6, F)},
    ),
    "loop_break": (
        [P, E, ST, L, C, BC, ST, R],
        {
            (0, 1, SEQ), (1, 2, SEQ), (2, 3, SEQ), (3, 4, T), (4, 5, T),
            (4, 6, F), (6, 3, LB), (3, 7, LE), (5, 7, SEQ),
        },
    ),
    "abort_guard": (
        [P, E, C, TH, R],
        {(0, 1, SEQ), (1, 2, SEQ), (2, 3, T), (2, 4, F)},
    ),
    # languages without a throw construct model the abort as a call that
    # falls through
    "abort_guard_call": (
        [P, E, C, CA, R],
        {(0, 1, SEQ), (1, 2, SEQ), (2, 3, T), (3, 4, SEQ), (2, 4, F)},
    ),
    "bare_call": ([P, E, CA, R], {(0, 1, SEQ), (1, 2, SEQ), (2, 3, SEQ)}),
    "for_sum": (
        [P, E, ST, L, ST, R],
        {(0, 1, SEQ), (1, 2, SEQ), (2, 3, SEQ), (3, 4, T), (4, 3, LB), (3, 5, LE)},
    ),
}

PY = LanguageId.PYTHON
JAVA = LanguageId.JAVA
JS = LanguageId.JAVASCRIPT
GO = LanguageId.GO
RUST = LanguageId.RUST
CC = LanguageId.C

SOURCES = {
    "max": {
        PY: MAX_PY,
        JAVA: "static int max(int a, int b) {\n    if (a > b) {\n        return a;\n    }\n    return b;\n}",
        JS: "function max(a, b) {\n    if (a > b) {\n        return a;\n    }\n    return b;\n}",
        GO: "func max(a int, b int) int {\n    if a > b {\n        return a\n    }\n    return b\n}",
        RUST: "fn max(a: i64, b: i64) -> i64 {\n    if a > b {\n        return a;\n    }\n    return b;\n}",
        CC: "int max(int a, int b) {\n    if (a > b) {\n        return a;\n    }\n    return b;\n}",
    },
    "straight": {
        PY: "def f(a, b):\n    c = a + b\n    d = c * 2\n    return d",
        JAVA: "static int f(int a, int b) {\n    int c = a + b;\n    int d = c * 2;\n    return d;\n}",
        JS: "function f(a, b) {\n    let c = a + b;\n    let d = c * 2;\n    return d;\n}",
        GO: "func f(a int, b int) int {\n    c := a + b\n    d := c * 2\n    return d\n}",
        RUST: "fn f(a: i64, b: i64) -> i64 {\n    let c = a + b;\n    let d = c * 2;\n    return d;\n}",
        CC: "int f(int a, int b) {\n    int c = a + b;\n    int d = c * 2;\n    return d;\n}",
    },
    "while_sum": {
        PY: "def f(n):\n    s = 0\n    i = 0\n    while i < n:\n        s = s + i\n        i = i + 1\n    return s",
        JAVA: "static int f(int n) {\n    int s = 0;\n    int i = 0;\n    while (i < n) {\n        s = s + i;\n        i = i + 1;\n    }\n    return s;\n}",
        JS: "function f(n) {\n    let s = 0;\n    let i = 0;\n    while (i < n) {\n        s = s + i;\n        i = i + 1;\n    }\n    return s;\n}",
        GO: "func f(n int) int {\n    s := 0\n    i := 0\n    for i < n {\n        s = s + i\n        i = i + 1\n    }\n    return s\n}",
        RUST: "fn f(n: i64) -> i64 {\n    let mut s = 0;\n    let mut i = 0;\n    while i < n {\n        s = s + i;\n        i = i + 1;\n    }\n    return s;\n}",
        CC: "int f(int n) {\n    int s = 0;\n    int i = 0;\n    while (i < n) {\n        s = s + i;\n        i = i + 1;\n    }\n    return s;\n}",
    },
    "if_else": {
        PY: "def f(a, b):\n    if a > b:\n        d = a - b\n        return d\n    else:\n        d = b - a\n        return d",
        JAVA: "static int f(int a, int b) {\n    if (a > b) {\n        int d = a - b;\n        return d;\n    } else {\n        int d = b - a;\n        return d;\n    }\n}",
        JS: "function f(a, b) {\n    if (a > b) {\n        let d = a - b;\n        return d;\n    } else {\n        let d = b - a;\n        return d;\n    }\n}",
        GO: "func f(a int, b int) int {\n    if a > b {\n        d := a - b\n        return d\n    } else {\n        d := b - a\n        return d\n    }\n}",
        RUST: "fn f(a: i64, b: i64) -> i64 {\n    if a > b {\n        let d = a - b;\n        return d;\n    } else {\n        let d = b - a;\n        return d;\n    }\n}",
        CC: "int f(int a, int b) {\n    if (a > b) {\n        int d = a - b;\n        return d;\n    } else {\n        int d = b - a;\n        return d;\n    }\n}",
    },
    "guard": {
        PY: "def f(x):\n    if x < 0:\n        return 0\n    y = x + x\n    return y",
        JAVA: "static int f(int x) {\n    if (x < 0) {\n        return 0;\n    }\n    int y = x + x;\n    return y;\n}",
        JS: "function f(x) {\n    if (x < 0) {\n        return 0;\n    }\n    let y = x + x;\n    return y;\n}",
        GO: "func f(x int) int {\n    if x < 0 {\n        return 0\n    }\n    y := x + x\n    return y\n}",
        RUST: "fn f(x: i64) -> i64 {\n    if x < 0 {\n        return 0;\n    }\n    let y = x + x;\n    return y;\n}",
        CC: "int f(int x) {\n    if (x < 0) {\n        return 0;\n    }\n    int y = x + x;\n    return y;\n}",
    },
    "nested_if": {
        PY: "def sign(x):\n    if x > 0:\n        return 1\n    if x < 0:\n        return -1\n    return 0",
        JAVA: "static int sign(int x) {\n    if (x > 0) {\n        return 1;\n    }\n    if (x < 0) {\n        return -1;\n    }\n    return 0;\n}",
        JS: "function sign(x) {\n    if (x > 0) {\n        return 1;\n    }\n    if (x < 0) {\n        return -1;\n    }\n    return 0;\n}",
        GO: "func sign(x int) int {\n    if x > 0 {\n        return 1\n    }\n    if x < 0 {\n        return -1\n    }\n    return 0\n}",
        RUST: "fn sign(x: i64) -> i64 {\n    if x > 0 {\n        return 1;\n    }\n    if x < 0 {\n        return -1;\n    }\n    return 0;\n}",
        CC: "int sign(int x) {\n    if (x > 0) {\n        return 1;\n    }\n    if (x < 0) {\n        return -1;\n    }\n    return 0;\n}",
    },
    "loop_break": {
        PY: "def f(n, k):\n    i = 0\n    while i < n:\n        if i == k:\n            break\n        i = i + 1\n    return i",
        JAVA: "static int f(int n, int k) {\n    int i = 0;\n    while (i < n) {\n        if (i == k) {\n            break;\n        }\n        i = i + 1;\n    }\n    return i;\n}",
        JS: "function f(n, k) {\n    let i = 0;\n    while (i < n) {\n        if (i === k) {\n            break;\n        }\n        i = i + 1;\n    }\n    return i;\n}",
        GO: "func f(n int, k int) int {\n    i := 0\n    for i < n {\n        if i == k {\n            break\n        }\n        i = i + 1\n    }\n    return i\n}",
        RUST: "fn f(n: i64, k: i64) -> i64 {\n    let mut i = 0;\n    while i < n {\n        if i == k {\n            break;\n        }\n        i = i + 1;\n    }\n    return i;\n}",
        CC: "int f(int n, int k) {\n    int i = 0;\n    while (i < n) {\n        if (i == k) {\n            break;\n        }\n        i = i + 1;\n    }\n    return i;\n}",
    },
    "abort_guard": {
        PY: 'def f(x):\n    if x < 0:\n        raise ValueError("neg")\n    return x',
        JAVA: 'static int f(int x) {\n    if (x < 0) {\n        throw new RuntimeException("neg");\n    }\n    return x;\n}',
        JS: 'function f(x) {\n    if (x < 0) {\n        throw new Error("neg");\n    }\n    return x;\n}',
        GO: 'func f(x int) int {\n    if x < 0 {\n        panic("neg")\n    }\n    return x\n}',
        RUST: 'fn f(x: i64) -> i64 {\n    if x < 0 {\n        panic!("neg");\n    }\n    return x;\n}',
        CC: "int f(int x) {\n    if (x < 0) {\n        abort();\n    }\n    return x;\n}",
    },
    "bare_call": {
        PY: "def f(x):\n    print(x)\n    return x",
        JAVA: "static int f(int x) {\n    log(x);\n    return x;\n}",
        JS: "function f(x) {\n    console.log(x);\n    return x;\n}",
        GO: "func f(x int) int {\n    log(x)\n    return x\n}",
        RUST: "fn f(x: i64) -> i64 {\n    log(x);\n    return x;\n}",
        CC: "int f(int x) {\n    log(x);\n    return x;\n}",
    },
    "for_sum": {
        PY: "def f(n):\n    t = 0\n    for i in range(n):\n        t = t + i\n    return t",
        JAVA: "static int f(int n) {\n    int t = 0;\n    for (int i = 0; i < n; i = i + 1) {\n        t = t + i;\n    }\n    return t;\n}",
        JS: "function f(n) {\n    let t = 0;\n    for (let i = 0; i < n; i = i + 1) {\n        t = t + i;\n    }\n    return t;\n}",
        GO: "func f(n int) int {\n    t := 0\n    for i := 0; i < n; i = i + 1 {\n        t = t + i\n    }\n    return t\n}",
        RUST: "fn f(n: i64) -> i64 {\n    let mut t = 0;\n    for i in 0..n {\n        t = t + i;\n    }\n    return t;\n}",
        CC: "int f(int n) {\n    int t = 0;\n    for (int i = 0; i < n; i = i + 1) {\n        t = t + i;\n    }\n    return t;\n}",
    },
}

# languages whose abort construct is a plain call, not a throw statement
_CALL_ABORT = {GO, RUST, CC}


def _oracle_for(shape: str, language: LanguageId):
    if shape == "abort_guard" and language in _CALL_ABORT:
        return ORACLES["abort_guard_call"]
    return ORACLES[shape]


def _cases():
    for shape, per_lang in SOURCES.items():
        for language in per_lang:
            yield shape, language


@pytest.mark.parametrize("shape,language", list(_cases()),
                         ids=lambda v: str(v))
def test_oracle_cfg(shape, language):
    cfg = build_cfg(fragment(SOURCES[shape][language], language=language))
    kinds, edges = _oracle_for(shape, language)
    assert [n.kind.value for n in cfg.nodes] == kinds
    assert {(e.src, e.dst, e.kind.value) for e in cfg.edges} == edges


def test_ten_shapes_per_language():
    for language in (PY, JAVA, JS, GO, RUST, CC):
        assert sum(1 for s in SOURCES if language in SOURCES[s]) == 10


def test_parameters_node_zero_entry_one(max_py):
    cfg = build_cfg(max_py)
    assert cfg.nodes[0].kind is NodeKind.PARAMETERS
    assert cfg.nodes[0].text == "parameter: a, parameter: b"
    assert cfg.nodes[1].kind is NodeKind.ENTRY
    assert cfg.parameters_id == 0 and cfg.entry_id == 1


def test_branch_labels(max_py):
    cfg = build_cfg(max_py)
    labels = {(e.kind.value, e.label) for e in cfg.edges if e.label}
    assert ("TRUE_BRANCH", "a > b") in labels
    assert ("FALSE_BRANCH", "(a <= b)") in labels


def test_while_loop_exit_label():
    cfg = build_cfg(fragment(SOURCES["while_sum"][PY]))
    exits = [e for e in cfg.edges if e.kind is EdgeKind.LOOP_EXIT]
    assert len(exits) == 1
    assert exits[0].label == "(i >= n)"


def test_no_exit_node_when_all_paths_return(max_py):
    cfg = build_cfg(max_py)
    assert all(n.kind is not NodeKind.EXIT for n in cfg.nodes)


def test_exit_node_on_fallthrough():
    cfg = build_cfg(fragment("def f(x):\n    print(x)"))
    assert cfg.nodes[-1].kind is NodeKind.EXIT


def test_unreachable_code_warning():
    cfg = build_cfg(fragment("def f(x):\n    return x\n    print(x)"))
    assert any("unreachable" in w for w in cfg.warnings)


def test_exception_flow_edges():
    text = (
        "def f(x):\n"
        "    try:\n"
        "        y = risky(x)\n"
        "    except ValueError:\n"
        "        y = 0\n"
        "    return y"
    )
    cfg = build_cfg(fragment(text))
    kinds = [n.kind.value for n in cfg.nodes]
    assert "EXCEPTION_HANDLER" in kinds
    flows = [e for e in cfg.edges if e.kind is EdgeKind.EXCEPTION_FLOW]
    assert len(flows) >= 1


def test_abstract_graph_contents(max_py):
    graph = abstract_graph(build_cfg(max_py))
    assert graph.node_types == frozenset(
        {NodeKind.PARAMETERS, NodeKind.ENTRY, NodeKind.CONDITION, NodeKind.RETURN}
    )
    assert (NodeKind.CONDITION, EdgeKind.TRUE_BRANCH, NodeKind.RETURN) in graph.edge_triples


def test_render_matches_golden(max_py):
    rendered = render_cfg_text(build_cfg(max_py))
    golden = (GOLDEN_DIR / "cfg_max.txt").read_text()
    assert rendered == golden


def test_render_contains_arrow_labels(max_py):
    rendered = render_cfg_text(build_cfg(max_py))
    assert '→ Node 3 [label="a > b"]' in rendered
    assert '→ Node 4 [label="(a <= b)"]' in rendered


def test_switch_statement_case_edges():
    text = (
        "function f(x) {\n"
        "    switch (x) {\n"
        "        case 1:\n"
        "            return 10;\n"
        "        default:\n"
        "            return 0;\n"
        "    }\n"
        "}"
    )
    cfg = build_cfg(fragment(text, language=JS))
    assert any(n.kind is NodeKind.SWITCH for n in cfg.nodes)
    case_edges = [e for e in cfg.edges if e.kind is EdgeKind.CASE_BRANCH]
    assert len(case_edges) == 2


def test_infinite_rust_loop_has_no_loop_exit():
    text = (
        "fn f(n: i64) -> i64 {\n"
        "    let mut i = 0;\n"
        "    loop {\n"
        "        i = i + 1;\n"
        "        if i > n {\n"
        "            break;\n"
        "        }\n"
        "    }\n"
        "    return i;\n"
        "}"
    )
    cfg = build_cfg(fragment(text, language=RUST))
    assert not any(e.kind is EdgeKind.LOOP_EXIT for e in cfg.edges)
    assert any(e.kind is EdgeKind.LOOP_BACK for e in cfg.edges)
