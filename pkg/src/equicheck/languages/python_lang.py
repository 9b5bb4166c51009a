"""Python adapter: maps stdlib ``ast`` trees onto the uniform syntax model."""

from __future__ import annotations

import ast
import textwrap

from ..errors import ParseError
from .model import FunctionFragment, LanguageId, SyntaxNode

_FLIP = {
    ast.Gt: "<=",
    ast.GtE: "<",
    ast.Lt: ">=",
    ast.LtE: ">",
    ast.Eq: "!=",
    ast.NotEq: "==",
}


class _Offsets:
    """Maps (lineno, col) of the parsed text back to offsets in the original
    fragment text (the two differ when the fragment had to be dedented)."""

    def __init__(self, original: str, parsed: str):
        self.orig_line_start = _line_starts(original)
        self.parsed_line_start = _line_starts(parsed)
        orig_lines = original.split("\n")
        parsed_lines = parsed.split("\n")
        self.removed = [
            len(o) - len(p) for o, p in zip(orig_lines, parsed_lines)
        ]

    def to_original(self, lineno: int, col: int) -> int:
        i = lineno - 1
        return self.orig_line_start[i] + self.removed[i] + col


def _line_starts(text: str) -> list[int]:
    starts = [0]
    for i, ch in enumerate(text):
        if ch == "\n":
            starts.append(i + 1)
    return starts


class PythonAdapter:
    language = LanguageId.PYTHON
    file_extensions = (".py",)
    error_handling_markers = ("try:", "except", "raise ", "finally:")
    test_command = ["python3", "{file}"]

    def parse(self, fragment: FunctionFragment) -> SyntaxNode:
        source = fragment.source_text
        if not source.strip():
            raise ParseError("empty fragment")
        parsed = source
        try:
            module = ast.parse(parsed)
        except (SyntaxError, IndentationError):
            parsed = textwrap.dedent(source)
            try:
                module = ast.parse(parsed)
            except (SyntaxError, IndentationError) as exc:
                raise ParseError(f"python grammar rejected fragment: {exc}")
        body = [n for n in module.body if not isinstance(n, (ast.Import, ast.ImportFrom))]
        if len(body) != 1 or not isinstance(
            body[0], (ast.FunctionDef, ast.AsyncFunctionDef)
        ):
            raise ParseError("fragment must contain exactly one function definition")
        builder = _TreeBuilder(source, parsed)
        func = body[0]
        root = SyntaxNode(kind="function_definition", span=(0, len(source)))
        root.text = func.name
        root.children.append(builder._parameters(func))
        root.children.append(builder._block(func.body))
        return root

    def find_function(self, file_text: str, qualified_name: str):
        """Locate a def by (dotted) name; returns a 1-based inclusive span."""
        try:
            module = ast.parse(file_text)
        except SyntaxError as exc:
            raise ParseError(str(exc))
        short = qualified_name.split(".")[-1]
        for node in ast.walk(module):
            if isinstance(node, (ast.FunctionDef, ast.AsyncFunctionDef)):
                if node.name == short:
                    start = node.lineno
                    if node.decorator_list:
                        start = min(d.lineno for d in node.decorator_list)
                    return (start, node.end_lineno)
        raise ParseError(f"function {qualified_name!r} not found")

    def negate_condition(self, condition: str) -> str:
        try:
            expr = ast.parse(condition, mode="eval").body
        except SyntaxError:
            return f"(not ({condition}))"
        if isinstance(expr, ast.Compare) and len(expr.ops) == 1:
            op = type(expr.ops[0])
            if op in _FLIP:
                left = ast.unparse(expr.left)
                right = ast.unparse(expr.comparators[0])
                return f"({left} {_FLIP[op]} {right})"
        return f"(not ({condition}))"


class _TreeBuilder:
    """Per-parse state; one instance per parse_fragment call."""

    def __init__(self, original: str, parsed: str):
        self._offsets = _Offsets(original, parsed)
        self._source = parsed

    def _span(self, node: ast.AST) -> tuple[int, int]:
        return (
            self._offsets.to_original(node.lineno, node.col_offset),
            self._offsets.to_original(node.end_lineno, node.end_col_offset),
        )

    def _src(self, node: ast.AST) -> str:
        lo = self._parsed_offset(node.lineno, node.col_offset)
        hi = self._parsed_offset(node.end_lineno, node.end_col_offset)
        return self._source[lo:hi]

    def _parsed_offset(self, lineno: int, col: int) -> int:
        return self._offsets.parsed_line_start[lineno - 1] + col

    def _parameters(self, func) -> SyntaxNode:
        names = []
        args = func.args
        for a in args.posonlyargs + args.args + args.kwonlyargs:
            names.append(a.arg)
        if args.vararg:
            names.append(args.vararg.arg)
        if args.kwarg:
            names.append(args.kwarg.arg)
        node = SyntaxNode(kind="parameters", span=self._span(func))
        node.text = ", ".join(names)
        for n in names:
            node.children.append(SyntaxNode(kind="parameter", span=node.span, text=n))
        return node

    def _block(self, stmts) -> SyntaxNode:
        if not stmts:
            return SyntaxNode(kind="block", span=(0, 0))
        span = (self._span(stmts[0])[0], self._span(stmts[-1])[1])
        block = SyntaxNode(kind="block", span=span)
        for stmt in stmts:
            block.children.extend(self._statement(stmt))
        return block

    def _statement(self, stmt) -> list[SyntaxNode]:
        if isinstance(stmt, ast.If):
            return [self._if(stmt)]
        if isinstance(stmt, ast.While):
            node = SyntaxNode(kind="while_statement", span=self._span(stmt))
            node.text = self._src(stmt.test)
            node.extra = {
                "header": f"while {node.text}:",
                "uses": self._names(stmt.test, loads=True),
                "defs": [],
            }
            node.children.append(self._block(stmt.body))
            out = [node]
            if stmt.orelse:
                out.append(self._block(stmt.orelse))
            return out
        if isinstance(stmt, (ast.For, ast.AsyncFor)):
            node = SyntaxNode(kind="for_statement", span=self._span(stmt))
            tgt = self._src(stmt.target)
            it = self._src(stmt.iter)
            node.text = f"{tgt} in {it}"
            node.extra = {
                "header": f"for {tgt} in {it}:",
                "defs": self._names(stmt.target, loads=False),
                "uses": self._names(stmt.iter, loads=True),
            }
            node.children.append(self._block(stmt.body))
            out = [node]
            if stmt.orelse:
                out.append(self._block(stmt.orelse))
            return out
        if isinstance(stmt, (ast.Try, getattr(ast, "TryStar", ast.Try))):
            node = SyntaxNode(kind="try_statement", span=self._span(stmt))
            node.children.append(self._block(stmt.body + stmt.orelse))
            for handler in stmt.handlers:
                clause = SyntaxNode(kind="catch_clause", span=self._span(handler))
                clause.text = self._src(handler.type) if handler.type else ""
                clause.extra = {"defs": [handler.name] if handler.name else []}
                clause.children.append(self._block(handler.body))
                node.children.append(clause)
            if stmt.finalbody:
                fin = SyntaxNode(kind="finally_clause", span=self._span(stmt))
                fin.children.append(self._block(stmt.finalbody))
                node.children.append(fin)
            return [node]
        if isinstance(stmt, ast.Return):
            node = SyntaxNode(kind="return_statement", span=self._span(stmt))
            node.text = self._src(stmt)
            uses = self._names(stmt.value, loads=True) if stmt.value else []
            node.extra = {"uses": uses, "defs": []}
            return [node]
        if isinstance(stmt, ast.Raise):
            node = SyntaxNode(kind="throw_statement", span=self._span(stmt))
            node.text = self._src(stmt)
            node.extra = {"uses": self._names(stmt, loads=True), "defs": []}
            return [node]
        if isinstance(stmt, (ast.Break, ast.Continue)):
            kind = "break_statement" if isinstance(stmt, ast.Break) else "continue_statement"
            node = SyntaxNode(kind=kind, span=self._span(stmt))
            node.text = self._src(stmt)
            return [node]
        if isinstance(stmt, ast.Match):
            node = SyntaxNode(kind="switch_statement", span=self._span(stmt))
            node.text = self._src(stmt.subject)
            node.extra = {
                "header": f"match {node.text}:",
                "uses": self._names(stmt.subject, loads=True),
                "defs": [],
            }
            for case in stmt.cases:
                clause = SyntaxNode(kind="case_clause", span=self._span(case))
                clause.text = self._src(case.pattern)
                clause.extra = {"defs": self._pattern_names(case.pattern)}
                clause.children.append(self._block(case.body))
                node.children.append(clause)
            return [node]
        if isinstance(stmt, (ast.With, ast.AsyncWith)):
            head = SyntaxNode(kind="simple_statement", span=self._span(stmt))
            head.text = "with " + ", ".join(self._src(i) for i in stmt.items) + ":"
            defs, uses = [], []
            for item in stmt.items:
                uses.extend(self._names(item.context_expr, loads=True))
                if item.optional_vars is not None:
                    defs.extend(self._names(item.optional_vars, loads=False))
            head.extra = {"defs": defs, "uses": uses}
            body = self._block(stmt.body)
            return [head] + body.children
        # plain statement (assignments, expression statements, asserts, ...)
        node = SyntaxNode(kind="simple_statement", span=self._span(stmt))
        node.text = self._src(stmt)
        defs, uses = self._stmt_defs_uses(stmt)
        node.extra = {"defs": defs, "uses": uses, "is_call": self._is_call(stmt)}
        return [node]

    def _if(self, stmt: ast.If) -> SyntaxNode:
        node = SyntaxNode(kind="if_statement", span=self._span(stmt))
        node.text = self._src(stmt.test)
        node.extra = {
            "header": f"if {node.text}:",
            "uses": self._names(stmt.test, loads=True),
            "defs": [],
        }
        node.children.append(self._block(stmt.body))
        if stmt.orelse:
            if len(stmt.orelse) == 1 and isinstance(stmt.orelse[0], ast.If):
                else_block = SyntaxNode(kind="block", span=self._span(stmt.orelse[0]))
                else_block.children.append(self._if(stmt.orelse[0]))
            else:
                else_block = self._block(stmt.orelse)
            node.children.append(else_block)
        return node

    # -- def/use extraction -----------------------------------------------

    def _stmt_defs_uses(self, stmt) -> tuple[list[str], list[str]]:
        if isinstance(stmt, ast.Assign):
            defs = []
            for t in stmt.targets:
                defs.extend(self._names(t, loads=False))
            uses = self._names(stmt.value, loads=True)
            for t in stmt.targets:
                uses.extend(self._names(t, loads=True))
            return defs, uses
        if isinstance(stmt, ast.AnnAssign):
            defs = self._names(stmt.target, loads=False)
            uses = self._names(stmt.value, loads=True) if stmt.value else []
            return defs, uses
        if isinstance(stmt, ast.AugAssign):
            defs = self._names(stmt.target, loads=False)
            uses = self._names(stmt.target, loads=True) + defs[:]
            uses.extend(self._names(stmt.value, loads=True))
            # compound assignment: the target is read before being rewritten
            return defs, _dedupe(uses)
        return [], self._names(stmt, loads=True)

    def _names(self, node, loads: bool) -> list[str]:
        """Identifiers in an expression; attribute/subscript accesses count
        against the base variable, call targets are skipped."""
        if node is None:
            return []
        out: list[str] = []

        def visit(n, store_ctx=False):
            if isinstance(n, ast.Name):
                is_store = isinstance(n.ctx, ast.Store) or store_ctx
                if loads and not is_store:
                    out.append(n.id)
                elif not loads and is_store:
                    out.append(n.id)
                return
            if isinstance(n, (ast.Attribute, ast.Subscript)):
                base = n.value
                while isinstance(base, (ast.Attribute, ast.Subscript)):
                    base = base.value
                if isinstance(base, ast.Name):
                    # mutation through a.b / a[i] reads the base binding
                    if loads:
                        out.append(base.id)
                    if isinstance(n, ast.Subscript):
                        visit(n.slice)
                    return
            if isinstance(n, ast.Call):
                if not isinstance(n.func, ast.Name):
                    visit(n.func)
                for a in n.args:
                    visit(a)
                for kw in n.keywords:
                    visit(kw.value)
                return
            for child in ast.iter_child_nodes(n):
                visit(child)

        visit(node)
        return _dedupe(out)

    def _pattern_names(self, pattern) -> list[str]:
        out = []
        for n in ast.walk(pattern):
            if isinstance(n, ast.MatchAs) and n.name:
                out.append(n.name)
            if isinstance(n, ast.MatchStar) and n.name:
                out.append(n.name)
        return _dedupe(out)

    def _is_call(self, stmt) -> bool:
        return isinstance(stmt, ast.Expr) and isinstance(stmt.value, ast.Call)


def _dedupe(names: list[str]) -> list[str]:
    seen = set()
    out = []
    for n in names:
        if n not in seen:
            seen.add(n)
            out.append(n)
    return out
