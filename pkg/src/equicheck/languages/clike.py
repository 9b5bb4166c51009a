"""Shared parser for the brace-delimited languages (Java, JavaScript, C, Go,
Rust).

Deliberately small: a tokenizer plus a statement-level recursive descent pass
that recovers just enough structure (branches, loops, returns, try/catch,
switch/match, def/use names) for graph construction. Expression grammar is not
modeled; expressions stay as token runs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import ParseError
from .model import FunctionFragment, SyntaxNode

_MULTI_OPS = [
    "<<=", ">>=", "===", "!==", "...", "..=", "::", "..",
    ":=", "==", "!=", "<=", ">=", "&&", "||", "->", "=>",
    "++", "--", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<", ">>",
]

_ASSIGN_OPS = {
    "=", ":=", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<=", ">>=",
}

_COMPARISON_FLIP = {">": "<=", "<": ">=", ">=": "<", "<=": ">", "==": "!=", "!=": "=="}

_OPEN = {"(": ")", "[": "]", "{": "}"}
_CLOSE = {")", "]", "}"}


@dataclass
class Tok:
    typ: str  # id | num | str | op
    val: str
    start: int
    end: int
    nl_before: bool = False


def tokenize(source: str, language: str) -> list[Tok]:
    toks: list[Tok] = []
    i = 0
    n = len(source)
    nl = False
    while i < n:
        ch = source[i]
        if ch in " \t\r":
            i += 1
            continue
        if ch == "\n":
            nl = True
            i += 1
            continue
        if ch == "/" and i + 1 < n and source[i + 1] == "/":
            while i < n and source[i] != "\n":
                i += 1
            continue
        if ch == "/" and i + 1 < n and source[i + 1] == "*":
            j = source.find("*/", i + 2)
            i = n if j < 0 else j + 2
            continue
        if ch in "\"`":
            j = _scan_string(source, i, ch)
            toks.append(Tok("str", source[i:j], i, j, nl))
            nl = False
            i = j
            continue
        if ch == "'":
            if language == "rust" and not _is_char_literal(source, i):
                # lifetime marker: consume 'ident
                j = i + 1
                while j < n and (source[j].isalnum() or source[j] == "_"):
                    j += 1
                toks.append(Tok("op", source[i:j], i, j, nl))
                nl = False
                i = j
                continue
            j = _scan_string(source, i, ch)
            toks.append(Tok("str", source[i:j], i, j, nl))
            nl = False
            i = j
            continue
        if ch.isdigit():
            j = i + 1
            while j < n and (source[j].isalnum() or source[j] in "._"):
                j += 1
            toks.append(Tok("num", source[i:j], i, j, nl))
            nl = False
            i = j
            continue
        if ch.isalpha() or ch == "_" or ch == "$":
            j = i + 1
            while j < n and (source[j].isalnum() or source[j] in "_$"):
                j += 1
            toks.append(Tok("id", source[i:j], i, j, nl))
            nl = False
            i = j
            continue
        matched = False
        for op in _MULTI_OPS:
            if source.startswith(op, i):
                toks.append(Tok("op", op, i, i + len(op), nl))
                i += len(op)
                matched = True
                break
        if matched:
            nl = False
            continue
        toks.append(Tok("op", ch, i, i + 1, nl))
        nl = False
        i += 1
    return toks


def _scan_string(source: str, i: int, quote: str) -> int:
    j = i + 1
    n = len(source)
    while j < n:
        if source[j] == "\\" and quote != "`":
            j += 2
            continue
        if source[j] == quote:
            return j + 1
        j += 1
    raise ParseError(f"unterminated string literal at offset {i}")


def _is_char_literal(source: str, i: int) -> bool:
    # 'x' or '\n' but not 'a (lifetime)
    if i + 2 < len(source) and source[i + 1] == "\\":
        k = source.find("'", i + 2)
        return 0 <= k <= i + 4
    return i + 2 < len(source) and source[i + 2] == "'"


@dataclass
class LangConfig:
    name: str
    keywords: set[str]
    paren_conditions: bool
    auto_semicolon: bool
    decl_keywords: set[str] = field(default_factory=set)
    type_keywords: set[str] = field(default_factory=set)
    has_try: bool = False
    has_throw: bool = False
    typed_decls: bool = False  # `Type name = ...` declarations (C, Java)


class CLikeParser:
    def __init__(self, config: LangConfig):
        self.cfg = config

    # -- entry points ------------------------------------------------------

    def parse(self, fragment: FunctionFragment) -> SyntaxNode:
        source = fragment.source_text
        if not source.strip():
            raise ParseError("empty fragment")
        self.source = source
        toks = tokenize(source, self.cfg.name)
        name, params, body_lo, body_hi = self._signature(toks)
        root = SyntaxNode(kind="function_definition", span=(0, len(source)))
        root.text = name
        pnode = SyntaxNode(kind="parameters", span=(0, len(source)))
        pnode.text = ", ".join(params)
        for p in params:
            pnode.children.append(SyntaxNode(kind="parameter", span=pnode.span, text=p))
        root.children.append(pnode)
        body = toks[body_lo:body_hi]
        block = SyntaxNode(kind="block", span=self._span(body))
        block.children = self._statements(body)
        root.children.append(block)
        trailing = toks[body_hi + 1 :]
        if trailing:
            raise ParseError("fragment must contain exactly one function definition")
        return root

    def find_function(self, file_text: str, qualified_name: str):
        short = qualified_name.split(".")[-1].split("::")[-1]
        toks = tokenize(file_text, self.cfg.name)
        for idx, t in enumerate(toks):
            if t.typ != "id" or t.val != short:
                continue
            if idx + 1 >= len(toks) or toks[idx + 1].val != "(":
                continue
            close = _match(toks, idx + 1)
            if close is None:
                continue
            j = close + 1
            while j < len(toks) and toks[j].val != "{" and toks[j].val not in (";", "="):
                j += 1
            if j >= len(toks) or toks[j].val != "{":
                continue
            end = _match(toks, j)
            if end is None:
                continue
            start_line = file_text.count("\n", 0, toks[idx].start) + 1
            # pull the signature's opening keyword/type onto the start line
            k = idx
            while k > 0 and not toks[k].nl_before:
                k -= 1
            start_line = file_text.count("\n", 0, toks[k].start) + 1
            end_line = file_text.count("\n", 0, toks[end].start) + 1
            return (start_line, end_line)
        raise ParseError(f"function {qualified_name!r} not found")

    def negate_condition(self, condition: str) -> str:
        toks = tokenize(condition, self.cfg.name)
        depth = 0
        for idx, t in enumerate(toks):
            if t.val in _OPEN:
                depth += 1
            elif t.val in _CLOSE:
                depth -= 1
            elif depth == 0 and t.val in _COMPARISON_FLIP:
                if any(
                    u.val in ("&&", "||") for u in toks if u.val in ("&&", "||")
                ):
                    break
                left = condition[: t.start].strip()
                right = condition[t.end :].strip()
                return f"({left} {_COMPARISON_FLIP[t.val]} {right})"
        return f"(!({condition}))"

    # -- signature ---------------------------------------------------------

    def _signature(self, toks: list[Tok]):
        """Returns (name, param_names, body_start_idx, body_end_idx) where the
        body indices delimit the tokens inside the outermost braces."""
        lang = self.cfg.name
        i = 0
        receiver: list[str] = []
        if lang == "go":
            while i < len(toks) and toks[i].val != "func":
                i += 1
            if i == len(toks):
                raise ParseError("no `func` keyword found")
            i += 1
            if i < len(toks) and toks[i].val == "(":  # method receiver
                close = self._require_match(toks, i)
                receiver = self._param_names(toks[i + 1 : close])
                i = close + 1
        elif lang == "rust":
            while i < len(toks) and toks[i].val != "fn":
                i += 1
            if i == len(toks):
                raise ParseError("no `fn` keyword found")
            i += 1
        # locate the name: first identifier directly followed by a paren group
        # that is eventually followed by `{`
        name_idx = None
        j = i
        depth = 0
        while j < len(toks) - 1:
            t = toks[j]
            if t.val in _OPEN:
                depth += 1
            elif t.val in _CLOSE:
                depth -= 1
            elif (
                depth == 0
                and t.typ == "id"
                and t.val not in self.cfg.keywords
                and toks[j + 1].val == "("
            ):
                close = _match(toks, j + 1)
                if close is not None and self._body_follows(toks, close + 1):
                    name_idx = j
                    break
            j += 1
        if name_idx is None:
            # anonymous js function / arrow function
            if lang == "javascript":
                return self._js_anonymous(toks)
            raise ParseError("could not locate a function signature")
        open_paren = name_idx + 1
        close_paren = self._require_match(toks, open_paren)
        params = receiver + self._param_names(toks[open_paren + 1 : close_paren])
        body_open = self._find_body_open(toks, close_paren + 1)
        body_close = self._require_match(toks, body_open)
        return toks[name_idx].val, params, body_open + 1, body_close

    def _js_anonymous(self, toks: list[Tok]):
        for j, t in enumerate(toks):
            if t.val == "(":
                close = _match(toks, j)
                if close is not None and close + 1 < len(toks) and toks[close + 1].val in ("=>", "{"):
                    k = close + 1
                    if toks[k].val == "=>":
                        k += 1
                    if k < len(toks) and toks[k].val == "{":
                        end = self._require_match(toks, k)
                        params = self._param_names(toks[j + 1 : close])
                        return "<anonymous>", params, k + 1, end
        raise ParseError("could not locate a function signature")

    def _body_follows(self, toks: list[Tok], i: int) -> bool:
        depth = 0
        while i < len(toks):
            v = toks[i].val
            if v == "{" and depth == 0:
                return True
            if v in (";",) and depth == 0:
                return False
            if v in _OPEN:
                depth += 1
            elif v in _CLOSE:
                if depth == 0:
                    return False
                depth -= 1
            i += 1
        return False

    def _find_body_open(self, toks: list[Tok], i: int) -> int:
        depth = 0
        while i < len(toks):
            v = toks[i].val
            if v == "{" and depth == 0:
                return i
            if v in _OPEN:
                depth += 1
            elif v in _CLOSE:
                depth -= 1
            i += 1
        raise ParseError("function body not found")

    def _require_match(self, toks: list[Tok], i: int) -> int:
        close = _match(toks, i)
        if close is None:
            raise ParseError(f"unbalanced {toks[i].val!r} at offset {toks[i].start}")
        return close

    def _param_names(self, toks: list[Tok]) -> list[str]:
        parts = _split_top(toks, ",")
        names = []
        for part in parts:
            name = self._one_param_name(part)
            if name:
                names.append(name)
        return names

    def _one_param_name(self, part: list[Tok]):
        lang = self.cfg.name
        ids = [t for t in part if t.typ == "id" and t.val not in self.cfg.keywords]
        if not part:
            return None
        if lang == "rust":
            vals = [t.val for t in part]
            if "self" in vals:
                return "self"
            for idx, t in enumerate(part):
                if t.val == ":" :
                    prior = [u for u in part[:idx] if u.typ == "id" and u.val != "mut"]
                    if prior:
                        return prior[-1].val
            return ids[0].val if ids else None
        if lang == "go":
            return part[0].val if part[0].typ == "id" else None
        if lang == "javascript":
            for idx, t in enumerate(part):
                if t.val == "=":
                    part = part[:idx]
                    break
            ids = [t for t in part if t.typ == "id"]
            return ids[0].val if ids else None
        # java / c: the declared name is the last identifier, ignoring any
        # trailing array brackets
        while part and part[-1].val in ("]", "["):
            part = part[:-1]
        ids = [t for t in part if t.typ == "id" and t.val not in self.cfg.keywords]
        if not ids:
            # `void` parameter list or unnamed param
            return None
        if len(ids) == 1 and self.cfg.typed_decls and part[-1].typ != "id":
            return None
        return ids[-1].val

    # -- statements --------------------------------------------------------

    def _statements(self, toks: list[Tok]) -> list[SyntaxNode]:
        out: list[SyntaxNode] = []
        i = 0
        while i < len(toks):
            node, i = self._statement(toks, i)
            if node is not None:
                if isinstance(node, list):
                    out.extend(node)
                else:
                    out.append(node)
        return out

    def _statement(self, toks: list[Tok], i: int):
        t = toks[i]
        v = t.val
        lang = self.cfg.name
        if v == ";":
            return None, i + 1
        if v == "{":
            close = self._require_match(toks, i)
            return self._statements(toks[i + 1 : close]), close + 1
        if v == "if":
            return self._if(toks, i)
        if v == "while":
            cond, body_i = self._condition(toks, i + 1)
            block, nxt = self._embedded_block(toks, body_i)
            node = SyntaxNode(kind="while_statement", span=(t.start, self._end(toks, nxt)))
            node.text = self._text(cond)
            node.extra = {
                "header": self._header("while", cond),
                "uses": self._expr_uses(cond),
                "defs": [],
            }
            node.children.append(block)
            return node, nxt
        if v == "do" and lang in ("java", "javascript", "c"):
            block, j = self._embedded_block(toks, i + 1)
            # expect: while ( cond ) ;
            if j < len(toks) and toks[j].val == "while":
                cond, j = self._condition(toks, j + 1)
                if j < len(toks) and toks[j].val == ";":
                    j += 1
            else:
                cond = []
            node = SyntaxNode(kind="do_statement", span=(t.start, self._end(toks, j)))
            node.text = self._text(cond)
            node.extra = {
                "header": self._header("do-while", cond),
                "uses": self._expr_uses(cond),
                "defs": [],
            }
            node.children.append(block)
            return node, j
        if v == "for" or (v == "loop" and lang == "rust"):
            return self._for(toks, i)
        if v == "switch" and lang in ("java", "javascript", "c", "go"):
            return self._switch(toks, i)
        if v == "match" and lang == "rust" and self._is_match_statement(toks, i):
            return self._match_expr(toks, i)
        if v == "try" and self.cfg.has_try:
            return self._try(toks, i)
        if v == "return":
            end = self._terminator(toks, i + 1)
            node = SyntaxNode(kind="return_statement", span=(t.start, self._end(toks, end)))
            node.text = self._text(toks[i:end])
            node.extra = {"uses": self._expr_uses(toks[i + 1 : end]), "defs": []}
            return node, self._after_terminator(toks, end)
        if v == "throw" and self.cfg.has_throw:
            end = self._terminator(toks, i + 1)
            node = SyntaxNode(kind="throw_statement", span=(t.start, self._end(toks, end)))
            node.text = self._text(toks[i:end])
            node.extra = {"uses": self._expr_uses(toks[i + 1 : end]), "defs": []}
            return node, self._after_terminator(toks, end)
        if v in ("break", "continue"):
            end = self._terminator(toks, i + 1)
            kind = "break_statement" if v == "break" else "continue_statement"
            node = SyntaxNode(kind=kind, span=(t.start, self._end(toks, end)))
            node.text = self._text(toks[i:end])
            return node, self._after_terminator(toks, end)
        if v == "else":
            # dangling else (shouldn't happen); skip defensively
            return None, i + 1
        return self._simple(toks, i)

    def _is_match_statement(self, toks: list[Tok], i: int) -> bool:
        # `match x { ... }` used as a statement, not `let y = match ...`
        return i == 0 or toks[i - 1].val in (";", "{", "}")

    def _if(self, toks: list[Tok], i: int):
        start = toks[i].start
        cond, body_i = self._condition(toks, i + 1)
        then_block, j = self._embedded_block(toks, body_i)
        node = SyntaxNode(kind="if_statement", span=(start, self._end(toks, j)))
        node.text = self._text(cond)
        node.extra = {
            "header": self._header("if", cond),
            "uses": self._expr_uses(cond),
            "defs": [],
        }
        node.children.append(then_block)
        if j < len(toks) and toks[j].val == "else":
            j += 1
            if j < len(toks) and toks[j].val == "if":
                nested, j = self._if(toks, j)
                else_block = SyntaxNode(kind="block", span=nested.span)
                else_block.children.append(nested)
            else:
                else_block, j = self._embedded_block(toks, j)
            node.children.append(else_block)
            node.span = (start, else_block.span[1])
        return node, j

    def _for(self, toks: list[Tok], i: int):
        t = toks[i]
        lang = self.cfg.name
        if t.val == "loop":  # rust infinite loop
            block, j = self._embedded_block(toks, i + 1)
            node = SyntaxNode(kind="for_statement", span=(t.start, self._end(toks, j)))
            node.text = ""
            node.extra = {"header": "loop", "uses": [], "defs": [], "infinite": True}
            node.children.append(block)
            return node, j
        if self.cfg.paren_conditions:
            header, body_i = self._condition(toks, i + 1)
        else:
            header, body_i = self._to_body_open(toks, i + 1)
        block, j = self._embedded_block(toks, body_i)
        node = SyntaxNode(kind="for_statement", span=(t.start, self._end(toks, j)))
        node.text = self._text(header)
        defs, uses = self._for_header_defs_uses(header)
        node.extra = {
            "header": self._header("for", header),
            "defs": defs,
            "uses": uses,
            "infinite": not header,
        }
        node.children.append(block)
        return node, j

    def _for_header_defs_uses(self, header: list[Tok]):
        clauses = _split_top(header, ";")
        if len(clauses) == 3:  # C-style init; cond; post
            init, cond, post = clauses
            defs = self._lhs_defs(init)
            uses = self._expr_uses(cond) + self._expr_uses(post) + self._rhs_uses(init)
            return defs, _dedupe([u for u in uses if u not in defs])
        # range/in forms: `for x in it` (rust), `for k, v := range m` (go),
        # `for (x of arr)` (js)
        for kw in ("in", "of"):
            idx = _find_top(header, kw)
            if idx is not None:
                defs = [u.val for u in header[:idx] if u.typ == "id" and u.val not in self.cfg.keywords]
                uses = self._expr_uses(header[idx + 1 :])
                return _dedupe(defs), uses
        idx = _find_top(header, ":=")
        if idx is None:
            idx = _find_top(header, "=")
        if idx is not None:
            defs = [u.val for u in header[:idx] if u.typ == "id" and u.val not in self.cfg.keywords]
            uses = self._expr_uses(header[idx + 1 :])
            return _dedupe(defs), uses
        return [], self._expr_uses(header)

    def _switch(self, toks: list[Tok], i: int):
        t = toks[i]
        if self.cfg.paren_conditions and toks[i + 1].val == "(":
            subject, body_i = self._condition(toks, i + 1)
        else:
            subject, body_i = self._to_body_open(toks, i + 1)
        if body_i >= len(toks) or toks[body_i].val != "{":
            raise ParseError("switch body not found")
        close = self._require_match(toks, body_i)
        inner = toks[body_i + 1 : close]
        node = SyntaxNode(kind="switch_statement", span=(t.start, self._end(toks, close + 1)))
        node.text = self._text(subject)
        node.extra = {
            "header": self._header("switch", subject),
            "uses": self._expr_uses(subject),
            "defs": [],
        }
        for label, body in self._case_groups(inner):
            clause = SyntaxNode(kind="case_clause", span=self._span(body) if body else node.span)
            clause.text = label
            clause.extra = {"defs": []}
            block = SyntaxNode(kind="block", span=self._span(body) if body else node.span)
            block.children = self._statements(body)
            clause.children.append(block)
            node.children.append(clause)
        return node, close + 1

    def _case_groups(self, toks: list[Tok]):
        groups = []
        i = 0
        current_label = None
        current: list[Tok] = []
        depth = 0
        while i < len(toks):
            t = toks[i]
            if depth == 0 and t.val in ("case", "default"):
                if current_label is not None:
                    groups.append((current_label, current))
                if t.val == "default":
                    current_label = "default"
                    i += 1
                    if i < len(toks) and toks[i].val == ":":
                        i += 1
                else:
                    j = i + 1
                    d = 0
                    while j < len(toks) and not (d == 0 and toks[j].val == ":"):
                        if toks[j].val in _OPEN:
                            d += 1
                        elif toks[j].val in _CLOSE:
                            d -= 1
                        j += 1
                    current_label = self._text(toks[i + 1 : j])
                    i = j + 1
                current = []
                continue
            if t.val in _OPEN:
                depth += 1
            elif t.val in _CLOSE:
                depth -= 1
            current.append(t)
            i += 1
        if current_label is not None:
            groups.append((current_label, current))
        return groups

    def _match_expr(self, toks: list[Tok], i: int):
        t = toks[i]
        subject, body_i = self._to_body_open(toks, i + 1)
        close = self._require_match(toks, body_i)
        inner = toks[body_i + 1 : close]
        node = SyntaxNode(kind="switch_statement", span=(t.start, self._end(toks, close + 1)))
        node.text = self._text(subject)
        node.extra = {
            "header": self._header("match", subject),
            "uses": self._expr_uses(subject),
            "defs": [],
        }
        j = 0
        while j < len(inner):
            arrow = _find_top(inner[j:], "=>")
            if arrow is None:
                break
            arrow += j
            pattern = inner[j:arrow]
            clause = SyntaxNode(kind="case_clause", span=self._span(pattern) if pattern else node.span)
            clause.text = self._text(pattern)
            clause.extra = {"defs": self._pattern_defs(pattern)}
            k = arrow + 1
            if k < len(inner) and inner[k].val == "{":
                end = _match(inner, k)
                if end is None:
                    raise ParseError("unbalanced match arm")
                body = inner[k + 1 : end]
                j = end + 1
                if j < len(inner) and inner[j].val == ",":
                    j += 1
            else:
                d = 0
                end = k
                while end < len(inner) and not (d == 0 and inner[end].val == ","):
                    if inner[end].val in _OPEN:
                        d += 1
                    elif inner[end].val in _CLOSE:
                        d -= 1
                    end += 1
                body = inner[k:end]
                j = end + 1
            block = SyntaxNode(kind="block", span=self._span(body) if body else clause.span)
            block.children = self._statements(body) if body else []
            clause.children.append(block)
            node.children.append(clause)
        return node, close + 1

    def _pattern_defs(self, pattern: list[Tok]) -> list[str]:
        # bindings introduced by a match pattern: plain lowercase idents that
        # are not enum paths (Foo::Bar) or literals
        out = []
        for idx, t in enumerate(pattern):
            if t.typ != "id" or t.val in self.cfg.keywords or t.val == "_":
                continue
            if idx > 0 and pattern[idx - 1].val in (".", "::"):
                continue
            if idx + 1 < len(pattern) and pattern[idx + 1].val in ("::", "("):
                continue
            if t.val[0].isupper():
                continue
            out.append(t.val)
        return _dedupe(out)

    def _try(self, toks: list[Tok], i: int):
        t = toks[i]
        block, j = self._embedded_block(toks, i + 1)
        node = SyntaxNode(kind="try_statement", span=(t.start, self._end(toks, j)))
        node.children.append(block)
        while j < len(toks) and toks[j].val == "catch":
            j += 1
            exc_var: list[str] = []
            exc_text = ""
            if j < len(toks) and toks[j].val == "(":
                close = self._require_match(toks, j)
                inner = toks[j + 1 : close]
                exc_text = self._text(inner)
                ids = [u for u in inner if u.typ == "id" and u.val not in self.cfg.keywords]
                if ids:
                    exc_var = [ids[-1].val]
                j = close + 1
            cblock, j = self._embedded_block(toks, j)
            clause = SyntaxNode(kind="catch_clause", span=cblock.span)
            clause.text = exc_text
            clause.extra = {"defs": exc_var}
            clause.children.append(cblock)
            node.children.append(clause)
        if j < len(toks) and toks[j].val == "finally":
            fblock, j = self._embedded_block(toks, j + 1)
            fin = SyntaxNode(kind="finally_clause", span=fblock.span)
            fin.children.append(fblock)
            node.children.append(fin)
        node.span = (t.start, node.children[-1].span[1])
        return node, j

    def _simple(self, toks: list[Tok], i: int):
        end = self._terminator(toks, i)
        if end == i:
            return None, i + 1
        stmt = toks[i:end]
        node = SyntaxNode(kind="simple_statement", span=(stmt[0].start, stmt[-1].end))
        node.text = self._text(stmt)
        defs = self._lhs_defs(stmt)
        uses = self._rhs_uses(stmt)
        node.extra = {
            "defs": defs,
            "uses": uses,
            "is_call": self._is_call(stmt),
        }
        return node, self._after_terminator(toks, end)

    # -- helpers -----------------------------------------------------------

    def _condition(self, toks: list[Tok], i: int):
        """Condition token run and the index where the body starts."""
        if self.cfg.paren_conditions:
            if i >= len(toks) or toks[i].val != "(":
                raise ParseError("expected parenthesized condition")
            close = self._require_match(toks, i)
            return toks[i + 1 : close], close + 1
        return self._to_body_open(toks, i)

    def _to_body_open(self, toks: list[Tok], i: int):
        depth = 0
        j = i
        while j < len(toks):
            v = toks[j].val
            if v == "{" and depth == 0:
                return toks[i:j], j
            if v in _OPEN:
                depth += 1
            elif v in _CLOSE:
                depth -= 1
            j += 1
        raise ParseError("expected `{` to open a body")

    def _embedded_block(self, toks: list[Tok], i: int):
        """A braced block, or (C/Java/JS) a single unbraced statement."""
        if i < len(toks) and toks[i].val == "{":
            close = self._require_match(toks, i)
            inner = toks[i + 1 : close]
            block = SyntaxNode(kind="block", span=self._span(inner) if inner else (toks[i].start, toks[close].end))
            block.children = self._statements(inner)
            return block, close + 1
        node, nxt = self._statement(toks, i)
        block = SyntaxNode(kind="block", span=node.span if node and not isinstance(node, list) else self._span(toks[i:nxt]))
        if node is not None:
            if isinstance(node, list):
                block.children = node
            else:
                block.children = [node]
        return block, nxt

    def _terminator(self, toks: list[Tok], i: int) -> int:
        """Index one past the last token of the statement (excl. the `;`)."""
        depth = 0
        j = i
        while j < len(toks):
            t = toks[j]
            v = t.val
            if depth == 0:
                if v == ";":
                    return j
                if v == "}" or v == "{":
                    return j
                if (
                    self.cfg.auto_semicolon
                    and j > i
                    and t.nl_before
                    and _ends_statement(toks[j - 1])
                ):
                    return j
            if v in _OPEN:
                depth += 1
            elif v in _CLOSE:
                if depth == 0:
                    return j
                depth -= 1
            j += 1
        return j

    def _after_terminator(self, toks: list[Tok], end: int) -> int:
        if end < len(toks) and toks[end].val == ";":
            return end + 1
        return end

    def _lhs_defs(self, stmt: list[Tok]) -> list[str]:
        if not stmt:
            return []
        idx = self._assign_index(stmt)
        lhs = stmt[:idx] if idx is not None else stmt
        has_decl_kw = any(t.val in self.cfg.decl_keywords for t in lhs)
        if idx is None and not has_decl_kw:
            if self.cfg.typed_decls and self._looks_like_decl(stmt):
                ids = [t for t in stmt if t.typ == "id" and t.val not in self.cfg.keywords]
                return [ids[-1].val] if ids else []
            return []
        out = []
        for k, t in enumerate(lhs):
            if t.typ != "id" or t.val in self.cfg.keywords:
                continue
            if k > 0 and lhs[k - 1].val in (".", "::", "->"):
                continue
            if k + 1 < len(lhs) and lhs[k + 1].val in ("(", "[", ".", "::", "->"):
                continue
            if (
                self.cfg.typed_decls
                and k + 1 < len(lhs)
                and lhs[k + 1].typ == "id"
            ):
                continue  # type name before the declared identifier
            out.append(t.val)
        return _dedupe(out)

    def _looks_like_decl(self, stmt: list[Tok]) -> bool:
        # `int x;` / `struct foo *p;` style declarations without initializer
        ids = [t for t in stmt if t.typ == "id"]
        if len(ids) < 2:
            return False
        return all(t.typ == "id" or t.val in ("*", "[", "]", ",") for t in stmt)

    def _rhs_uses(self, stmt: list[Tok]) -> list[str]:
        idx = self._assign_index(stmt)
        if idx is None:
            return self._expr_uses(stmt)
        op = stmt[idx].val
        uses = self._expr_uses(stmt[idx + 1 :])
        # mutations through a.b / a[i] on the LHS read the base binding, and
        # compound assignment reads the target first
        lhs_reads = []
        for k, t in enumerate(stmt[:idx]):
            if t.typ != "id" or t.val in self.cfg.keywords:
                continue
            if k + 1 < idx and stmt[k + 1].val in (".", "[", "->"):
                lhs_reads.append(t.val)
            elif op not in ("=", ":=") and not (
                k > 0 and stmt[k - 1].val in (".", "::", "->")
            ):
                lhs_reads.append(t.val)
            index_expr = k > 0 and stmt[k - 1].val == "["
            if index_expr:
                lhs_reads.append(t.val)
        return _dedupe(lhs_reads + uses)

    def _expr_uses(self, toks: list[Tok]) -> list[str]:
        out = []
        for k, t in enumerate(toks):
            if t.typ != "id" or t.val in self.cfg.keywords:
                continue
            if k > 0 and toks[k - 1].val in (".", "::", "->"):
                continue
            if k + 1 < len(toks) and toks[k + 1].val == "(":
                continue  # call target
            if k + 1 < len(toks) and toks[k + 1].val == ":" and self.cfg.name != "go":
                continue  # labels / struct fields
            if (
                self.cfg.typed_decls
                and k + 1 < len(toks)
                and toks[k + 1].typ == "id"
            ):
                continue  # type position
            if t.val[0].isupper() and k + 1 < len(toks) and toks[k + 1].val == "::":
                continue
            out.append(t.val)
        return _dedupe(out)

    def _assign_index(self, stmt: list[Tok]):
        depth = 0
        for k, t in enumerate(stmt):
            if t.val in _OPEN:
                depth += 1
            elif t.val in _CLOSE:
                depth -= 1
            elif depth == 0 and t.val in _ASSIGN_OPS:
                return k
        return None

    def _is_call(self, stmt: list[Tok]) -> bool:
        if self._assign_index(stmt) is not None:
            return False
        k = 0
        while k + 1 < len(stmt) and stmt[k].typ == "id" and stmt[k + 1].val in (".", "::", "->"):
            k += 2
        if k >= len(stmt) or stmt[k].typ != "id":
            return False
        if k + 1 < len(stmt) and stmt[k + 1].val == "!":  # macro invocation
            k += 1
        if k + 1 >= len(stmt) or stmt[k + 1].val != "(":
            return False
        close = _match(stmt, k + 1)
        return close is not None and close >= len(stmt) - 2

    def _header(self, keyword: str, cond: list[Tok]) -> str:
        text = self._text(cond)
        if self.cfg.paren_conditions and keyword != "do-while":
            return f"{keyword} ({text})"
        return f"{keyword} {text}".rstrip()

    def _text(self, toks: list[Tok]) -> str:
        if not toks:
            return ""
        return self.source[toks[0].start : toks[-1].end]

    def _span(self, toks: list[Tok]) -> tuple[int, int]:
        if not toks:
            return (0, 0)
        return (toks[0].start, toks[-1].end)

    def _end(self, toks: list[Tok], i: int) -> int:
        if i - 1 >= 0 and i - 1 < len(toks):
            return toks[i - 1].end
        return toks[-1].end if toks else 0


def _match(toks: list[Tok], i: int):
    """Index of the bracket matching toks[i], or None."""
    open_ch = toks[i].val
    close_ch = _OPEN.get(open_ch)
    if close_ch is None:
        return None
    depth = 0
    for j in range(i, len(toks)):
        v = toks[j].val
        if v == open_ch:
            depth += 1
        elif v == close_ch:
            depth -= 1
            if depth == 0:
                return j
    return None


def _split_top(toks: list[Tok], sep: str) -> list[list[Tok]]:
    parts: list[list[Tok]] = []
    current: list[Tok] = []
    depth = 0
    for t in toks:
        if t.val in _OPEN:
            depth += 1
        elif t.val in _CLOSE:
            depth -= 1
        if depth == 0 and t.val == sep:
            parts.append(current)
            current = []
        else:
            current.append(t)
    if current or parts:
        parts.append(current)
    return [p for p in parts if p]


def _find_top(toks: list[Tok], val: str):
    depth = 0
    for k, t in enumerate(toks):
        if t.val in _OPEN:
            depth += 1
        elif t.val in _CLOSE:
            depth -= 1
        elif depth == 0 and t.val == val:
            return k
    return None


def _ends_statement(tok: Tok) -> bool:
    if tok.typ in ("id", "num", "str"):
        return tok.val not in (
            "if", "else", "for", "while", "switch", "case", "return", "func",
            "var", "const", "let", "type", "go", "defer", "range", "in",
        )
    return tok.val in (")", "]", "}", "++", "--")


def _dedupe(names: list[str]) -> list[str]:
    seen = set()
    out = []
    for n in names:
        if n not in seen:
            seen.add(n)
            out.append(n)
    return out
