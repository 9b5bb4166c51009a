"""Control-flow graph construction, abstraction, and textual rendering.

Basic-block granularity: consecutive simple statements collapse into one
STATEMENT node. Node ids are dense and assigned in source order, with the
PARAMETERS node fixed at id 0 and ENTRY at id 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from .errors import ParseError
from .languages import FunctionFragment, get_adapter, parse_fragment
from .languages.model import SyntaxNode


class NodeKind(str, Enum):
    PARAMETERS = "PARAMETERS"
    ENTRY = "ENTRY"
    EXIT = "EXIT"
    CONDITION = "CONDITION"
    LOOP_HEADER = "LOOP_HEADER"
    STATEMENT = "STATEMENT"
    RETURN = "RETURN"
    THROW = "THROW"
    EXCEPTION_HANDLER = "EXCEPTION_HANDLER"
    SWITCH = "SWITCH"
    BREAK_CONTINUE = "BREAK_CONTINUE"
    CALL_STMT = "CALL_STMT"


class EdgeKind(str, Enum):
    SEQUENTIAL = "SEQUENTIAL"
    TRUE_BRANCH = "TRUE_BRANCH"
    FALSE_BRANCH = "FALSE_BRANCH"
    LOOP_BACK = "LOOP_BACK"
    LOOP_EXIT = "LOOP_EXIT"
    EXCEPTION_FLOW = "EXCEPTION_FLOW"
    CASE_BRANCH = "CASE_BRANCH"


@dataclass
class CfgNode:
    id: int
    kind: NodeKind
    text: str
    syntax: list[SyntaxNode] = field(default_factory=list, repr=False)


@dataclass
class CfgEdge:
    src: int
    dst: int
    kind: EdgeKind
    label: Optional[str] = None


@dataclass
class Cfg:
    nodes: list[CfgNode]
    edges: list[CfgEdge]
    entry_id: int
    parameters_id: Optional[int]
    warnings: list[str] = field(default_factory=list)

    def node(self, node_id: int) -> CfgNode:
        return self.nodes[node_id]

    def successors(self, node_id: int) -> list[CfgEdge]:
        return [e for e in self.edges if e.src == node_id]

    def to_dict(self) -> dict:
        return {
            "nodes": [[n.id, n.kind.value, n.text] for n in self.nodes],
            "edges": [[e.src, e.dst, e.kind.value, e.label] for e in self.edges],
            "entry_id": self.entry_id,
            "parameters_id": self.parameters_id,
        }


@dataclass(frozen=True)
class AbstractGraph:
    node_types: frozenset[NodeKind]
    edge_triples: frozenset[tuple[NodeKind, EdgeKind, NodeKind]]


# a dangling out-edge waiting for its destination node
_Pending = tuple[int, EdgeKind, Optional[str]]


class _Context:
    def __init__(self):
        # stacks of collectors; break targets receive pending edges that jump
        # past the innermost loop/switch, continue targets jump to the header
        self.break_stack: list[list[_Pending]] = []
        self.continue_stack: list[int] = []
        self.try_stack: list[list[int]] = []


class _Builder:
    def __init__(self, fragment: FunctionFragment):
        self.fragment = fragment
        self.adapter = get_adapter(fragment.language)
        self.nodes: list[CfgNode] = []
        self.edges: list[CfgEdge] = []
        self.warnings: list[str] = []

    def build(self, root: SyntaxNode) -> Cfg:
        params = next(c for c in root.children if c.kind == "parameters")
        body = next(c for c in root.children if c.kind == "block")
        ptext = ", ".join(f"parameter: {p.text}" for p in params.children)
        pid = self.new_node(NodeKind.PARAMETERS, ptext, [params])
        entry = self.new_node(NodeKind.ENTRY, "")
        self.edge(pid, entry, EdgeKind.SEQUENTIAL)
        ctx = _Context()
        self._ctx = ctx
        frontier = self.block(body, [(entry, EdgeKind.SEQUENTIAL, None)], ctx)
        if frontier:
            exit_id = self.new_node(NodeKind.EXIT, "")
            self.connect(frontier, exit_id)
        return Cfg(self.nodes, self.edges, entry, pid, self.warnings)

    # -- plumbing ----------------------------------------------------------

    def new_node(self, kind: NodeKind, text: str, syntax=None) -> int:
        node = CfgNode(len(self.nodes), kind, text, syntax or [])
        self.nodes.append(node)
        return node.id

    def edge(self, src, dst, kind, label=None):
        self.edges.append(CfgEdge(src, dst, kind, label))

    def connect(self, frontier: list[_Pending], dst: int):
        for src, kind, label in frontier:
            self.edge(src, dst, kind, label)

    def in_try(self, node_id: int):
        for collector in self._ctx.try_stack:
            collector.append(node_id)

    # -- structure ---------------------------------------------------------

    def block(self, block: SyntaxNode, frontier, ctx: _Context):
        pending: list[SyntaxNode] = []
        for child in block.children:
            if not frontier and not pending:
                self.warnings.append(
                    f"unreachable code dropped: {child.text or child.kind!r}"
                )
                continue
            if child.kind == "simple_statement":
                pending.append(child)
                continue
            frontier = self.flush(pending, frontier)
            pending = []
            frontier = self.statement(child, frontier, ctx)
        return self.flush(pending, frontier)

    def flush(self, pending: list[SyntaxNode], frontier):
        if not pending:
            return frontier
        if len(pending) == 1 and pending[0].extra.get("is_call"):
            kind = NodeKind.CALL_STMT
        else:
            kind = NodeKind.STATEMENT
        text = "\n".join(s.text for s in pending)
        nid = self.new_node(kind, text, list(pending))
        self.connect(frontier, nid)
        self.in_try(nid)
        return [(nid, EdgeKind.SEQUENTIAL, None)]

    def statement(self, node: SyntaxNode, frontier, ctx: _Context):
        kind = node.kind
        if kind == "if_statement":
            return self.if_stmt(node, frontier, ctx)
        if kind in ("while_statement", "for_statement", "do_statement"):
            return self.loop(node, frontier, ctx)
        if kind == "switch_statement":
            return self.switch(node, frontier, ctx)
        if kind == "try_statement":
            return self.try_stmt(node, frontier, ctx)
        if kind == "return_statement":
            nid = self.new_node(NodeKind.RETURN, node.text, [node])
            self.connect(frontier, nid)
            self.in_try(nid)
            return []
        if kind == "throw_statement":
            nid = self.new_node(NodeKind.THROW, node.text, [node])
            self.connect(frontier, nid)
            self.in_try(nid)
            return []
        if kind in ("break_statement", "continue_statement"):
            nid = self.new_node(NodeKind.BREAK_CONTINUE, node.text, [node])
            self.connect(frontier, nid)
            self.in_try(nid)
            if kind == "break_statement" and ctx.break_stack:
                ctx.break_stack[-1].append((nid, EdgeKind.SEQUENTIAL, None))
            elif kind == "continue_statement" and ctx.continue_stack:
                self.edge(nid, ctx.continue_stack[-1], EdgeKind.LOOP_BACK)
            return []
        if kind == "block":
            return self.block(node, frontier, ctx)
        # anything unmapped degrades to a STATEMENT node
        self.warnings.append(f"construct {kind!r} mapped to STATEMENT")
        nid = self.new_node(NodeKind.STATEMENT, node.text, [node])
        self.connect(frontier, nid)
        self.in_try(nid)
        return [(nid, EdgeKind.SEQUENTIAL, None)]

    def if_stmt(self, node: SyntaxNode, frontier, ctx: _Context):
        cond = node.text
        header = node.extra.get("header", node.text)
        nid = self.new_node(NodeKind.CONDITION, header, [node])
        self.connect(frontier, nid)
        self.in_try(nid)
        negated = self.adapter.negate_condition(cond) if cond else None
        blocks = [c for c in node.children if c.kind == "block"]
        then_out = self.block(blocks[0], [(nid, EdgeKind.TRUE_BRANCH, cond)], ctx)
        if len(blocks) > 1:
            else_out = self.block(
                blocks[1], [(nid, EdgeKind.FALSE_BRANCH, negated)], ctx
            )
        else:
            else_out = [(nid, EdgeKind.FALSE_BRANCH, negated)]
        return then_out + else_out

    def loop(self, node: SyntaxNode, frontier, ctx: _Context):
        cond = node.text
        header = node.extra.get("header", node.text)
        infinite = node.extra.get("infinite", False)
        nid = self.new_node(NodeKind.LOOP_HEADER, header, [node])
        self.connect(frontier, nid)
        self.in_try(nid)
        body = next(c for c in node.children if c.kind == "block")
        breaks: list[_Pending] = []
        ctx.break_stack.append(breaks)
        ctx.continue_stack.append(nid)
        body_label = cond if node.kind != "for_statement" and cond else None
        body_out = self.block(body, [(nid, EdgeKind.TRUE_BRANCH, body_label)], ctx)
        ctx.continue_stack.pop()
        ctx.break_stack.pop()
        for src, _kind, _label in body_out:
            self.edge(src, nid, EdgeKind.LOOP_BACK)
        out: list[_Pending] = []
        if not infinite:
            exit_label = None
            if node.kind == "while_statement" and cond:
                exit_label = self.adapter.negate_condition(cond)
            out.append((nid, EdgeKind.LOOP_EXIT, exit_label))
        return out + breaks

    def switch(self, node: SyntaxNode, frontier, ctx: _Context):
        header = node.extra.get("header", node.text)
        nid = self.new_node(NodeKind.SWITCH, header, [node])
        self.connect(frontier, nid)
        self.in_try(nid)
        breaks: list[_Pending] = []
        ctx.break_stack.append(breaks)
        outs: list[_Pending] = []
        has_default = False
        for clause in [c for c in node.children if c.kind == "case_clause"]:
            label = clause.text
            if label in ("default", "_", ""):
                has_default = True
            body = clause.children[0]
            body.extra.setdefault("defs", clause.extra.get("defs", []))
            clause_frontier = [(nid, EdgeKind.CASE_BRANCH, label)]
            if body.children:
                # bind the clause's pattern defs to its first emitted node by
                # tagging the first child statement
                first = body.children[0]
                pattern_defs = clause.extra.get("defs", [])
                if pattern_defs:
                    merged = pattern_defs + [
                        d for d in first.extra.get("defs", []) if d not in pattern_defs
                    ]
                    first.extra["defs"] = merged
                outs.extend(self.block(body, clause_frontier, ctx))
            else:
                outs.extend(clause_frontier)
        ctx.break_stack.pop()
        if not has_default:
            outs.append((nid, EdgeKind.SEQUENTIAL, None))
        return outs + breaks

    def try_stmt(self, node: SyntaxNode, frontier, ctx: _Context):
        body = next(c for c in node.children if c.kind == "block")
        covered: list[int] = []
        ctx.try_stack.append(covered)
        body_out = self.block(body, frontier, ctx)
        ctx.try_stack.pop()
        outs = list(body_out)
        for clause in [c for c in node.children if c.kind == "catch_clause"]:
            text = f"catch {clause.text}".strip() if clause.text else "catch"
            hid = self.new_node(NodeKind.EXCEPTION_HANDLER, text, [clause])
            for src in covered:
                self.edge(src, hid, EdgeKind.EXCEPTION_FLOW)
            self.in_try(hid)
            outs.extend(
                self.block(clause.children[0], [(hid, EdgeKind.SEQUENTIAL, None)], ctx)
            )
        fin = next((c for c in node.children if c.kind == "finally_clause"), None)
        if fin is not None:
            outs = self.block(fin.children[0], outs, ctx)
        return outs


def build_cfg(fragment: FunctionFragment) -> Cfg:
    root = parse_fragment(fragment)
    return _Builder(fragment).build(root)


def abstract_graph(cfg: Cfg) -> AbstractGraph:
    node_types = frozenset(n.kind for n in cfg.nodes)
    triples = frozenset(
        (cfg.node(e.src).kind, e.kind, cfg.node(e.dst).kind) for e in cfg.edges
    )
    return AbstractGraph(node_types, triples)


def render_cfg_text(cfg: Cfg) -> str:
    lines = ["========= Control Flow Graph ========="]
    for node in cfg.nodes:
        lines.append(f"Node {node.id}: {node.kind.value}")
        for text_line in node.text.splitlines():
            lines.append(f"  {text_line}")
        for e in cfg.successors(node.id):
            if e.label:
                lines.append(f'  → Node {e.dst} [label="{e.label}"]')
            else:
                lines.append(f"  → Node {e.dst}")
    return "\n".join(lines) + "\n"
