"""Per-variable def-use paths over CFG node ids, plus their textual form.

A path starts at the node holding a definition (the PARAMETERS node for
parameters) and follows CFG edges; it never crosses a re-definition of the
same variable and is truncated at the last node that uses it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .cfg import Cfg, NodeKind
from .languages import FunctionFragment

MAX_PATHS_PER_VARIABLE = 64


class EventKind(str, Enum):
    DEF = "DEF"
    USE = "USE"


@dataclass(frozen=True)
class DefUseEvent:
    variable: str
    kind: EventKind
    node_id: int


@dataclass(frozen=True)
class VariablePath:
    variable: str
    node_ids: tuple[int, ...]


@dataclass
class DataFlowSummary:
    paths: dict[str, list[VariablePath]] = field(default_factory=dict)
    truncated: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            var: [list(p.node_ids) for p in paths]
            for var, paths in self.paths.items()
        }


def node_events(cfg: Cfg) -> tuple[dict[int, list[str]], dict[int, list[str]]]:
    """(defs, uses) name lists per node id, in adapter-reported order."""
    defs: dict[int, list[str]] = {}
    uses: dict[int, list[str]] = {}
    for node in cfg.nodes:
        d: list[str] = []
        u: list[str] = []
        if node.kind is NodeKind.PARAMETERS:
            for syn in node.syntax:
                d.extend(p.text for p in syn.children)
        else:
            for syn in node.syntax:
                for name in syn.extra.get("uses", []):
                    if name not in u:
                        u.append(name)
                for name in syn.extra.get("defs", []):
                    if name not in d:
                        d.append(name)
        defs[node.id] = d
        uses[node.id] = u
    return defs, uses


def extract_def_use(fragment: FunctionFragment, cfg: Cfg) -> DataFlowSummary:
    defs, uses = node_events(cfg)
    order = _variable_order(cfg, defs)
    succs = {n.id: [e.dst for e in cfg.successors(n.id)] for n in cfg.nodes}
    summary = DataFlowSummary()
    for var in order:
        def_nodes = [nid for nid in sorted(defs) if var in defs[nid]]
        collected: list[tuple[int, ...]] = []
        truncated = False
        for d in def_nodes:
            walks, hit_cap = _maximal_walks(d, succs, defs, var, MAX_PATHS_PER_VARIABLE)
            truncated = truncated or hit_cap
            for walk in walks:
                path = _truncate_at_last_use(walk, uses, var)
                if path and path not in collected:
                    collected.append(path)
        collected.sort()
        if collected:
            summary.paths[var] = [VariablePath(var, p) for p in collected]
        if truncated:
            summary.truncated.append(var)
    return summary


def _variable_order(cfg: Cfg, defs: dict[int, list[str]]) -> list[str]:
    order: list[str] = []
    for nid in sorted(defs):
        for name in defs[nid]:
            if name not in order:
                order.append(name)
    return order


def _maximal_walks(start, succs, defs, var, cap):
    """All maximal acyclic walks from `start` that do not cross another
    definition of `var`. Deterministic: successors in edge insertion order."""
    walks: list[tuple[int, ...]] = []
    hit_cap = False

    def extend(path: list[int]):
        nonlocal hit_cap
        if len(walks) >= cap:
            hit_cap = True
            return
        tip = path[-1]
        nexts = [
            s
            for s in succs[tip]
            if s not in path and var not in defs.get(s, [])
        ]
        if not nexts:
            walks.append(tuple(path))
            return
        for s in nexts:
            extend(path + [s])

    extend([start])
    return walks, hit_cap


def _truncate_at_last_use(walk, uses, var):
    last = None
    for i, nid in enumerate(walk):
        if var in uses.get(nid, []):
            last = i
    if last is None:
        return None
    return walk[: last + 1]


def render_paths_text(summary: DataFlowSummary) -> str:
    lines = ["=========== Data Flow Paths ==========="]
    for var, paths in summary.paths.items():
        lines.append(f"Variable: {var}")
        for k, path in enumerate(paths, start=1):
            lines.append(f"  Path {k}:")
            lines.append("    CFG Node Path: " + " → ".join(str(i) for i in path.node_ids))
        lines.append("")
    while lines and lines[-1] == "":
        lines.pop()
    return "\n".join(lines) + "\n"
