"""Deterministic Graphviz output for block graphs and explored region graphs."""

from __future__ import annotations

from .blocks import BlockGraph
from .regions import RegionGraph


def _quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def emit_dot(graph) -> str:
    if isinstance(graph, BlockGraph):
        lines = ["digraph blocks {"]
        for b in graph.blocks:
            lines.append(f"  B{b.index} [label={_quote(b.label())}];")
        for e in graph.edges:
            lines.append(f"  B{e.source.index} -> B{e.target.index} "
                         f"[label={_quote(e.witness.kind)}];")
    elif isinstance(graph, RegionGraph):
        lines = ["digraph regions {"]
        for j, s in enumerate(graph.nodes):
            lines.append(f"  n{j} [label={_quote(str(s))}];")
        for src, lab, dst in graph.edges:
            lines.append(f"  n{src} -> n{dst} [label={_quote(str(lab))}];")
    else:
        raise TypeError(f"cannot render {type(graph).__name__} as DOT")
    lines.append("}")
    return "\n".join(lines) + "\n"
