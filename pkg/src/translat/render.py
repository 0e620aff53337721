"""DOT, TikZ and JSON renderings of lattices, transfer systems and their Hasse diagrams.

Every renderer is a pure function of its input, so equal inputs give equal bytes.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .enumeration import Decoration, TsLattice
from .formats import ts_to_json
from .lattice import Lattice, LatticeAction, QuotientPoset, covering_pairs, quotient
from .transfer import TransferSystem

FORMATS = ("dot", "tikz", "json")
TARGETS = ("subgroup-lattice", "quotient-poset", "transfer-system", "ts-hasse")

GLYPHS = {"saturated": "△", "cosaturated": "♡", "lsp": "◆", "connected": "◇"}
ASCII_GLYPHS = {"saturated": "S", "cosaturated": "C", "lsp": "L", "connected": "c"}
TIKZ_GLYPHS = {
    "saturated": r"\textcolor{cyan}{$\triangle$}",
    "cosaturated": r"\textcolor{magenta}{$\heartsuit$}",
    "lsp": r"\textcolor{violet}{$\blacklozenge$}",
    "connected": r"\textcolor{violet}{$\lozenge$}",
}


@dataclass(frozen=True)
class RenderSpec:
    format: str = "dot"
    target: str = "ts-hasse"
    decorations: bool = True
    ascii: bool = False

    def __post_init__(self):
        if self.format not in FORMATS:
            raise ValueError(f"format must be one of {FORMATS}")
        if self.target not in TARGETS:
            raise ValueError(f"target must be one of {TARGETS}")
        if self.target != "ts-hasse" and (self.ascii or not self.decorations):
            raise ValueError("decoration flags only apply to the ts-hasse target")


@dataclass
class Graph:
    name: str
    nodes: list[dict] = field(default_factory=list)   # id, label, layer, attrs
    edges: list[tuple[int, int]] = field(default_factory=list)
    directed: bool = True


def glyph_marks(d: Decoration, ascii: bool = False) -> str:
    table = ASCII_GLYPHS if ascii else GLYPHS
    marks = []
    if d.saturated:
        marks.append(table["saturated"])
    if d.cosaturated:
        marks.append(table["cosaturated"])
    # connected systems are LSP for free and get the hollow marker instead
    if d.connected:
        marks.append(table["connected"])
    elif d.lsp:
        marks.append(table["lsp"])
    return "".join(marks)


def _layers(keys: list) -> list[int]:
    ranks = {k: i for i, k in enumerate(sorted(set(keys)))}
    return [ranks[k] for k in keys]


def lattice_graph(lat: Lattice) -> Graph:
    sizes = [s.order for s in lat.subgroups] if lat.subgroups else [int(lat.leq[:, x].sum()) for x in range(lat.size)]
    layers = _layers(sizes)
    g = Graph("subgroup_lattice")
    for x in range(lat.size):
        g.nodes.append({"id": x, "label": lat.labels[x], "layer": layers[x], "attrs": {}})
    g.edges = covering_pairs(lat)
    return g


def _order_covers(leq: np.ndarray) -> list[tuple[int, int]]:
    lt = (leq & ~np.eye(len(leq), dtype=bool)).astype(np.int64)
    return [(int(a), int(b)) for a, b in zip(*np.nonzero((lt > 0) & (lt @ lt == 0)))]


def quotient_graph(q: QuotientPoset) -> Graph:
    # Sub(G)/G need not be a lattice, so covers come straight from the order
    layers = _layers([int(q.order[:, x].sum()) for x in range(q.size)])
    g = Graph("quotient_poset")
    for i, label in enumerate(q.labels):
        g.nodes.append({"id": i, "label": label, "layer": layers[i],
                        "attrs": {"multiplicity": q.multiplicities[i]}})
    g.edges = _order_covers(q.order)
    return g


def transfer_graph(ts: TransferSystem) -> Graph:
    lat = ts.lattice
    g = lattice_graph(lat)
    g.name = "transfer_system"
    g.edges = ts.edges()
    return g


def hasse_graph(tsl: TsLattice, decorations: bool = True, ascii: bool = False) -> Graph:
    g = Graph("ts_hasse")
    layers = _layers([len(t.edges()) for t in tsl.systems])
    for i, t in enumerate(tsl.systems):
        attrs: dict = {"edges": len(t.edges())}
        label = f"T{i}"
        if decorations and tsl.decorations:
            d = tsl.decorations[i]
            attrs.update({k: v for k, v in zip(("saturated", "cosaturated", "lsp", "connected"), d.as_tuple())})
            marks = glyph_marks(d, ascii)
            if marks:
                label = f"{label} {marks}"
        g.nodes.append({"id": i, "label": label, "layer": layers[i], "attrs": attrs})
    g.edges = list(tsl.hasse_edges)
    return g


# -- emitters ------------------------------------------------------------------

def _dot_quote(s: str) -> str:
    return '"' + str(s).replace("\\", "\\\\").replace('"', '\\"') + '"'


def _dot_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    return str(v) if isinstance(v, int) else _dot_quote(v)


def to_dot(g: Graph) -> str:
    arrow = "->" if g.directed else "--"
    lines = [f"{'digraph' if g.directed else 'graph'} {g.name} {{", "  rankdir=BT;", "  node [shape=plaintext];"]
    for n in g.nodes:
        attrs = {"label": n["label"], **n["attrs"]}
        body = ", ".join(f"{k}={_dot_value(v)}" for k, v in attrs.items())
        lines.append(f"  n{n['id']} [{body}];")
    for a, b in g.edges:
        lines.append(f"  n{a} {arrow} n{b};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _tikz_label(label: str) -> str:
    head, _, marks = label.partition(" ")
    text = head.replace("#", r"\#")
    out = f"${text}$"
    for key, mark in GLYPHS.items():
        if mark in marks:
            out += TIKZ_GLYPHS[key]
    return out


def to_tikz(g: Graph, xsep: float = 1.6, ysep: float = 1.4) -> str:
    by_layer: dict[int, list[dict]] = {}
    for n in g.nodes:
        by_layer.setdefault(n["layer"], []).append(n)
    pos = {}
    for layer, nodes in by_layer.items():
        width = len(nodes) - 1
        for i, n in enumerate(nodes):
            pos[n["id"]] = ((i - width / 2) * xsep, layer * ysep)
    lines = [
        r"\documentclass[tikz]{standalone}",
        r"\usepackage{amssymb}",
        r"\usepackage{xcolor}",
        r"\begin{document}",
        r"\begin{tikzpicture}",
    ]
    for n in g.nodes:
        x, y = pos[n["id"]]
        lines.append(f"  \\node (n{n['id']}) at ({x:.2f},{y:.2f}) {{{_tikz_label(n['label'])}}};")
    style = "->" if g.name == "transfer_system" else "-"
    for a, b in g.edges:
        lines.append(f"  \\draw[{style}] (n{a}) -- (n{b});")
    lines += [r"\end{tikzpicture}", r"\end{document}"]
    return "\n".join(lines) + "\n"


def to_json(g: Graph, extra: dict | None = None) -> str:
    doc = {
        "target": g.name,
        "nodes": [{"id": n["id"], "label": n["label"], **n["attrs"]} for n in g.nodes],
        "edges": [list(e) for e in g.edges],
    }
    if extra:
        doc.update(extra)
    return json.dumps(doc, indent=1, ensure_ascii=False, sort_keys=False) + "\n"


def emit(g: Graph, fmt: str, extra: dict | None = None) -> str:
    if fmt == "dot":
        return to_dot(g)
    if fmt == "tikz":
        return to_tikz(g)
    if fmt == "json":
        return to_json(g, extra)
    raise ValueError(f"unknown format {fmt!r}")


def render(item, spec: RenderSpec, action: LatticeAction | None = None) -> str:
    """Render ``item`` according to ``spec``; ``item`` must match ``spec.target``."""
    if spec.target == "subgroup-lattice":
        if not isinstance(item, Lattice):
            raise TypeError("subgroup-lattice target needs a Lattice")
        return emit(lattice_graph(item), spec.format)
    if spec.target == "quotient-poset":
        if isinstance(item, Lattice):
            if action is None:
                raise TypeError("quotient of a lattice needs its action")
            item = quotient(item, action)
        return emit(quotient_graph(item), spec.format)
    if spec.target == "transfer-system":
        if not isinstance(item, TransferSystem):
            raise TypeError("transfer-system target needs a TransferSystem")
        # JSON output doubles as the transfer-system file format
        return emit(transfer_graph(item), spec.format, ts_to_json(item) if spec.format == "json" else None)
    if not isinstance(item, TsLattice):
        raise TypeError("ts-hasse target needs a TsLattice")
    return emit(hasse_graph(item, spec.decorations, spec.ascii), spec.format)
