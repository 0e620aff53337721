"""JSON file formats for abstract lattices and transfer systems."""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .lattice import Lattice, LatticeAction, LatticeError
from .transfer import TransferError, TransferSystem, edge_set, from_rel, generate, validate


class FormatError(ValueError):
    pass


def _read_json(source) -> dict:
    if isinstance(source, dict):
        return source
    try:
        return json.loads(Path(source).read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(f"{source}: not valid JSON ({exc})") from None


def lattice_to_json(lat: Lattice, act: LatticeAction) -> dict:
    return {
        "labels": list(lat.labels),
        "leq": lat.leq.astype(int).tolist(),
        "action_generators": act.perms.tolist(),
    }


def lattice_from_json(source) -> tuple[Lattice, LatticeAction]:
    """Load ``{labels, leq, action_generators}``; meet and join are derived here."""
    doc = _read_json(source)
    try:
        leq = np.array(doc["leq"], dtype=bool)
    except (KeyError, TypeError, ValueError):
        raise FormatError("lattice file needs a square boolean 'leq' table") from None
    if leq.ndim != 2:
        raise FormatError("'leq' must be a square table")
    lat = Lattice.from_leq(leq, doc.get("labels"))
    gens = doc.get("action_generators") or []
    perms = np.array(gens, dtype=np.int64).reshape(-1, lat.size) if gens else np.empty((0, lat.size), dtype=np.int64)
    act = LatticeAction(perms, lat.size)
    for p in perms:
        if sorted(p.tolist()) != list(range(lat.size)) or not (lat.leq[np.ix_(p, p)] == lat.leq).all():
            raise LatticeError("action generator is not an order automorphism")
    return lat, act


def lattice_tag(lat: Lattice, act: LatticeAction) -> str:
    """Group spec when the lattice came from one, else the content hash."""
    if lat.group is not None and lat.group.spec is not None:
        return str(lat.group.spec)
    return f"{lat.digest}:{act.digest}"


def ts_to_json(ts: TransferSystem) -> dict:
    return {
        "lattice": lattice_tag(ts.lattice, ts.action),
        "edges": [list(e) for e in ts.edges()],
    }


def ts_from_json(source, lat: Lattice, act: LatticeAction, close: bool = False) -> TransferSystem:
    """Load ``{lattice, edges}`` against ``lat``.

    Without ``close`` the edges must already form a transfer system; the error
    lists every violated axiom.  With ``close`` the edges are generated up.
    """
    doc = _read_json(source)
    tag = doc.get("lattice")
    accepted = {lattice_tag(lat, act), f"{lat.digest}:{act.digest}", lat.digest}
    if tag is not None and str(tag) not in accepted:
        raise FormatError(f"file is for lattice {tag!r}, not {lattice_tag(lat, act)!r}")
    try:
        edges = edge_set(tuple(e) for e in doc["edges"])
    except (KeyError, TypeError, ValueError):
        raise FormatError("transfer-system file needs an 'edges' list of [k, h] pairs") from None
    for k, h in edges:
        if not (0 <= k < lat.size and 0 <= h < lat.size):
            raise FormatError(f"edge {k} -> {h} is out of range")
    if close:
        return generate(lat, act, edges)
    rel = relation_from_edges(lat, edges)
    problems = validate(lat, act, rel)
    if problems:
        shown = "; ".join(f"{v.name} at {v.witness}" for v in problems[:5])
        raise TransferError(f"not a transfer system ({len(problems)} violations): {shown}")
    return from_rel(lat, act, rel)


def relation_from_edges(lat: Lattice, edges) -> np.ndarray:
    rel = np.eye(lat.size, dtype=bool)
    for k, h in edges:
        rel[k, h] = True
    return rel
