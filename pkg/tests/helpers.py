"""Shared fixtures-by-function for the test modules, plus small independent oracles."""
from __future__ import annotations

import functools
import itertools
import json
from pathlib import Path

from translat.enumeration import enumerate_all
from translat.lattice import quotient, subgroup_lattice

DATA = Path(__file__).parent / "data"

# lattices used throughout; every one is small enough to enumerate quickly
GOLDEN = ["C:1", "C:2", "C:3", "C:4", "C:6", "C:8", "C:9", "C:15", "D:3", "D:5", "Q:8", "A:4", "D:9", "Dic:3", "F:5"]
DIAGRAM_SPECS = ["C:9", "C:15", "D:5", "A:4", "D:9", "Dic:3", "F:5"]


@functools.lru_cache(maxsize=None)
def tsl_for(spec: str):
    return enumerate_all(*subgroup_lattice(spec))


@functools.lru_cache(maxsize=None)
def diagrams() -> dict:
    return json.loads((DATA / "diagrams.json").read_text())


def transitive(pairs) -> frozenset:
    rel = set(pairs)
    while True:
        new = {(a, d) for a, b in rel for c, d in rel if b == c} - rel
        if not new:
            return frozenset(rel)
        rel |= new


def class_edges(ts, q) -> frozenset:
    return frozenset((q.class_of(a), q.class_of(b)) for a, b in ts.edges())


def match_diagram(spec: str) -> dict[str, int]:
    """Drawn system name -> index in our enumeration, via class-level edge sets."""
    lat, act = subgroup_lattice(spec)
    q = quotient(lat, act)
    tsl = tsl_for(spec)
    ours = {class_edges(t, q): i for i, t in enumerate(tsl.systems)}
    out = {}
    for name, drawn in diagrams()[spec]["systems"].items():
        key = transitive(tuple(e) for e in drawn["edges"])
        if key in ours:
            out[name] = ours[key]
    return out


# -- independent oracles -------------------------------------------------------------

def subgroups_by_subsets(mul) -> set[frozenset]:
    """Every element subset containing the identity that is closed under products."""
    n = len(mul)
    found = set()
    for mask in range(1 << (n - 1)):
        s = {0} | {i + 1 for i in range(n - 1) if mask >> i & 1}
        if all(mul[a][b] in s for a in s for b in s):
            found.add(frozenset(s))
    return found


def naive_closure(leq, meet, perms, edges) -> set[tuple[int, int]]:
    """Transfer-system closure by rescanning every rule until nothing changes."""
    n = len(leq)
    rel = {(x, x) for x in range(n)} | set(edges)
    changed = True
    while changed:
        changed = False
        new = set()
        for (k, h), (a, b) in itertools.product(rel, rel):
            if h == a:
                new.add((k, b))
        for k, h in rel:
            for x in range(n):
                if leq[x][h]:
                    new.add((meet[k][x], meet[h][x]))
            for p in perms:
                new.add((p[k], p[h]))
        if not new <= rel:
            rel |= new
            changed = True
    return rel


def compatible_by_definition(lat, t1: set, t2: set) -> bool:
    """Both conditions written out over explicit edge sets."""
    if not t1 <= t2:
        return False
    n = lat.size
    for a in range(n):
        for b in range(n):
            if (b, a) not in t1:
                continue
            for c in range(n):
                if lat.leq[c][a] and (int(lat.meet[b][c]), b) in t2 and (c, a) not in t2:
                    return False
    return True


def edge_set_of(ts) -> set[tuple[int, int]]:
    n = ts.lattice.size
    return {(k, h) for k in range(n) for h in range(n) if ts.rel[k, h]}
