"""Transfer systems on a lattice with an order-preserving action.

A relation is stored as ``rows``: one int per lattice element, where bit ``h``
of ``rows[k]`` means the edge ``k -> h``.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .lattice import Lattice, LatticeAction

Edge = tuple[int, int]

AXIOMS = {1: "subgroup", 2: "reflexivity", 3: "composition", 4: "restriction", 5: "conjugation"}


class TransferError(ValueError):
    pass


def _bits(x: int):
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


@dataclass(frozen=True, eq=False)
class TransferSystem:
    lattice: Lattice
    action: LatticeAction
    rows: tuple[int, ...]

    @property
    def lattice_ref(self) -> str:
        return f"{self.lattice.digest}:{self.action.digest}"

    @functools.cached_property
    def rel(self) -> np.ndarray:
        n = self.lattice.size
        out = np.zeros((n, n), dtype=bool)
        for k, r in enumerate(self.rows):
            out[k, list(_bits(r))] = True
        return out

    @functools.cached_property
    def key(self) -> bytes:
        """Canonical relation bytes, used for equality, hashing and sorting."""
        return np.packbits(self.rel).tobytes()

    @functools.cached_property
    def bits(self) -> int:
        n = self.lattice.size
        return sum(r << (k * n) for k, r in enumerate(self.rows))

    def edges(self) -> list[Edge]:
        """Non-reflexive edges in canonical (source, target) order."""
        return [(k, h) for k, r in enumerate(self.rows) for h in _bits(r) if h != k]

    def __contains__(self, edge: Edge) -> bool:
        k, h = edge
        return bool((self.rows[k] >> h) & 1)

    def __len__(self) -> int:
        return len(self.edges())

    def __le__(self, other: TransferSystem) -> bool:
        return all(a & ~b == 0 for a, b in zip(self.rows, other.rows))

    def __lt__(self, other: TransferSystem) -> bool:
        return self <= other and self.rows != other.rows

    def __eq__(self, other) -> bool:
        if not isinstance(other, TransferSystem):
            return NotImplemented
        return self.lattice_ref == other.lattice_ref and self.rows == other.rows

    def __hash__(self) -> int:
        return hash((self.lattice_ref, self.key))

    def __repr__(self) -> str:
        return f"TransferSystem({self.edges()})"


class Violation(NamedTuple):
    axiom: int
    witness: tuple[int, ...]

    @property
    def name(self) -> str:
        return AXIOMS[self.axiom]


def _as_bool(lat: Lattice, rel) -> np.ndarray:
    rel = np.asarray(rel, dtype=bool)
    if rel.shape != (lat.size, lat.size):
        raise TransferError(f"relation has shape {rel.shape}, lattice has {lat.size} elements")
    return rel


def validate(lat: Lattice, act: LatticeAction, rel) -> list[Violation]:
    """Every axiom violation with a witness; empty iff ``rel`` is a transfer system."""
    rel = _as_bool(lat, rel)
    out: list[Violation] = []
    for k, h in zip(*np.nonzero(rel & ~lat.leq)):
        out.append(Violation(1, (int(k), int(h))))
    for x in np.flatnonzero(~rel.diagonal()):
        out.append(Violation(2, (int(x),)))
    for l_, k, h in zip(*np.nonzero(rel[:, :, None] & rel[None, :, :] & ~rel[:, None, :])):
        out.append(Violation(3, (int(l_), int(k), int(h))))
    for k, h in zip(*np.nonzero(rel)):
        for l_ in np.flatnonzero(lat.leq[:, h]):
            if not rel[lat.meet[k, l_], lat.meet[h, l_]]:
                out.append(Violation(4, (int(k), int(h), int(l_))))
    for gi, p in enumerate(act.perms):
        for k, h in zip(*np.nonzero(rel)):
            if not rel[p[k], p[h]]:
                out.append(Violation(5, (int(k), int(h), gi)))
    return out


def from_rel(lat: Lattice, act: LatticeAction, rel) -> TransferSystem:
    """Wrap an already closed relation, refusing anything that fails an axiom."""
    rel = _as_bool(lat, rel)
    bad = validate(lat, act, rel)
    if bad:
        raise TransferError(f"not a transfer system: {bad[0].name} fails at {bad[0].witness}")
    return _wrap(lat, act, _rows(rel))


def _rows(rel: np.ndarray) -> list[int]:
    return [sum(1 << int(h) for h in np.flatnonzero(row)) for row in rel]


def _wrap(lat: Lattice, act: LatticeAction, rows: Sequence[int]) -> TransferSystem:
    return TransferSystem(lat, act, tuple(rows))


def close_rows(lat: Lattice, act: LatticeAction, rows: list[int]) -> list[int]:
    """Least fixpoint of conjugation, restriction and composition (in that order)."""
    n = lat.size
    meet = lat.meet_list
    up = lat.up
    perms = act.perm_lists
    rows = list(rows)
    for x in range(n):
        rows[x] |= 1 << x
    while True:
        before = list(rows)
        for p in perms:
            for k in range(n):
                r = rows[k]
                img = 0
                for h in _bits(r):
                    img |= 1 << p[h]
                rows[p[k]] |= img
        for l_ in range(n):
            # k -> h with l <= h gives (k ^ l) -> l
            ul = up[l_]
            bit = 1 << l_
            ml = meet[l_]
            for k in range(n):
                if rows[k] & ul:
                    rows[ml[k]] |= bit
        for m in range(n):
            bm = 1 << m
            rm = rows[m]
            for k in range(n):
                if rows[k] & bm:
                    rows[k] |= rm
        if rows == before:
            return rows


def _check_edges(lat: Lattice, edges: Iterable[Edge]) -> list[Edge]:
    out = []
    for k, h in edges:
        k, h = int(k), int(h)
        if not (0 <= k < lat.size and 0 <= h < lat.size) or not lat.leq[k, h]:
            raise TransferError(f"edge {k} -> {h} does not go up the lattice")
        out.append((k, h))
    return out


def generate(lat: Lattice, act: LatticeAction, edges: Iterable[Edge] = ()) -> TransferSystem:
    """Smallest transfer system containing ``edges``."""
    rows = [0] * lat.size
    for k, h in _check_edges(lat, edges):
        rows[k] |= 1 << h
    return _wrap(lat, act, close_rows(lat, act, rows))


def extend(ts: TransferSystem, edges: Iterable[Edge]) -> TransferSystem:
    rows = list(ts.rows)
    for k, h in _check_edges(ts.lattice, edges):
        rows[k] |= 1 << h
    return _wrap(ts.lattice, ts.action, close_rows(ts.lattice, ts.action, rows))


def trivial(lat: Lattice, act: LatticeAction) -> TransferSystem:
    return _wrap(lat, act, [1 << x for x in range(lat.size)])


def complete(lat: Lattice, act: LatticeAction) -> TransferSystem:
    return _wrap(lat, act, lat.up)


def edge_set(edges: Iterable[Edge]) -> list[Edge]:
    """Canonical edge list: reflexive pairs and duplicates removed, sorted."""
    return sorted({(int(k), int(h)) for k, h in edges if k != h})


def _generates(lat, act, edges: list[Edge], target: Edge) -> bool:
    rows = [0] * lat.size
    for k, h in edges:
        rows[k] |= 1 << h
    return bool((close_rows(lat, act, rows)[target[0]] >> target[1]) & 1)


def minimal_generating_set(ts: TransferSystem) -> list[Edge]:
    """Greedy removal over the non-reflexive edges in canonical order."""
    lat, act = ts.lattice, ts.action
    current = ts.edges()
    for e in ts.edges():
        rest = [x for x in current if x != e]
        if _generates(lat, act, rest, e):
            current = rest
    return current


def minimal_generating_orbits(ts: TransferSystem) -> list[tuple[Edge, ...]]:
    """Greedy removal over whole pair-orbits; one entry per kept orbit."""
    lat, act = ts.lattice, ts.action
    orbits = [o for o in act.pair_orbits(lat) if o[0] in ts]
    current = list(orbits)
    for o in orbits:
        rest = [x for x in current if x is not o]
        if _generates(lat, act, [e for x in rest for e in x], o[0]):
            current = rest
    return current


def is_saturated(ts: TransferSystem) -> bool:
    """l <= k <= h with l -> h forces k -> h."""
    up = ts.lattice.up
    down = ts.lattice.down
    for l_, r in enumerate(ts.rows):
        for h in _bits(r):
            between = up[l_] & down[h]
            for k in _bits(between):
                if not (ts.rows[k] >> h) & 1:
                    return False
    return True


def saturated_hull(ts: TransferSystem) -> TransferSystem:
    lat, act = ts.lattice, ts.action
    up, down = lat.up, lat.down
    rows = list(ts.rows)
    while True:
        before = list(rows)
        for l_ in range(lat.size):
            for h in _bits(rows[l_]):
                for k in _bits(up[l_] & down[h]):
                    rows[k] |= 1 << h
        rows = close_rows(lat, act, rows)
        if rows == before:
            return _wrap(lat, act, rows)


def is_cosaturated(ts: TransferSystem) -> bool:
    top = ts.lattice.top
    into_top = [(h, top) for h in range(ts.lattice.size) if (ts.rows[h] >> top) & 1]
    return generate(ts.lattice, ts.action, into_top).rows == ts.rows


def is_connected(ts: TransferSystem) -> bool:
    return bool((ts.rows[ts.lattice.bottom] >> ts.lattice.top) & 1)


def _same_lattice(t1: TransferSystem, t2: TransferSystem) -> None:
    if t1.lattice_ref != t2.lattice_ref:
        raise TransferError("transfer systems live on different lattices")


def compatibility_failure(t1: TransferSystem, t2: TransferSystem) -> tuple | None:
    """First witness that (t1, t2) is not a compatible pair, or None.

    Returns ``("subset", k, h)`` for an edge of t1 missing from t2, or
    ``("condition", b, c, a)`` for B -> A in t1, (B ^ C) -> B in t2 and C -> A
    missing from t2.
    """
    _same_lattice(t1, t2)
    r2 = t2.rows
    for k, r in enumerate(t1.rows):
        missing = r & ~r2[k]
        if missing:
            return ("subset", k, next(_bits(missing)))
    lat = t1.lattice
    meet = lat.meet_list
    down = lat.down
    for b, r in enumerate(t1.rows):
        mb = meet[b]
        bit_b = 1 << b
        for a in _bits(r):
            bit_a = 1 << a
            for c in _bits(down[a]):
                if r2[mb[c]] & bit_b and not r2[c] & bit_a:
                    return ("condition", b, c, a)
    return None


def compatible(t1: TransferSystem, t2: TransferSystem) -> bool:
    """t1 within t2, and B -> A in t1 with (B ^ C) -> B in t2 forces C -> A in t2, for C <= A."""
    return compatibility_failure(t1, t2) is None


_ENUMERATED_COUNTS: dict[str, int] = {}


def register_enumeration(ref: str, count: int) -> None:
    _ENUMERATED_COUNTS[ref] = count


def is_lsp(ts: TransferSystem, all_systems: Sequence[TransferSystem]) -> bool:
    """Only the hull and the complete system are compatible partners of ``ts``."""
    systems = list(getattr(all_systems, "systems", all_systems))
    known = _ENUMERATED_COUNTS.get(ts.lattice_ref)
    full = complete(ts.lattice, ts.action)
    if known is not None and known != len(systems):
        raise TransferError(f"enumeration has {len(systems)} systems, expected {known}")
    if ts not in systems or full not in systems:
        raise TransferError("enumeration supplied is incomplete")
    allowed = {saturated_hull(ts), full}
    for other in systems:
        if other in allowed or not ts <= other:
            continue
        if compatible(ts, other):
            return False
    return True


def lift(qrel, lat: Lattice, classes: Sequence[Sequence[int]]) -> np.ndarray:
    """Pull a class-level relation back to the lattice, keeping comparable pairs."""
    qrel = np.asarray(qrel, dtype=bool)
    cls = np.empty(lat.size, dtype=np.int64)
    for i, c in enumerate(classes):
        cls[list(c)] = i
    return qrel[cls[:, None], cls[None, :]] & lat.leq


def lift_check(qrel, lat: Lattice, act: LatticeAction) -> bool:
    """Lifting criterion for a relation on conjugacy classes of a lossless group.

    Holds iff for every class edge [K] -> [H] and every K' <= H with [K'] = [K],
    the edge [K ^ K'] -> [H] is present.
    """
    from .groups import is_lossless
    from .lattice import quotient

    if lat.group is None or lat.subgroups is None:
        raise TransferError("lifting needs a subgroup lattice")
    if not is_lossless(lat.group, list(lat.subgroups)):
        raise TransferError(f"{lat.group.label} is lossy; the lifting criterion does not apply")
    q = quotient(lat, act)
    qrel = np.asarray(qrel, dtype=bool)
    if qrel.shape != (q.size, q.size):
        raise TransferError("class relation has the wrong shape")
    for ki, hi in zip(*np.nonzero(qrel)):
        h = q.classes[hi][0]
        below = [k for k in q.classes[ki] if lat.leq[k, h]]
        for k in below:
            for k2 in below:
                if not qrel[q.class_of(int(lat.meet[k, k2])), hi]:
                    return False
    return True
