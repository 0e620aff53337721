"""Finite lattices given by an order table, with an order-preserving action."""
from __future__ import annotations

import functools
import hashlib
from dataclasses import dataclass, field

import numpy as np

from .groups import (
    FiniteGroup,
    Subgroup,
    conjugation_action,
    enumerate_subgroups,
    subgroup_label,
)


class LatticeError(ValueError):
    pass


def _bound_table(leq: np.ndarray, lower: bool) -> np.ndarray:
    """Meet (``lower=True``) or join table from an order table.

    The greatest common lower bound, when it exists, is the common lower bound
    with the most elements below it; each candidate is then verified.
    """
    n = leq.shape[0]
    rel = leq if lower else leq.T                 # rel[x, a]: x below a (or above)
    height = rel.sum(axis=0)
    table = np.empty((n, n), dtype=np.int64)
    for a in range(n):
        common = rel[:, a][:, None] & rel       # common[x, b]
        cand = np.argmax(np.where(common, height[:, None], -1), axis=0)
        if not common.any(axis=0).all():
            raise LatticeError("some pair has no common bound")
        ok = (~common | rel[:, cand]).all(axis=0)
        if not ok.all():
            b = int(np.flatnonzero(~ok)[0])
            kind = "meet" if lower else "join"
            raise LatticeError(f"elements {a} and {b} have no {kind}")
        table[a] = cand
    return table


@dataclass(frozen=True, eq=False)
class Lattice:
    leq: np.ndarray
    meet: np.ndarray
    join: np.ndarray
    bottom: int
    top: int
    labels: tuple[str, ...]
    subgroups: tuple[Subgroup, ...] | None = None
    group: FiniteGroup | None = None

    @classmethod
    def from_leq(cls, leq, labels=None, **extra) -> Lattice:
        leq = np.asarray(leq, dtype=bool)
        n = leq.shape[0]
        if leq.shape != (n, n) or n == 0:
            raise LatticeError("order table must be square and non-empty")
        if not leq.diagonal().all():
            raise LatticeError("order is not reflexive")
        if (leq & leq.T & ~np.eye(n, dtype=bool)).any():
            raise LatticeError("order is not antisymmetric")
        if ((leq.astype(np.int64) @ leq.astype(np.int64) > 0) & ~leq).any():
            raise LatticeError("order is not transitive")
        bottoms = np.flatnonzero(leq.all(axis=1))
        tops = np.flatnonzero(leq.all(axis=0))
        if len(bottoms) != 1 or len(tops) != 1:
            raise LatticeError("order needs a unique bottom and top")
        meet = _bound_table(leq, lower=True)
        join = _bound_table(leq, lower=False)
        labels = tuple(labels) if labels is not None else tuple(str(i) for i in range(n))
        if len(labels) != n:
            raise LatticeError("one label per element required")
        return cls(leq, meet, join, int(bottoms[0]), int(tops[0]), labels, **extra)

    @property
    def size(self) -> int:
        return int(self.leq.shape[0])

    @functools.cached_property
    def digest(self) -> str:
        return hashlib.sha256(np.packbits(self.leq).tobytes()
                              + self.size.to_bytes(4, "little")).hexdigest()[:16]

    @functools.cached_property
    def down(self) -> tuple[int, ...]:
        """``down[h]``: bitset of elements below h."""
        return tuple(sum(1 << int(x) for x in np.flatnonzero(self.leq[:, h])) for h in range(self.size))

    @functools.cached_property
    def up(self) -> tuple[int, ...]:
        return tuple(sum(1 << int(x) for x in np.flatnonzero(self.leq[h])) for h in range(self.size))

    @functools.cached_property
    def meet_list(self) -> list[list[int]]:
        return self.meet.tolist()

    def check(self) -> None:
        """Lattice axioms of meet/join against the order."""
        idx = np.arange(self.size)
        m, j, leq = self.meet, self.join, self.leq
        assert (m[idx, idx] == idx).all() and (j[idx, idx] == idx).all()
        assert (m == m.T).all() and (j == j.T).all()
        assert (m[idx[:, None], j] == idx[:, None]).all()    # a ^ (a v b) = a
        assert (j[idx[:, None], m] == idx[:, None]).all()    # a v (a ^ b) = a
        assert ((m == idx[:, None]) == leq).all()            # a ^ b = a iff a <= b


@dataclass(frozen=True, eq=False)
class LatticeAction:
    """Order automorphisms given by generator permutations of lattice elements."""

    perms: np.ndarray
    size: int
    orbits: tuple[tuple[int, ...], ...] = field(init=False)

    def __post_init__(self):
        perms = np.asarray(self.perms, dtype=np.int64).reshape(-1, self.size)
        object.__setattr__(self, "perms", perms)
        object.__setattr__(self, "orbits", tuple(tuple(o) for o in _orbits(perms, range(self.size), lambda p, x: int(p[x]))))

    @classmethod
    def trivial(cls, size: int) -> LatticeAction:
        return cls(np.empty((0, size), dtype=np.int64), size)

    @functools.cached_property
    def perm_lists(self) -> list[list[int]]:
        return self.perms.tolist()

    @functools.cached_property
    def digest(self) -> str:
        return hashlib.sha256(self.perms.astype(np.int64).tobytes()).hexdigest()[:16]

    def pair_orbits(self, lattice: Lattice) -> list[tuple[tuple[int, int], ...]]:
        """Orbits of strict comparable pairs ``a < b`` under the simultaneous action."""
        pairs = [(int(a), int(b)) for a, b in zip(*np.nonzero(lattice.leq)) if a != b]
        return [tuple(sorted(o)) for o in
                _orbits(self.perms, pairs, lambda p, ab: (int(p[ab[0]]), int(p[ab[1]])))]

    def orbit_of(self, x: int) -> tuple[int, ...]:
        for o in self.orbits:
            if x in o:
                return o
        raise KeyError(x)

    def check(self, lattice: Lattice) -> None:
        for p in self.perms:
            assert sorted(p.tolist()) == list(range(self.size))
            assert (lattice.leq[np.ix_(p, p)] == lattice.leq).all()
            assert (lattice.meet[np.ix_(p, p)] == p[lattice.meet]).all()
            assert (lattice.join[np.ix_(p, p)] == p[lattice.join]).all()


def _orbits(perms, items, apply):
    items = list(items)
    seen = set()
    out = []
    for x in items:
        if x in seen:
            continue
        orbit = {x}
        stack = [x]
        while stack:
            y = stack.pop()
            for p in perms:
                z = apply(p, y)
                if z not in orbit:
                    orbit.add(z)
                    stack.append(z)
        seen |= orbit
        out.append(sorted(orbit))
    return out


def from_subgroups(g: FiniteGroup) -> tuple[Lattice, LatticeAction]:
    """Sub(G) with meet = intersection, join = generated subgroup, action = conjugation."""
    subs = enumerate_subgroups(g)
    bits = [s.members for s in subs]
    n = len(subs)
    leq = np.array([[bits[a] & ~bits[b] == 0 for b in range(n)] for a in range(n)], dtype=bool)
    labels = tuple(subgroup_label(g, s, i) for i, s in enumerate(subs))
    lat = Lattice.from_leq(leq, labels, subgroups=tuple(subs), group=g)
    perms, _ = conjugation_action(g, subs)
    return lat, LatticeAction(perms[list(g.generators)], n)


@functools.lru_cache(maxsize=64)
def _cached_subgroup_lattice(spec: str, order_cap: int):
    from .groups import build_group
    return from_subgroups(build_group(spec, order_cap))


def subgroup_lattice(spec: str, order_cap: int = 200) -> tuple[Lattice, LatticeAction]:
    """Memoized :func:`from_subgroups` keyed by group spec string."""
    return _cached_subgroup_lattice(spec, order_cap)


# -- quotient by the action ----------------------------------------------------

@dataclass(frozen=True, eq=False)
class QuotientPoset:
    classes: tuple[tuple[int, ...], ...]
    order: np.ndarray
    labels: tuple[str, ...]

    @property
    def multiplicities(self) -> tuple[int, ...]:
        return tuple(len(c) for c in self.classes)

    @property
    def size(self) -> int:
        return len(self.classes)

    def class_of(self, x: int) -> int:
        for i, c in enumerate(self.classes):
            if x in c:
                return i
        raise KeyError(x)

    def to_lattice(self) -> Lattice:
        return Lattice.from_leq(self.order, self.labels)


def class_label(base: str, multiplicity: int) -> str:
    return base if multiplicity == 1 else f"{{}}_{multiplicity}{base}"


def quotient(lat: Lattice, act: LatticeAction) -> QuotientPoset:
    classes = sorted(act.orbits, key=lambda o: o[0])
    k = len(classes)
    order = np.zeros((k, k), dtype=bool)
    for i, ci in enumerate(classes):
        for j, cj in enumerate(classes):
            order[i, j] = lat.leq[np.ix_(ci, [cj[0]])].any()
    labels = tuple(class_label(lat.labels[c[0]], len(c)) for c in classes)
    return QuotientPoset(tuple(tuple(c) for c in classes), order, labels)


# -- order-theoretic queries ---------------------------------------------------

def is_modular(lat: Lattice) -> bool:
    """a <= b implies a v (c ^ b) = (a v c) ^ b, for all triples."""
    m, j = lat.meet, lat.join
    for a, b in zip(*np.nonzero(lat.leq)):
        lhs = j[a, m[:, b]]
        rhs = m[j[a, :], b]
        if not np.array_equal(lhs, rhs):
            return False
    return True


def strict_order(lat: Lattice) -> np.ndarray:
    return lat.leq & ~np.eye(lat.size, dtype=bool)


def covering_matrix(lat: Lattice) -> np.ndarray:
    lt = strict_order(lat).astype(np.int64)
    return (lt > 0) & ((lt @ lt) == 0)


def covering_pairs(lat: Lattice) -> list[tuple[int, int]]:
    return [(int(a), int(b)) for a, b in zip(*np.nonzero(covering_matrix(lat)))]


def upper_covers(lat: Lattice, x: int) -> list[int]:
    return np.flatnonzero(covering_matrix(lat)[x]).tolist()


def meet_irreducibles(lat: Lattice) -> list[int]:
    """Elements other than top with exactly one upper cover."""
    counts = covering_matrix(lat).sum(axis=1)
    return [x for x in range(lat.size) if x != lat.top and counts[x] == 1]


def meet_irreducibles_by_meets(lat: Lattice) -> list[int]:
    """Elements other than top that are never the meet of two strictly larger elements."""
    out = []
    for x in range(lat.size):
        if x == lat.top:
            continue
        above = np.flatnonzero(strict_order(lat)[x])
        sub = lat.meet[np.ix_(above, above)]
        if not (sub == x).any():
            out.append(x)
    return out


def remove_bottom(lat: Lattice) -> Lattice:
    if lat.size < 2:
        raise LatticeError("cannot remove the bottom of a one-element lattice")
    keep = [x for x in range(lat.size) if x != lat.bottom]
    try:
        return Lattice.from_leq(lat.leq[np.ix_(keep, keep)], [lat.labels[x] for x in keep])
    except LatticeError as exc:
        raise LatticeError(f"removing the bottom does not leave a lattice: {exc}") from None


def restrict_action(act: LatticeAction, keep: list[int]) -> LatticeAction:
    """Action on the sub-poset ``keep``, which every generator must preserve."""
    pos = {x: i for i, x in enumerate(keep)}
    perms = []
    for p in act.perms:
        try:
            perms.append([pos[int(p[x])] for x in keep])
        except KeyError:
            raise LatticeError("action does not preserve the retained elements") from None
    return LatticeAction(np.array(perms, dtype=np.int64).reshape(-1, len(keep)), len(keep))
