"""Enumerating every transfer system on a lattice, and invariants built on that."""
from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass, field

from .groups import FiniteGroup, GroupSpec
from .lattice import (
    Lattice,
    LatticeAction,
    from_subgroups,
    meet_irreducibles,
    remove_bottom,
    restrict_action,
)
from .transfer import (
    TransferSystem,
    _wrap,
    close_rows,
    compatibility_failure,
    compatible,
    complete,
    extend,
    is_connected,
    is_cosaturated,
    is_saturated,
    minimal_generating_orbits,
    register_enumeration,
    saturated_hull,
    trivial,
)

DEFAULT_SIZE_CAP = 20
ORACLE_SIZE_CAP = 6


class EnumerationError(ValueError):
    pass


@dataclass(frozen=True)
class Decoration:
    saturated: bool
    cosaturated: bool
    lsp: bool
    connected: bool

    @property
    def bisaturated(self) -> bool:
        return self.saturated and self.cosaturated

    def as_tuple(self) -> tuple[bool, bool, bool, bool]:
        return (self.saturated, self.cosaturated, self.lsp, self.connected)


@dataclass
class TsLattice:
    lattice: Lattice
    action: LatticeAction
    systems: list[TransferSystem]
    hasse_edges: list[tuple[int, int]] = field(default_factory=list)
    decorations: list[Decoration] = field(default_factory=list)

    def __post_init__(self):
        if not self.hasse_edges and len(self.systems) > 1:
            self.hasse_edges = inclusion_covers(self.systems)

    def __len__(self) -> int:
        return len(self.systems)

    @property
    def trivial_index(self) -> int:
        return self.systems.index(trivial(self.lattice, self.action))

    @property
    def complete_index(self) -> int:
        return self.systems.index(complete(self.lattice, self.action))

    def index(self, ts: TransferSystem) -> int:
        return self.systems.index(ts)


def _sort_key(ts: TransferSystem):
    return (len(ts.edges()), ts.key)


def inclusion_covers(systems: list[TransferSystem]) -> list[tuple[int, int]]:
    bits = [t.bits for t in systems]
    n = len(bits)
    below = [[j for j in range(n) if j != i and bits[j] & ~bits[i] == 0] for i in range(n)]
    covers = []
    for i in range(n):
        under = set(below[i])
        for j in below[i]:
            # j is covered by i unless some k lies strictly between
            if not any(bits[j] & ~bits[k] == 0 for k in under if k != j):
                covers.append((j, i))
    return sorted(covers)


def decorate(tsl: TsLattice) -> None:
    full = complete(tsl.lattice, tsl.action)
    hulls = [saturated_hull(t) for t in tsl.systems]
    decorations = []
    for t, hull in zip(tsl.systems, hulls):
        lsp = True
        for other in tsl.systems:
            if other == hull or other == full or not t <= other:
                continue
            if compatible(t, other):
                lsp = False
                break
        decorations.append(Decoration(is_saturated(t), is_cosaturated(t), lsp, is_connected(t)))
    tsl.decorations = decorations


def enumerate_all(lat: Lattice, act: LatticeAction, size_cap: int = DEFAULT_SIZE_CAP,
                  decorations: bool = True) -> TsLattice:
    """All transfer systems on ``(lat, act)``, sorted by (edge count, relation bytes).

    Every system is a union of pair-orbits, so each one is reached from the
    trivial system by repeatedly closing up after adding a single missing
    orbit.
    """
    if lat.size > size_cap:
        raise EnumerationError(f"lattice has {lat.size} elements, cap is {size_cap}")
    orbits = act.pair_orbits(lat)
    start = tuple(close_rows(lat, act, [0] * lat.size))
    found = {start}
    queue = deque([start])
    while queue:
        rows = queue.popleft()
        for orbit in orbits:
            k, h = orbit[0]
            if (rows[k] >> h) & 1:
                continue
            new = list(rows)
            for a, b in orbit:
                new[a] |= 1 << b
            new = tuple(close_rows(lat, act, new))
            if new not in found:
                found.add(new)
                queue.append(new)
    systems = sorted((_wrap(lat, act, r) for r in found), key=_sort_key)
    register_enumeration(systems[0].lattice_ref, len(systems))
    tsl = TsLattice(lat, act, systems)
    if decorations:
        decorate(tsl)
    return tsl


def brute_force_oracle(lat: Lattice, act: LatticeAction) -> TsLattice:
    """Filter every reflexive relation inside the order by the five axioms directly."""
    n = lat.size
    if n > ORACLE_SIZE_CAP:
        raise EnumerationError(f"oracle is limited to {ORACLE_SIZE_CAP} elements")
    pairs = [(a, b) for a in range(n) for b in range(n) if a != b and lat.leq[a][b]]
    meet = lat.meet.tolist()
    perms = act.perms.tolist()
    found = []
    for mask in range(1 << len(pairs)):
        rel = [[a == b for b in range(n)] for a in range(n)]
        for i, (a, b) in enumerate(pairs):
            if mask >> i & 1:
                rel[a][b] = True
        ok = all(
            rel[k][h] or not (rel[k][m] and rel[m][h])
            for k in range(n) for m in range(n) for h in range(n)
        ) and all(
            rel[meet[k][x]][meet[h][x]]
            for k in range(n) for h in range(n) if rel[k][h]
            for x in range(n) if lat.leq[x][h]
        ) and all(
            rel[p[k]][p[h]] for p in perms for k in range(n) for h in range(n) if rel[k][h]
        )
        if ok:
            rows = [sum(1 << h for h in range(n) if rel[k][h]) for k in range(n)]
            found.append(_wrap(lat, act, rows))
    return TsLattice(lat, act, sorted(found, key=_sort_key))


# -- widths ----------------------------------------------------------------------

def factorize(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


_FAMILY_ALIASES = {"D": "dihedral", "Q": "quaternion", "Dic": "dicyclic"}


def width_formula(family: str, param: int) -> int:
    """Closed-form width for dihedral ``D_n``, quaternion ``Q_{2^k}`` and dicyclic ``Dic_n``.

    ``param`` is the group-spec parameter: n for D and Dic, the order for Q.
    """
    family = _FAMILY_ALIASES.get(family, family)
    if family == "quaternion":
        if param < 8 or param & (param - 1):
            raise ValueError("quaternion order must be a power of two >= 8")
        m = param.bit_length() - 1 - 2
        return 2 * m + 2
    if family not in ("dihedral", "dicyclic"):
        raise ValueError(f"no width formula for family {family!r}")
    if param < 2:
        raise ValueError("parameter must be at least 2")
    f = factorize(param)
    m = f.pop(2, 0)
    odd = sum(f.values())
    return 2 * m + (1 if family == "dihedral" else 2) + odd


@dataclass
class WidthReport:
    group: str
    width: int
    classes: list[int]
    class_labels: list[str]
    generating_edges: list[tuple[int, int]]
    formula_value: int | None = None

    def edge_labels(self, lat: Lattice) -> list[str]:
        return [f"{lat.labels[k]} -> {lat.labels[h]}" for k, h in self.generating_edges]


def width(g: FiniteGroup, lat: Lattice | None = None, act: LatticeAction | None = None) -> WidthReport:
    """Number of conjugacy classes of meet-irreducible subgroups."""
    if lat is None or act is None:
        lat, act = from_subgroups(g)
    mi = set(meet_irreducibles(lat))
    reps = [o[0] for o in act.orbits if mi & set(o)]
    formula = None
    spec: GroupSpec | None = g.spec
    if spec is not None and spec.family in ("dihedral", "quaternion", "dicyclic"):
        formula = width_formula(spec.family, spec.param)
    return WidthReport(
        group=g.label,
        width=len(reps),
        classes=reps,
        class_labels=[lat.labels[r] for r in reps],
        generating_edges=[(r, lat.top) for r in reps],
        formula_value=formula,
    )


def complexity(lat: Lattice, act: LatticeAction, tsl: TsLattice | None = None) -> tuple[int, Counter]:
    """Largest orbit-granular minimal generating set, with the size distribution."""
    if tsl is None:
        tsl = enumerate_all(lat, act, decorations=False)
    dist = Counter(len(minimal_generating_orbits(t)) for t in tsl.systems)
    return max(dist), dist


# -- Hasse statistics and audits -------------------------------------------------

def _adjacency(tsl: TsLattice) -> list[list[int]]:
    adj: list[list[int]] = [[] for _ in tsl.systems]
    for a, b in tsl.hasse_edges:
        adj[a].append(b)
    return adj


def _bfs(adj: list[list[int]], start: int) -> list[int]:
    dist = [-1] * len(adj)
    dist[start] = 0
    queue = deque([start])
    while queue:
        x = queue.popleft()
        for y in adj[x]:
            if dist[y] < 0:
                dist[y] = dist[x] + 1
                queue.append(y)
    return dist


@dataclass
class HasseStats:
    count: int
    shortest_path_length: int
    decoration_counts: dict[str, int]
    bisaturated_count: int


def hasse_stats(tsl: TsLattice) -> HasseStats:
    """Shortest trivial-to-complete path is measured along covering edges only."""
    dist = _bfs(_adjacency(tsl), tsl.trivial_index)
    counts = {
        name: sum(getattr(d, name) for d in tsl.decorations)
        for name in ("saturated", "cosaturated", "lsp", "connected")
    }
    counts["lsp_not_connected"] = sum(d.lsp and not d.connected for d in tsl.decorations)
    return HasseStats(
        count=len(tsl.systems),
        shortest_path_length=dist[tsl.complete_index],
        decoration_counts=counts,
        bisaturated_count=sum(d.bisaturated for d in tsl.decorations),
    )


def shortest_paths(tsl: TsLattice, limit: int | None = None) -> list[list[int]]:
    adj = _adjacency(tsl)
    dist = _bfs(adj, tsl.trivial_index)
    target = tsl.complete_index
    to_target = _bfs([[a for a, bs in enumerate(adj) if x in bs] for x in range(len(adj))], target)
    total = dist[target]
    out: list[list[int]] = []

    def walk(path):
        if limit is not None and len(out) >= limit:
            return
        x = path[-1]
        if x == target:
            out.append(list(path))
            return
        for y in adj[x]:
            if dist[y] == dist[x] + 1 and to_target[y] == total - dist[y]:
                path.append(y)
                walk(path)
                path.pop()

    walk([tsl.trivial_index])
    return out


def audit_bisaturated_paths(tsl: TsLattice) -> dict:
    """Bisaturated nodes met along trivial-to-complete paths, under two readings.

    Reading "all paths": the best count over every upward path.  Reading
    "shortest paths": the best and worst count over shortest paths only.
    """
    adj = _adjacency(tsl)
    bis = [int(d.bisaturated) for d in tsl.decorations]
    start, target = tsl.trivial_index, tsl.complete_index
    order = sorted(range(len(adj)), key=lambda i: len(tsl.systems[i].edges()))
    best = [-1] * len(adj)
    best[start] = bis[start]
    for x in order:
        if best[x] < 0:
            continue
        for y in adj[x]:
            best[y] = max(best[y], best[x] + bis[y])
    paths = shortest_paths(tsl)
    per_path = [sum(bis[i] for i in p) for p in paths]
    max_all = best[target]
    max_short = max(per_path)
    report = {
        "systems": len(tsl.systems),
        "shortest_path_length": len(paths[0]) - 1,
        "shortest_path_count": len(paths),
        "bisaturated_total": sum(bis),
        "max_bisaturated_all_paths": max_all,
        "max_bisaturated_shortest_paths": max_short,
        "min_bisaturated_shortest_paths": min(per_path),
        "agree": max_all == max_short,
        "every_shortest_attains_max": min(per_path) == max_all,
        "counterexamples": [] if max_all == max_short else [
            {"max_all_paths": max_all, "max_shortest_paths": max_short}],
    }
    return report


def components(ts: TransferSystem) -> list[set[int]]:
    """Connected components of the undirected graph of non-reflexive edges."""
    n = ts.lattice.size
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for k, h in ts.edges():
        parent[find(k)] = find(h)
    groups: dict[int, set[int]] = {}
    for x in range(n):
        groups.setdefault(find(x), set()).add(x)
    return sorted(groups.values(), key=min)


def two_component_hypothesis(ts: TransferSystem, strict: bool = False) -> bool:
    """Top is isolated; with ``strict``, everything else also hangs together with bottom."""
    lat = ts.lattice
    if lat.size < 2:
        return False
    comps = components(ts)
    top_comp = next(c for c in comps if lat.top in c)
    if top_comp != {lat.top}:
        return False
    return len(comps) == 2 if strict else True


LSP_WITNESSES = ("literal", "hull")


def audit_lsp_two_component(tsl: TsLattice, strict: bool = False, witness: str = "literal") -> dict:
    """Systems with an isolated top: check they are not LSP and are compatible
    with the system obtained by adding bottom -> top.

    ``witness="literal"`` adds bottom -> top to T itself; ``"hull"`` adds it to
    Hull(T).  Every compatibility failure is reported with its witness triple.
    """
    if witness not in LSP_WITNESSES:
        raise ValueError(f"witness must be one of {LSP_WITNESSES}")
    lat = tsl.lattice
    checked = []
    counterexamples = []
    for i, (t, d) in enumerate(zip(tsl.systems, tsl.decorations)):
        if not two_component_hypothesis(t, strict=strict):
            continue
        base = saturated_hull(t) if witness == "hull" else t
        partner = extend(base, [(lat.bottom, lat.top)])
        failure = compatibility_failure(t, partner)
        checked.append(i)
        if d.lsp or failure is not None:
            counterexamples.append({
                "index": i,
                "edges": [list(e) for e in t.edges()],
                "is_lsp": d.lsp,
                "compatible_with_partner": failure is None,
                "failure": list(failure) if failure else None,
            })
    return {
        "systems": len(tsl.systems),
        "reading": "strict" if strict else "isolated-top",
        "witness": witness,
        "matching": checked,
        "counterexamples": counterexamples,
    }


def audit_report(tsl: TsLattice) -> dict:
    """Both conjecture audits, the LSP one under every reading and witness."""
    return {
        "bisaturated_paths": audit_bisaturated_paths(tsl),
        "lsp_two_component": [
            audit_lsp_two_component(tsl, strict=strict, witness=w)
            for strict in (False, True) for w in LSP_WITNESSES
        ],
    }


def count_counterexamples(report: dict) -> int:
    return (len(report["bisaturated_paths"]["counterexamples"])
            + sum(len(r["counterexamples"]) for r in report["lsp_two_component"]))


def restricted_count_bijection(lat: Lattice, act: LatticeAction) -> tuple[int, int]:
    """Systems holding every bottom edge, against all systems on the lattice minus bottom."""
    full = enumerate_all(lat, act, decorations=False)
    b = lat.bottom
    restricted = sum(1 for t in full.systems if t.rows[b] == lat.up[b])
    smaller = remove_bottom(lat)
    keep = [x for x in range(lat.size) if x != b]
    sub_act = restrict_action(act, keep)
    removed = len(enumerate_all(smaller, sub_act, decorations=False).systems)
    return restricted, removed


def catalan(n: int) -> int:
    from math import comb
    return comb(2 * n, n) // (n + 1)


def all_upward_paths(tsl: TsLattice) -> list[list[int]]:
    """Every trivial-to-complete path along covering edges; small diagrams only."""
    adj = _adjacency(tsl)
    out = []

    def walk(path):
        if path[-1] == tsl.complete_index:
            out.append(list(path))
            return
        for y in adj[path[-1]]:
            walk(path + [y])

    walk([tsl.trivial_index])
    return out

