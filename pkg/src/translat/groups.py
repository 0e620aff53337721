"""Finite groups as multiplication tables, and their subgroups as bitsets.

Every group is stored as an ``order x order`` table of element indices with the
identity at index 0.  Subgroups are Python ints used as bitsets over element
indices, wrapped in :class:`Subgroup` for ordering and display.
"""
from __future__ import annotations

import functools
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

DEFAULT_ORDER_CAP = 200
MAX_ORDER_CAP = 400

# Irreducible polynomials for the non-prime fields, lowest coefficient first.
_IRREDUCIBLE = {
    4: (2, (1, 1, 1)),        # x^2 + x + 1
    8: (2, (1, 1, 0, 1)),     # x^3 + x + 1
    9: (3, (1, 0, 1)),        # x^2 + 1
    16: (2, (1, 1, 0, 0, 1)),  # x^4 + x + 1
}

FAMILIES = {
    "C": "cyclic",
    "D": "dihedral",
    "Q": "quaternion",
    "Dic": "dicyclic",
    "F": "frobenius",
    "A": "alternating",
    "perm": "permgens",
}


class GroupError(ValueError):
    """Unsupported or malformed group specification."""


@dataclass(frozen=True)
class GroupSpec:
    family: str
    param: int | None = None
    path: str | None = None

    def __str__(self) -> str:
        tag = {v: k for k, v in FAMILIES.items()}[self.family]
        if self.family == "permgens":
            return f"{tag}:{self.path}"
        return f"{tag}:{self.param}"


def parse_spec(text: str) -> GroupSpec:
    """Parse ``C:<n>``, ``D:<n>``, ``Q:<2^k>``, ``Dic:<n>``, ``F:<q>``, ``A:<n>``, ``perm:<path>``."""
    tag, sep, rest = text.strip().partition(":")
    if not sep or tag not in FAMILIES or not rest:
        raise GroupError(f"cannot parse group spec {text!r}")
    family = FAMILIES[tag]
    if family == "permgens":
        return GroupSpec(family, path=rest)
    try:
        param = int(rest)
    except ValueError:
        raise GroupError(f"group parameter must be an integer in {text!r}") from None
    return GroupSpec(family, param=param)


@dataclass(frozen=True, eq=False)
class FiniteGroup:
    mul: np.ndarray
    inv: np.ndarray
    label: str
    identity: int = 0
    spec: GroupSpec | None = None

    @property
    def order(self) -> int:
        return int(self.mul.shape[0])

    @functools.cached_property
    def element_orders(self) -> np.ndarray:
        n = self.order
        orders = np.ones(n, dtype=np.int64)
        power = np.arange(n)
        done = power == self.identity
        k = 1
        while not done.all():
            power = self.mul[power, np.arange(n)]
            k += 1
            hit = (power == self.identity) & ~done
            orders[hit] = k
            done |= hit
        return orders

    @functools.cached_property
    def generators(self) -> tuple[int, ...]:
        """A small generating set, chosen greedily in element order."""
        gens: list[int] = []
        current = 1 << self.identity
        full = (1 << self.order) - 1
        # try high-order elements first so cyclic groups get one generator
        for x in sorted(range(self.order), key=lambda x: (-self.element_orders[x], x)):
            if current == full:
                break
            if not (current >> x) & 1:
                gens.append(x)
                current = generated_bits(self, gens)
        return tuple(gens)

    @functools.cached_property
    def conj(self) -> np.ndarray:
        """``conj[x, h] = x h x^-1``."""
        return self.mul[self.mul, self.inv[:, None]]

    def check(self) -> None:
        """Exhaustive associativity, unit and inverse checks."""
        n, e, mul, inv = self.order, self.identity, self.mul, self.inv
        if mul.shape != (n, n) or inv.shape != (n,):
            raise GroupError("table shape mismatch")
        idx = np.arange(n)
        if not ((mul[e] == idx).all() and (mul[:, e] == idx).all()):
            raise GroupError("identity is not a two-sided unit")
        if not ((mul[idx, inv] == e).all() and (mul[inv, idx] == e).all()):
            raise GroupError("inverse table is wrong")
        for a in range(n):
            left = mul[mul[a]]          # (a b) c, indexed [b, c]
            right = mul[a][mul]         # a (b c)
            if not np.array_equal(left, right):
                raise GroupError(f"multiplication is not associative at a={a}")


def _from_table(mul: np.ndarray, label: str, spec: GroupSpec | None) -> FiniteGroup:
    mul = np.ascontiguousarray(mul, dtype=np.int32)
    n = mul.shape[0]
    e = int(np.flatnonzero((mul == np.arange(n)).all(axis=1))[0])
    if e != 0:
        raise GroupError("identity must be element 0")
    inv = np.argmax(mul == e, axis=1).astype(np.int32)
    g = FiniteGroup(mul=mul, inv=inv, label=label, identity=0, spec=spec)
    g.check()
    return g


def _cyclic(n: int) -> np.ndarray:
    idx = np.arange(n)
    return (idx[:, None] + idx[None, :]) % n


def _dihedral(n: int) -> np.ndarray:
    # element r^i s^j stored at i + n*j
    order = 2 * n
    mul = np.empty((order, order), dtype=np.int64)
    for x in range(order):
        i, a = x % n, x // n
        for y in range(order):
            k, b = y % n, y // n
            mul[x, y] = (i + (k if a == 0 else -k)) % n + n * ((a + b) % 2)
    return mul


def _dicyclic(n: int) -> np.ndarray:
    # a^i x^j at i + 2n*j with a^(2n) = 1, x^2 = a^n, x a x^-1 = a^-1
    m = 2 * n
    order = 2 * m
    mul = np.empty((order, order), dtype=np.int64)
    for u in range(order):
        i, a = u % m, u // m
        for v in range(order):
            k, b = v % m, v // m
            if a == 0:
                mul[u, v] = (i + k) % m + m * b
            elif b == 0:
                mul[u, v] = (i - k) % m + m
            else:
                mul[u, v] = (i - k + n) % m
    return mul


def _field(q: int):
    """Addition and multiplication tables of GF(q) on 0..q-1."""
    if q in _IRREDUCIBLE:
        p, poly = _IRREDUCIBLE[q]
        deg = len(poly) - 1
    elif _is_prime(q):
        p, poly, deg = q, None, 1
    else:
        raise GroupError(f"no field construction for q={q}")

    def digits(x: int) -> list[int]:
        return [(x // p**i) % p for i in range(deg)]

    def number(ds) -> int:
        return sum(d * p**i for i, d in enumerate(ds))

    add = np.empty((q, q), dtype=np.int64)
    mul = np.empty((q, q), dtype=np.int64)
    for x in range(q):
        dx = digits(x)
        for y in range(q):
            dy = digits(y)
            add[x, y] = number([(a + b) % p for a, b in zip(dx, dy)])
            if poly is None:
                mul[x, y] = (x * y) % p
                continue
            prod = [0] * (2 * deg - 1)
            for i, a in enumerate(dx):
                for j, b in enumerate(dy):
                    prod[i + j] = (prod[i + j] + a * b) % p
            for top in range(len(prod) - 1, deg - 1, -1):
                c = prod[top]
                if c:
                    for i, pc in enumerate(poly):
                        prod[top - deg + i] = (prod[top - deg + i] - c * pc) % p
            mul[x, y] = number(prod[:deg])
    return add, mul


def _frobenius(q: int) -> np.ndarray:
    # affine maps x -> a x + b, stored at (a - 1) * q + b; identity is a=1, b=0
    add, fmul = _field(q)
    units = list(range(1, q))
    order = q * (q - 1)
    mul = np.empty((order, order), dtype=np.int64)
    for u in range(order):
        a1, b1 = units[u // q], u % q
        for v in range(order):
            a2, b2 = units[v // q], v % q
            a = fmul[a1, a2]
            b = add[fmul[a1, b2], b1]
            mul[u, v] = (a - 1) * q + b
    return mul


def _perm_table(gens: list[tuple[int, ...]], degree: int) -> np.ndarray:
    """Close permutation generators under composition (BFS from identity)."""
    ident = tuple(range(degree))
    elements = [ident]
    index = {ident: 0}
    frontier = [ident]
    while frontier:
        nxt = []
        for x in frontier:
            for s in gens:
                y = tuple(s[x[i]] for i in range(degree))  # apply x, then s
                if y not in index:
                    index[y] = len(elements)
                    elements.append(y)
                    nxt.append(y)
        frontier = nxt
    n = len(elements)
    mul = np.empty((n, n), dtype=np.int64)
    for i, x in enumerate(elements):
        for j, y in enumerate(elements):
            # product "x then y" as functions composed left to right
            mul[i, j] = index[tuple(y[x[k]] for k in range(degree))]
    return mul


def parse_cycles(line: str, degree: int | None = None) -> tuple[list[tuple[int, ...]], int]:
    """Parse cycle notation like ``(1 2 3)(4 5)`` over points 1..N."""
    cycles = [tuple(int(t) for t in re.split(r"[,\s]+", c.strip()) if t)
              for c in re.findall(r"\(([^()]*)\)", line)]
    if not cycles and line.strip() not in ("", "()"):
        raise GroupError(f"cannot parse cycle notation {line!r}")
    top = max((max(c) for c in cycles if c), default=1)
    return cycles, max(top, degree or 0)


def _cycles_to_perm(cycles, degree: int) -> tuple[int, ...]:
    perm = list(range(degree))
    for c in cycles:
        if len(set(c)) != len(c) or min(c, default=1) < 1:
            raise GroupError(f"bad cycle {c}")
        for a, b in zip(c, c[1:] + c[:1]):
            perm[a - 1] = b - 1
    return tuple(perm)


def read_perm_file(path: str | Path) -> list[tuple[int, ...]]:
    lines = [ln for ln in Path(path).read_text().splitlines()
             if ln.strip() and not ln.lstrip().startswith("#")]
    parsed = [parse_cycles(ln) for ln in lines]
    degree = max((d for _, d in parsed), default=1)
    return [_cycles_to_perm(c, degree) for c, _ in parsed]


def _alternating_gens(n: int) -> list[tuple[int, ...]]:
    if n < 3:
        return []
    gens = [_cycles_to_perm([(1, 2, 3)], n)]
    if n > 3:
        # (1 2 ... n) is even for odd n; otherwise use (2 3 ... n)
        cyc = tuple(range(1, n + 1)) if n % 2 else tuple(range(2, n + 1))
        gens.append(_cycles_to_perm([cyc], n))
    return gens


def _is_prime(n: int) -> bool:
    return n >= 2 and all(n % d for d in range(2, int(n**0.5) + 1))


def _expected_order(spec: GroupSpec) -> int | None:
    n = spec.param
    match spec.family:
        case "cyclic":
            return n
        case "dihedral":
            return 2 * n
        case "dicyclic":
            return 4 * n
        case "quaternion":
            return n
        case "frobenius":
            return n * (n - 1)
        case "alternating":
            return max(1, int(np.prod(range(1, n + 1))) // 2)
    return None


def build_group(spec: GroupSpec | str, order_cap: int = DEFAULT_ORDER_CAP) -> FiniteGroup:
    if isinstance(spec, str):
        spec = parse_spec(spec)
    if order_cap > MAX_ORDER_CAP:
        raise GroupError(f"order cap may not exceed {MAX_ORDER_CAP}")
    n = spec.param
    fam = spec.family
    if fam != "permgens":
        if n is None or n < 1:
            raise GroupError(f"parameter must be positive in {spec}")
        if fam == "dihedral" and n < 2:
            raise GroupError("dihedral parameter must be >= 2")
        if fam == "dicyclic" and n < 2:
            raise GroupError("dicyclic parameter must be >= 2")
        if fam == "quaternion" and (n < 8 or n & (n - 1)):
            raise GroupError("quaternion parameter must be a power of two >= 8")
        if fam == "frobenius" and not (_is_prime(n) or n in _IRREDUCIBLE):
            raise GroupError(f"frobenius parameter {n} is not a supported prime power")
        expected = _expected_order(spec)
        if expected > order_cap:
            raise GroupError(f"{spec} has order {expected} above the cap {order_cap}")

    if fam == "cyclic":
        return _from_table(_cyclic(n), f"C_{n}", spec)
    if fam == "dihedral":
        return _from_table(_dihedral(n), f"D_{n}", spec)
    if fam == "dicyclic":
        return _from_table(_dicyclic(n), f"Dic_{n}", spec)
    if fam == "quaternion":
        return _from_table(_dicyclic(n // 4), f"Q_{n}", spec)
    if fam == "frobenius":
        return _from_table(_frobenius(n), f"F_{n}", spec)
    if fam == "alternating":
        gens = _alternating_gens(n)
        return _from_table(_perm_table(gens, max(n, 1)), f"A_{n}", spec)
    gens = read_perm_file(spec.path)
    degree = len(gens[0]) if gens else 1
    gens = [tuple(g) + tuple(range(len(g), degree)) for g in gens]
    # cap check has to happen during closure for arbitrary generators
    mul = _perm_table(gens, degree)
    if mul.shape[0] > order_cap:
        raise GroupError(f"permutation group has order {mul.shape[0]} above the cap {order_cap}")
    return _from_table(mul, f"G_{mul.shape[0]}", spec)


# -- subgroups ---------------------------------------------------------------

def mask_to_int(mask: np.ndarray) -> int:
    return int.from_bytes(np.packbits(mask, bitorder="little").tobytes(), "little")


def int_to_indices(bits: int) -> list[int]:
    out = []
    i = 0
    while bits:
        if bits & 1:
            out.append(i)
        bits >>= 1
        i += 1
    return out


def generated_bits(g: FiniteGroup, gens) -> int:
    """Bitset of the subgroup generated by element indices ``gens``."""
    gens = np.asarray(sorted(set(gens)), dtype=np.int64)
    mask = np.zeros(g.order, dtype=bool)
    mask[g.identity] = True
    frontier = np.array([g.identity])
    while frontier.size and gens.size:
        new = np.unique(g.mul[frontier][:, gens])
        new = new[~mask[new]]
        mask[new] = True
        frontier = new
    return mask_to_int(mask)


@functools.total_ordering
@dataclass(frozen=True)
class Subgroup:
    members: int
    elements: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(int_to_indices(self.members)))

    @property
    def order(self) -> int:
        return len(self.elements)

    def __contains__(self, x: int) -> bool:
        return bool((self.members >> x) & 1)

    def __le__(self, other: Subgroup) -> bool:
        return self.members & ~other.members == 0

    def __lt__(self, other: Subgroup) -> bool:
        return self <= other and self.members != other.members

    def sort_key(self) -> tuple:
        return (self.order, self.elements)


def enumerate_subgroups(g: FiniteGroup) -> list[Subgroup]:
    """All subgroups, sorted by (order, member indices).

    Seeds with the cyclic subgroups and joins each known subgroup with every
    cyclic subgroup until nothing new appears.  Every subgroup is a join of
    cyclic subgroups, so this reaches all of them.
    """
    cyclic: dict[int, int] = {}
    for x in range(g.order):
        bits = generated_bits(g, [x])
        cyclic.setdefault(bits, x)
    gens_of: dict[int, tuple[int, ...]] = {b: (x,) for b, x in cyclic.items()}
    gens_of[1 << g.identity] = ()
    queue = list(gens_of)
    while queue:
        nxt = []
        for sub in queue:
            base = gens_of[sub]
            for cbits, x in cyclic.items():
                if cbits & ~sub == 0:
                    continue
                joined = generated_bits(g, base + (x,))
                if joined not in gens_of:
                    gens_of[joined] = base + (x,)
                    nxt.append(joined)
        queue = nxt
    return sorted((Subgroup(b) for b in gens_of), key=Subgroup.sort_key)


def conjugate_bits(g: FiniteGroup, x: int, sub: Subgroup) -> int:
    mask = np.zeros(g.order, dtype=bool)
    mask[g.conj[x, list(sub.elements)]] = True
    return mask_to_int(mask)


def conjugation_action(g: FiniteGroup, subs: list[Subgroup]) -> tuple[np.ndarray, list[list[int]]]:
    """Permutations ``perms[x, i] = index of x H_i x^-1`` and the conjugacy classes."""
    index = {s.members: i for i, s in enumerate(subs)}
    conj = g.conj
    perms = np.empty((g.order, len(subs)), dtype=np.int64)
    for i, s in enumerate(subs):
        elems = np.array(s.elements)
        images = conj[:, elems]                      # row x: x h x^-1 for h in H
        mask = np.zeros((g.order, g.order), dtype=bool)
        mask[np.arange(g.order)[:, None], images] = True
        packed = np.packbits(mask, axis=1, bitorder="little")
        for x in range(g.order):
            bits = int.from_bytes(packed[x].tobytes(), "little")
            try:
                perms[x, i] = index[bits]
            except KeyError:
                raise GroupError("subgroup list is not closed under conjugation") from None
    seen: set[int] = set()
    classes = []
    for i in range(len(subs)):
        if i in seen:
            continue
        cls = sorted(set(perms[:, i].tolist()))
        seen.update(cls)
        classes.append(cls)
    return perms, classes


def normalizer(g: FiniteGroup, h: Subgroup) -> Subgroup:
    member = np.zeros(g.order, dtype=bool)
    member[list(h.elements)] = True
    mask = member[g.conj[:, list(h.elements)]].all(axis=1)
    return Subgroup(mask_to_int(mask))


def is_lossless(g: FiniteGroup, subs: list[Subgroup] | None = None,
                perms: np.ndarray | None = None) -> bool:
    """For K <= H and x with xKx^-1 <= H, some n in N(H) has nKn^-1 = xKx^-1."""
    if subs is None:
        subs = enumerate_subgroups(g)
    if perms is None:
        perms, _ = conjugation_action(g, subs)
    for hi, h in enumerate(subs):
        in_norm = perms[:, hi] == hi
        for ki, k in enumerate(subs):
            if not k <= h:
                continue
            images = set(perms[:, ki].tolist())
            inside = {j for j in images if subs[j] <= h}
            via_norm = set(perms[in_norm, ki].tolist())
            if not inside <= via_norm:
                return False
    return True


def element_order_profile(g: FiniteGroup, sub: Subgroup) -> dict[int, int]:
    orders = g.element_orders[list(sub.elements)]
    vals, counts = np.unique(orders, return_counts=True)
    return dict(zip(vals.tolist(), counts.tolist()))


def subgroup_label(g: FiniteGroup, sub: Subgroup, index: int | None = None) -> str:
    """Structure name when recognizable from order and element-order profile."""
    n = sub.order
    if n == 1:
        return "e"
    if n == g.order:
        return g.label
    elems = list(sub.elements)
    orders = g.element_orders[elems]
    if orders.max() == n:
        return f"C_{n}"
    sub_mul = g.mul[np.ix_(elems, elems)]
    abelian = np.array_equal(sub_mul, sub_mul.T)
    nontrivial = set(orders.tolist()) - {1}
    if abelian and len(nontrivial) == 1 and _is_prime(p := nontrivial.pop()):
        k = round(np.log(n) / np.log(p))
        return f"C_{p}^{k}"
    if n % 2 == 0 and (orders == n // 2).any():
        x = elems[int(np.flatnonzero(orders == n // 2)[0])]
        rot = generated_bits(g, [x])
        outside = [o for y, o in zip(elems, orders) if not (rot >> y) & 1]
        if all(o == 2 for o in outside):
            return f"D_{n // 2}"
        if n % 4 == 0 and all(o == 4 for o in outside) and (orders == 2).sum() == 1:
            m = n // 4
            return f"Q_{n}" if m & (m - 1) == 0 else f"Dic_{m}"
    if n == 12 and element_order_profile(g, sub) == {1: 1, 2: 3, 3: 8}:
        return "A_4"
    return f"H{n}#{index}" if index is not None else f"H{n}"
