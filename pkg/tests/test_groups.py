from __future__ import annotations

import itertools

import numpy as np
import pytest

from helpers import subgroups_by_subsets
from translat.groups import (
    GroupError,
    Subgroup,
    build_group,
    conjugation_action,
    enumerate_subgroups,
    is_lossless,
    normalizer,
    parse_spec,
)


def _divisors(n):
    return [d for d in range(1, n + 1) if n % d == 0]


@pytest.mark.parametrize("spec,order", [
    ("C:1", 1), ("C:12", 12), ("D:2", 4), ("D:9", 18), ("Q:8", 8), ("Q:16", 16),
    ("Dic:3", 12), ("Dic:9", 36), ("F:5", 20), ("F:4", 12), ("F:8", 56), ("F:9", 72), ("A:4", 12),
])
def test_orders_and_group_axioms(spec, order):
    g = build_group(spec)
    assert g.order == order
    g.check()


def test_construction_is_deterministic():
    a, b = build_group("Dic:5"), build_group("Dic:5")
    assert np.array_equal(a.mul, b.mul)


@pytest.mark.parametrize("bad", ["X:3", "C", "C:", "C:x", "D:2:3"])
def test_parse_rejects_garbage(bad):
    with pytest.raises(GroupError):
        build_group(parse_spec(bad))


@pytest.mark.parametrize("bad", ["F:6", "F:25", "Q:12", "Q:4", "D:1", "Dic:1", "C:0", "C:201", "F:17"])
def test_unsupported_parameters(bad):
    with pytest.raises(GroupError):
        build_group(bad)


def test_order_cap_override():
    assert build_group("F:17", order_cap=400).order == 272
    with pytest.raises(GroupError):
        build_group("C:5", order_cap=401)


def test_perm_file(tmp_path):
    path = tmp_path / "s3.txt"
    path.write_text("# S_3\n(1 2 3)\n(1 2)\n")
    g = build_group(f"perm:{path}")
    assert g.order == 6
    assert len(enumerate_subgroups(g)) == 6


@pytest.mark.parametrize("spec", ["C:6", "D:3", "Q:8", "Dic:3", "A:4", "D:4"])
def test_subgroups_match_subset_oracle(spec):
    g = build_group(spec)
    ours = {frozenset(s.elements) for s in enumerate_subgroups(g)}
    assert ours == subgroups_by_subsets(g.mul.tolist())


@pytest.mark.parametrize("spec,count", [("Q:8", 6), ("C:7", 2), ("A:4", 10), ("D:9", 16), ("F:5", 14)])
def test_subgroup_counts(spec, count):
    assert len(enumerate_subgroups(build_group(spec))) == count


def test_cyclic_subgroup_count_is_divisor_count():
    for n in range(1, 101):
        assert len(enumerate_subgroups(build_group(f"C:{n}"))) == len(_divisors(n))


def test_canonical_order_and_lagrange():
    g = build_group("D:6")
    subs = enumerate_subgroups(g)
    keys = [s.sort_key() for s in subs]
    assert keys == sorted(keys)
    assert subs[0].order == 1 and subs[-1].order == g.order
    assert all(g.order % s.order == 0 for s in subs)


def test_conjugation_classes_d9():
    g = build_group("D:9")
    subs = enumerate_subgroups(g)
    _, classes = conjugation_action(g, subs)
    order2 = [c for c in classes if subs[c[0]].order == 2]
    assert len(order2) == 1 and len(order2[0]) == 9


def test_conjugation_classes_f5():
    g = build_group("F:5")
    subs = enumerate_subgroups(g)
    _, classes = conjugation_action(g, subs)
    shape = sorted((subs[c[0]].order, len(c)) for c in classes)
    assert shape == [(1, 1), (2, 5), (4, 5), (5, 1), (10, 1), (20, 1)]


def test_abelian_action_is_identity():
    g = build_group("C:12")
    subs = enumerate_subgroups(g)
    perms, _ = conjugation_action(g, subs)
    assert (perms == np.arange(len(subs))).all()


def test_action_preserves_inclusion():
    g = build_group("Dic:3")
    subs = enumerate_subgroups(g)
    perms, _ = conjugation_action(g, subs)
    for p in perms:
        for a, b in itertools.product(range(len(subs)), repeat=2):
            assert (subs[a] <= subs[b]) == (subs[p[a]] <= subs[p[b]])
            assert subs[a].order == subs[p[a]].order


def _normalizer_oracle(g, h):
    hs = set(h.elements)
    return {x for x in range(g.order)
            if {int(g.mul[g.mul[x, y], g.inv[x]]) for y in hs} == hs}


def test_normalizers():
    g = build_group("D:9")
    subs = enumerate_subgroups(g)
    refl = next(s for s in subs if s.order == 2)
    assert normalizer(g, refl).order == 2
    rot = next(s for s in subs if s.order == 9)
    assert normalizer(g, rot).order == 18
    q8 = build_group("Q:8")
    for s in enumerate_subgroups(q8):
        assert normalizer(q8, s).order == 8
    for s in subs:
        assert set(normalizer(g, s).elements) == _normalizer_oracle(g, s)


def _lossless_oracle(g):
    subs = [set(s.elements) for s in enumerate_subgroups(g)]

    def conj(x, s):
        return {int(g.mul[g.mul[x, y], g.inv[x]]) for y in s}

    for h in subs:
        norm = [x for x in range(g.order) if conj(x, h) == h]
        for k in subs:
            if not k <= h:
                continue
            for x in range(g.order):
                image = conj(x, k)
                if image <= h and not any(conj(n, k) == image for n in norm):
                    return False
    return True


@pytest.mark.parametrize("spec", ["C:12", "D:3", "D:4", "D:9", "Q:8", "Dic:3", "A:4", "F:5", "F:8"])
def test_lossless_matches_oracle(spec):
    g = build_group(spec)
    assert is_lossless(g) == _lossless_oracle(g)


@pytest.mark.parametrize("spec", ["A:4", "C:30", "D:9", "Q:8", "Dic:3"])
def test_lossless_true(spec):
    assert is_lossless(build_group(spec))


def test_lossy_frobenius():
    assert not is_lossless(build_group("F:8"))


def test_subgroup_helpers():
    a, b = Subgroup(0b11), Subgroup(0b1011)
    assert a <= b and a < b and not b <= a
    assert 3 in b and 2 not in b
    assert b.order == 3 and a.elements == (0, 1)
