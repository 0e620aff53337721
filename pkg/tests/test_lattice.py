from __future__ import annotations

import itertools

import numpy as np
import pytest

from helpers import GOLDEN
from translat.groups import build_group
from translat.lattice import (
    Lattice,
    LatticeAction,
    LatticeError,
    covering_pairs,
    from_subgroups,
    is_modular,
    meet_irreducibles,
    meet_irreducibles_by_meets,
    quotient,
    remove_bottom,
    restrict_action,
    subgroup_lattice,
    upper_covers,
)


def chain(n: int) -> Lattice:
    idx = np.arange(n)
    return Lattice.from_leq(idx[:, None] <= idx[None, :])


def isomorphic(a: Lattice, b: Lattice) -> bool:
    if a.size != b.size:
        return False
    return any((a.leq == b.leq[np.ix_(p, p)]).all() for p in map(list, itertools.permutations(range(a.size))))


def test_cyclic_prime_square_is_a_chain():
    lat, _ = subgroup_lattice("C:9")
    assert lat.size == 3 and isomorphic(lat, chain(3))


def test_trivial_group():
    lat, act = subgroup_lattice("C:1")
    assert lat.size == 1 and lat.bottom == lat.top == 0
    assert act.orbits == ((0,),)


def test_d3_lattice_and_orbits():
    lat, act = subgroup_lattice("D:3")
    assert lat.size == 6
    assert sorted(len(o) for o in act.orbits) == [1, 1, 1, 3]
    lat.check()
    act.check(lat)


@pytest.mark.parametrize("spec", GOLDEN)
def test_lattice_tables(spec):
    lat, act = subgroup_lattice(spec)
    lat.check()
    act.check(lat)
    subs = lat.subgroups
    for a, b in itertools.product(range(lat.size), repeat=2):
        assert subs[lat.meet[a, b]].members == subs[a].members & subs[b].members
        j = subs[lat.join[a, b]].members
        assert subs[a].members & ~j == 0 and subs[b].members & ~j == 0


@pytest.mark.parametrize("spec", GOLDEN)
def test_action_maps_covers_to_covers(spec):
    lat, act = subgroup_lattice(spec)
    covers = set(covering_pairs(lat))
    for p in act.perms:
        assert {(int(p[a]), int(p[b])) for a, b in covers} == covers


@pytest.mark.parametrize("spec", GOLDEN + ["D:36", "F:8", "Dic:18"])
def test_meet_irreducible_characterizations_agree(spec):
    lat, _ = subgroup_lattice(spec)
    assert meet_irreducibles(lat) == meet_irreducibles_by_meets(lat)


def test_quotient_d9_labels():
    q = quotient(*subgroup_lattice("D:9"))
    assert q.labels == ("e", "{}_9C_2", "C_3", "{}_3D_3", "C_9", "D_9")
    assert sum(q.multiplicities) == 16


def test_quotient_trivial_action_equals_lattice():
    lat, act = subgroup_lattice("C:12")
    q = quotient(lat, act)
    assert q.size == lat.size and (q.order == lat.leq).all()


@pytest.mark.parametrize("spec", GOLDEN)
def test_quotient_order_is_a_partial_order(spec):
    q = quotient(*subgroup_lattice(spec))
    o = q.order
    assert o.diagonal().all()
    assert not (o & o.T & ~np.eye(q.size, dtype=bool)).any()
    assert not ((o.astype(int) @ o.astype(int) > 0) & ~o).any()


def test_a4_quotient_is_the_pentagon():
    q = quotient(*subgroup_lattice("A:4"))
    assert q.size == 5
    pentagon = q.to_lattice()
    assert not is_modular(pentagon)
    n5 = Lattice.from_leq([[1, 1, 1, 1, 1], [0, 1, 1, 0, 1], [0, 0, 1, 0, 1], [0, 0, 0, 1, 1], [0, 0, 0, 0, 1]])
    assert isomorphic(pentagon, n5)


@pytest.mark.parametrize("spec", ["C:12", "C:30", "C:8", "C:36", "Q:8"])
def test_abelian_and_q8_lattices_are_modular(spec):
    assert is_modular(subgroup_lattice(spec)[0])


def test_chain_is_modular():
    assert is_modular(chain(5))


def test_covering_pairs():
    assert len(covering_pairs(chain(3))) == 2
    lat, _ = subgroup_lattice("Q:8")
    assert len(covering_pairs(lat)) == 7
    lat, _ = subgroup_lattice("A:4")
    orders = [s.order for s in lat.subgroups]
    e = lat.bottom
    c3 = orders.index(3)
    v4 = orders.index(4)
    assert (e, c3) in covering_pairs(lat)
    assert (e, v4) not in covering_pairs(lat)
    assert lat.top in upper_covers(lat, v4)


def test_meet_irreducibles_q8():
    lat, _ = subgroup_lattice("Q:8")
    mi = meet_irreducibles(lat)
    assert sorted(lat.subgroups[x].order for x in mi) == [1, 4, 4, 4]


def test_meet_irreducibles_chain():
    assert meet_irreducibles(chain(4)) == [0, 1, 2]


def test_meet_irreducibles_d36():
    lat, act = subgroup_lattice("D:36")
    mi = set(meet_irreducibles(lat))
    classes = sorted(lat.labels[o[0]] for o in act.orbits if mi & set(o))
    assert classes == sorted(["C_36", "D_12", "D_4", "D_18", "D_18", "D_9", "D_9"])


def test_meet_irreducibles_not_read_off_the_quotient():
    # F_8 has seven conjugate C_2 which are not meet-irreducible in Sub(G)
    lat, act = subgroup_lattice("F:8")
    mi = set(meet_irreducibles(lat))
    c2 = [x for x in range(lat.size) if lat.subgroups[x].order == 2]
    assert len(c2) == 7 and not mi & set(c2)


def test_remove_bottom():
    assert remove_bottom(chain(2)).size == 1
    assert isomorphic(remove_bottom(chain(3)), chain(2))
    lat, act = subgroup_lattice("Q:8")
    smaller = remove_bottom(lat)
    assert smaller.size == 5
    assert smaller.labels[smaller.bottom] == "C_2"
    assert isomorphic(smaller, subgroup_lattice("D:2")[0])
    keep = [x for x in range(lat.size) if x != lat.bottom]
    restrict_action(act, keep).check(smaller)


def test_remove_bottom_errors():
    with pytest.raises(LatticeError):
        remove_bottom(chain(1))
    # bottom covered by two atoms leaves two minimal elements
    with pytest.raises(LatticeError):
        remove_bottom(subgroup_lattice("C:6")[0])


def test_rejects_non_lattices():
    with pytest.raises(LatticeError):
        Lattice.from_leq([[1, 0], [0, 1]])
    bowtie = np.eye(6, dtype=bool)
    bowtie[0, :] = True
    bowtie[:, 5] = True
    for a in (1, 2):
        for b in (3, 4):
            bowtie[a, b] = True
    with pytest.raises(LatticeError):
        Lattice.from_leq(bowtie)
    with pytest.raises(LatticeError):
        Lattice.from_leq([[1, 1], [1, 1]])


def test_trivial_action_orbits():
    act = LatticeAction.trivial(4)
    assert act.orbits == ((0,), (1,), (2,), (3,))
    assert len(act.pair_orbits(chain(4))) == 6


def test_from_subgroups_matches_memoized():
    lat, _ = from_subgroups(build_group("Dic:3"))
    assert lat.digest == subgroup_lattice("Dic:3")[0].digest
