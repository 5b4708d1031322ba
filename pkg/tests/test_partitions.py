import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import permutations, relation_pairs, relations
from factlat.errors import GroundMismatch, MalformedPartition, NotPermuting
from factlat.partitions import (
    BinRel,
    EquivRel,
    Permutation,
    apply_perm,
    compose,
    delta,
    equal_block_partitions,
    from_blocks,
    is_n_relation,
    is_regular,
    join_closure,
    join_permuting,
    meet,
    meet_all,
    nabla,
    permutes,
    restrict,
)


def test_canonical_form_ignores_labels():
    assert EquivRel([5, 5, 2, 9]) == EquivRel([0, 0, 1, 2])
    assert EquivRel([1, 0, 1]).blocks == ((0, 2), (1,))


def test_from_blocks_rejects_bad_input():
    with pytest.raises(MalformedPartition):
        from_blocks(4, [[0, 1], [1, 2, 3]])
    with pytest.raises(MalformedPartition):
        from_blocks(4, [[0, 1]])
    with pytest.raises(MalformedPartition):
        EquivRel([])


def test_bounds():
    assert delta(4).block_count == 4
    assert nabla(4).block_count == 1
    assert delta(4) <= nabla(4)


@given(relation_pairs())
def test_meet_is_greatest_lower_bound(pair):
    a, b = pair
    m = meet(a, b)
    assert m <= a and m <= b
    assert m == meet(b, a)
    for x in range(a.n):
        for y in range(a.n):
            assert m.related(x, y) == (a.related(x, y) and b.related(x, y))


@given(relation_pairs())
def test_join_is_least_upper_bound(pair):
    a, b = pair
    j = join_closure([a, b])
    assert a <= j and b <= j
    assert join_closure([j, a]) == j
    # absorption
    assert meet(a, j) == a
    assert join_closure([a, meet(a, b)]) == a


@given(relation_pairs())
def test_compose_matches_definition(pair):
    a, b = pair
    c = compose(a, b)
    for x in range(a.n):
        for z in range(a.n):
            expected = any(a.related(x, y) and b.related(y, z) for y in range(a.n))
            assert ((x, z) in c) == expected


@given(relation_pairs())
def test_permuting_pairs_join_by_composition(pair):
    a, b = pair
    if permutes(a, b):
        assert join_permuting(a, b) == join_closure([a, b])
        assert compose(a, b) == compose(b, a)
    else:
        with pytest.raises(NotPermuting):
            join_permuting(a, b)


@given(relations())
def test_self_composition_is_idempotent(a):
    assert compose(a, a) == a.to_binrel()
    assert permutes(a, delta(a.n)) and permutes(a, nabla(a.n))


def test_ground_mismatch():
    with pytest.raises(GroundMismatch):
        meet(delta(3), delta(4))


def test_meet_all_of_nothing_needs_ground():
    assert meet_all([], ground=3) == nabla(3)


@given(st.integers(1, 7).flatmap(lambda n: st.tuples(permutations(n), permutations(n), relations(n=n))))
def test_permutation_action(data):
    s, t, a = data
    assert apply_perm(s * t, a) == apply_perm(s, apply_perm(t, a))
    assert apply_perm(s.inverse(), apply_perm(s, a)) == a
    assert sorted(apply_perm(s, a).block_sizes) == sorted(a.block_sizes)


def test_permutation_cycles_round_trip():
    p = Permutation.from_cycles(6, [(0, 3, 5), (1, 2)])
    assert Permutation.from_cycles(6, p.cycles()) == p
    with pytest.raises(ValueError):
        Permutation([0, 0, 1])


@pytest.mark.parametrize("n,size", [(4, 2), (6, 2), (6, 3), (8, 4), (9, 3), (5, 2)])
def test_equal_block_partitions_count(n, size):
    found = list(equal_block_partitions(n, size))
    if n % size:
        assert found == []
        return
    m = n // size
    assert len(found) == math.factorial(n) // (math.factorial(size) ** m * math.factorial(m))
    assert len({tuple(p) for p in found}) == len(found)


def test_regularity():
    assert is_regular(from_blocks(6, [[0, 1], [2, 3], [4, 5]])) == 2
    assert is_regular(EquivRel([0, 0, 1])) is None
    assert is_n_relation(from_blocks(6, [[0, 1, 2], [3, 4, 5]]), 3)


def test_restrict():
    a = from_blocks(5, [[0, 3], [1, 2, 4]])
    r = restrict(a, [1, 3, 4])
    assert r.blocks == ((0, 2), (1,))


def test_binrel_equivalence_check():
    rel = BinRel.from_pairs(3, [(0, 0), (1, 1), (2, 2), (0, 1)])
    assert not rel.is_equivalence()
    with pytest.raises(NotPermuting):
        rel.to_equivrel()
