import itertools
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

import cases
from factlat import eqstar
from factlat.eqstar import RelFamily
from factlat.errors import NoOverlap, NotDivisible, NotNRelation, Not2Relation, OddBlockCount
from factlat.partitions import EquivRel, delta, from_blocks, nabla


def test_enumerate_edge_cases():
    assert list(eqstar.enumerate_n_relations(6, 6)) == [nabla(6)]
    assert list(eqstar.enumerate_n_relations(6, 1)) == [delta(6)]
    assert len(list(eqstar.enumerate_n_relations(4, 2))) == 3
    assert len(eqstar.all_n_relations(12, 2)) == 10395
    assert len(eqstar.all_n_relations(12, 4)) == 5775
    with pytest.raises(NotDivisible):
        list(eqstar.enumerate_n_relations(6, 4))


def test_family_deduplicates():
    a = from_blocks(4, [[0, 1], [2, 3]])
    fam = RelFamily(4, [a, EquivRel([7, 7, 3, 3])])
    assert len(fam) == 1 and a in fam


def test_upper_and_lower_examples():
    theta = from_blocks(8, [[0, 1], [2, 3], [4, 5], [6, 7]])
    assert len(eqstar.upper_k([theta], 4)) == 3
    assert eqstar.upper_k(RelFamily(8), 4) == eqstar.all_n_relations(8, 4)
    assert eqstar.lower_n([nabla(8)], 2) == eqstar.all_n_relations(8, 2)
    with pytest.raises(NotDivisible):
        eqstar.upper_k([theta], 3)


@pytest.mark.parametrize("seed", range(20))
def test_operators_match_brute_force(seed):
    rng = random.Random(seed)
    n = 8
    fam = RelFamily(n, [cases.random_pairing(n, rng) for _ in range(rng.randint(1, 2))])
    assert list(eqstar.upper_k(fam, 4)) == cases.brute_upper(fam, 4)
    top = eqstar.upper_k(fam, 4)
    if len(top):
        brute = [r for r in eqstar.all_n_relations(n, 2) if all(r <= t for t in top)]
        assert list(eqstar.lower_n(top, 2)) == brute
    assert eqstar.upper_k_nonempty(fam, 4) == bool(len(top))


@pytest.mark.parametrize("n", [4, 6])
def test_galois_exhaustive_small(n):
    twos = list(eqstar.all_n_relations(n, 2))
    families = [[]] + [[r] for r in twos] + [list(p) for p in itertools.combinations(twos, 2)]
    for fam in families:
        rep = eqstar.galois_check(fam, 2, 4 if n % 4 == 0 else 6, ground=n)
        assert rep.passed, rep.failures()


def test_galois_empty_family_reduces_to_full_sets():
    rep = eqstar.galois_check(RelFamily(8), 2, 4)
    assert rep.clauses[9] and rep.clauses[10]


@pytest.mark.parametrize("seed", range(10))
def test_galois_random_families_at_12(seed):
    rng = random.Random(seed)
    base = cases.random_pairing(12, rng)
    fam = cases.family_for(base, rng.sample(cases.four_sets_of(base), rng.randint(0, 1)))
    rep = eqstar.galois_check(fam, 2, 4, other=[cases.random_pairing(12, rng)])
    assert rep.passed, rep.failures()


def test_normal_ideal_of_single_pairing_is_itself():
    for theta in eqstar.all_n_relations(8, 2):
        assert eqstar.normal_ideal([theta], 2, 4) == RelFamily(8, [theta])


def test_normal_ideal_of_agreeing_pair_has_three_members():
    pi = from_blocks(12, [[0, 1], [2, 3], [4, 5], [6, 7], [8, 9], [10, 11]])
    comp = eqstar.companions_on(pi, (0, 1, 2, 3))
    ideal = eqstar.normal_ideal([pi, comp[0]], 2, 4)
    assert ideal == RelFamily(12, [pi, *comp])
    assert eqstar.normal_ideal(ideal, 2, 4) == ideal


def test_normal_ideal_rejects_wrong_size():
    with pytest.raises(NotNRelation):
        eqstar.normal_ideal([nabla(8)], 2, 4)


@pytest.mark.parametrize("seed", range(10))
def test_normal_ideal_monotone(seed):
    rng = random.Random(seed)
    a, b = cases.random_pairing(8, rng), cases.random_pairing(8, rng)
    small = eqstar.normal_ideal([a], 2, 4)
    big = eqstar.normal_ideal([a, b], 2, 4)
    assert small <= big


def test_agree_except_on():
    pi = from_blocks(8, [[0, 1], [2, 3], [4, 5], [6, 7]])
    theta = from_blocks(8, [[0, 2], [1, 3], [4, 5], [6, 7]])
    assert eqstar.agree_except_on(pi, theta) == (0, 1, 2, 3)
    assert eqstar.agree_except_on(pi, pi) is None
    both = from_blocks(8, [[0, 2], [1, 3], [4, 6], [5, 7]])
    assert eqstar.agree_except_on(pi, both) is None
    with pytest.raises(Not2Relation):
        eqstar.agree_except_on(pi, nabla(8))


def test_companions_are_mutually_agreeing():
    pi = from_blocks(8, [[0, 1], [2, 3], [4, 5], [6, 7]])
    first, second = eqstar.companions_on(pi, (0, 1, 2, 3))
    assert first.blocks[:2] == ((0, 2), (1, 3))
    assert second.blocks[:2] == ((0, 3), (1, 2))
    for x, y in itertools.combinations([pi, first, second], 2):
        assert eqstar.agree_except_on(x, y) == (0, 1, 2, 3)


def test_overlap_examples():
    pi = from_blocks(8, [[0, 1], [2, 3], [4, 5], [6, 7]])
    same = eqstar.overlap_classify(pi, pi)
    assert same.tag == "non-full" and same.upper_bound_count == 3
    assert eqstar.overlaps_of(pi, pi) == []
    lam = from_blocks(8, [[0, 2], [1, 3], [4, 6], [5, 7]])
    full = eqstar.overlap_classify(pi, lam)
    assert full.tag == "full" and full.upper_bound_count == 1 and full.common_block_count == 0
    assert eqstar.overlaps_of(pi, lam) == [(0, 1, 2, 3), (4, 5, 6, 7)]
    six_a = from_blocks(6, [[0, 1], [2, 3], [4, 5]])
    six_b = from_blocks(6, [[1, 2], [3, 4], [0, 5]])
    none = eqstar.overlap_classify(six_a, six_b)
    assert not none.overlaps and none.upper_bound_count == 0
    with pytest.raises(NoOverlap):
        eqstar.overlaps_of(six_a, six_b)


def test_single_area_overlap_at_12():
    pi = from_blocks(12, [[0, 1], [2, 3], [4, 5], [6, 7], [8, 9], [10, 11]])
    lam = eqstar.companions_on(pi, (4, 5, 6, 7))[0]
    assert eqstar.overlaps_of(pi, lam) == [(4, 5, 6, 7)]
    assert eqstar.overlap_classify(pi, lam).as_dict() == {
        "tag": "non-full", "common_block_count": 4, "upper_bound_count": "3"}


def test_double_factorial():
    assert [eqstar.double_factorial(m) for m in (-1, 0, 1, 3, 5, 7)] == [1, 1, 1, 3, 15, 105]


def test_cycle_examples():
    phi = from_blocks(4, [[0, 1], [2, 3]])
    rho = from_blocks(4, [[1, 2], [0, 3]])
    dec = eqstar.cycle_decomposition(phi, rho)
    assert dec.cycles == ((0, 1, 2, 3),) and dec.lengths == [2]
    assert eqstar.bipartition_for_matchings(phi, rho) == ([0, 2], [1, 3])
    same = eqstar.cycle_decomposition(phi, phi)
    assert same.lengths == [1, 1]


def test_chain_examples():
    phi = from_blocks(8, [[0, 1], [2, 3], [4, 5], [6, 7]])
    assert eqstar.overlap_chain(phi, phi) == [phi]
    rho = from_blocks(8, [[0, 3], [2, 1], [4, 5], [6, 7]])
    assert len(eqstar.overlap_chain(phi, rho)) == 2
    with pytest.raises(OddBlockCount):
        eqstar.overlap_chain(from_blocks(6, [[0, 1], [2, 3], [4, 5]]), from_blocks(6, [[0, 1], [2, 3], [4, 5]]))


@given(st.sampled_from([4, 8, 12, 16]), st.integers(0, 2**32))
def test_chain_links_overlap(n, seed):
    assert cases.chain_case(n, random.Random(seed))


@given(st.sampled_from([2, 4, 6, 8, 10, 12, 14, 16]), st.integers(0, 2**32))
def test_cycle_invariants(n, seed):
    assert cases.cycle_case(n, random.Random(seed))


@pytest.mark.parametrize("check", [
    cases.disjoint_areas_case,
    cases.triple_areas_case,
    cases.sigma4_disjointness_case,
    cases.overlap_classification_case,
    cases.overlap_blocks_case,
])
def test_area_and_overlap_laws(check):
    rng = random.Random(check.__name__)
    assert all(check(12, rng) for _ in range(25))
