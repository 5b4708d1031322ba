import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from factlat.errors import LimitExceeded, NotApplicable, NotRegular
from factlat.factlat import (
    FactorPair,
    IntervalIso,
    boolean_octet,
    bottom,
    check_omp_axioms,
    complement_of_regular,
    complements,
    count_factor_pairs,
    count_table,
    divisors,
    enumerate_fact,
    fact_cardinality,
    is_factor_pair,
    is_p_atom,
    iter_factor_pairs,
    leq,
    orthogonal_join,
    p_atoms_below,
    top,
    verify_atom_formulas,
)
from factlat.partitions import EquivRel, compose, delta, from_blocks, meet, nabla

FACT_27 = 10_002_268_381_116_211_200_002


def test_small_cardinalities():
    assert [fact_cardinality(n) for n in range(1, 7)] == [1, 2, 2, 8, 2, 122]
    assert fact_cardinality(27) == FACT_27


def test_count_table_rows_sum_to_total():
    rows = count_table(12)
    assert sum(r["pairs"] for r in rows) == fact_cardinality(12)
    assert [r["divisor"] for r in rows] == divisors(12)


def test_count_rejects_nonpositive():
    with pytest.raises(ValueError):
        fact_cardinality(0)
    with pytest.raises(ValueError):
        count_factor_pairs(0, 3)


@pytest.mark.parametrize("n", range(1, 8))
def test_enumeration_matches_formula(n):
    assert sum(1 for _ in iter_factor_pairs(n)) == fact_cardinality(n)


def test_bounds_and_perp():
    assert bottom(4) == FactorPair(nabla(4), delta(4))
    assert top(4) == bottom(4).perp()
    assert leq(bottom(4), top(4)) and not leq(top(4), bottom(4))


def test_complements_are_factor_pairs():
    theta = from_blocks(6, [[0, 1, 2], [3, 4, 5]])
    comps = list(complements(theta))
    assert len(comps) == 6
    assert all(is_factor_pair(theta, c) for c in comps)
    assert complement_of_regular(theta).theta_prime in comps
    assert list(complements(EquivRel([0, 0, 1]))) == []
    with pytest.raises(NotRegular):
        complement_of_regular(EquivRel([0, 0, 1]))


def test_enumerate_cap():
    with pytest.raises(LimitExceeded):
        enumerate_fact(7, limit=6)


def test_fact4_shape():
    poset = enumerate_fact(4)
    assert len(poset) == 8
    assert len(poset.covers()) == 12
    assert check_omp_axioms(poset).passed


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6])
def test_omp_axioms_small(n):
    assert check_omp_axioms(enumerate_fact(n)).passed


@pytest.mark.parametrize("n", [4, 6])
def test_leq_iff_octet_exhaustive_small(n):
    poset = enumerate_fact(n)
    for i, a in enumerate(poset):
        for j, b in enumerate(poset):
            octet = boolean_octet(a, b)
            assert leq(a, b) == (octet is not None)
            if octet is not None:
                assert octet.check()


def test_orthogonal_join_is_least_upper_bound():
    poset = enumerate_fact(6)
    for i, a in enumerate(poset):
        for j, b in enumerate(poset):
            if leq(a, b.perp()):
                assert poset.index[orthogonal_join(a, b)] == poset.lub(i, j)


def _pair_strategy(n):
    elems = list(iter_factor_pairs(n))
    return st.sampled_from(elems)


@given(_pair_strategy(6), st.integers(0, 10_000))
def test_interval_iso_round_trip(top_pair, seed):
    iso = IntervalIso(top_pair)
    rng = random.Random(seed)
    quotient = list(iter_factor_pairs(iso.quotient_size))
    mu_nu = rng.choice(quotient)
    lifted = iso.phi(mu_nu)
    assert is_factor_pair(*lifted)
    assert leq(lifted, top_pair)
    assert iso.sigma(lifted) == mu_nu


def relative_perp(x, top_pair):
    """Orthocomplement of x inside the interval below top_pair."""
    upper = compose(x.theta_prime, top_pair.theta).to_equivrel()
    return FactorPair(upper, meet(x.theta, top_pair.theta_prime))


def test_interval_iso_preserves_order_and_perp_in_fact6():
    poset = enumerate_fact(6)
    for top_pair in poset:
        iso = IntervalIso(top_pair)
        below = [poset[i] for i in iso.interval(poset)]
        images = [iso.sigma(x) for x in below]
        assert len(set(images)) == len(below) == fact_cardinality(iso.quotient_size)
        for x, ix in zip(below, images):
            assert iso.phi(ix) == x
            assert iso.sigma(relative_perp(x, top_pair)) == ix.perp()
            for y, iy in zip(below, images):
                assert leq(x, y) == leq(ix, iy)


def test_sigma_rejects_outside():
    poset = enumerate_fact(4)
    atom = next(x for x in poset if is_p_atom(x, 2))
    other = next(x for x in poset if is_p_atom(x, 2) and x != atom)
    with pytest.raises(NotApplicable):
        IntervalIso(atom).sigma(other)


def test_p_atoms():
    top6 = top(6)
    twos = p_atoms_below(top6, 2)
    threes = p_atoms_below(top6, 3)
    assert len(twos) == 60 and len(threes) == 60
    assert all(is_p_atom(a, 2) for a in twos)
    assert all(is_p_atom(a, 3) for a in threes)
    with pytest.raises(NotApplicable):
        p_atoms_below(top(4), 3)
    with pytest.raises(ValueError):
        p_atoms_below(top(4), 4)


@pytest.mark.parametrize("n,p", [(4, 2), (6, 2), (6, 3), (8, 2)])
def test_atom_formulas_on_top(n, p):
    rep = verify_atom_formulas(top(n), p)
    assert rep.passed
