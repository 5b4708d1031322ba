"""Instance generators and oracle checks shared by the unit and acceptance tests."""

import itertools
import random

from factlat import eqstar
from factlat.eqstar import RelFamily
from factlat.partitions import EquivRel, Permutation, apply_perm, join_closure
from factlat.wigner import Reconstructor, psi_star


def random_pairing(n, rng):
    order = list(range(n))
    rng.shuffle(order)
    labels = [0] * n
    for i, x in enumerate(order):
        labels[x] = i // 2
    return EquivRel(labels)


def four_sets_of(pi):
    """All unions of two blocks of a 2-relation."""
    return [tuple(sorted(a + b)) for a, b in itertools.combinations(pi.blocks, 2)]


def family_for(pi, areas):
    rels = [pi]
    for area in areas:
        rels.extend(eqstar.companions_on(pi, area))
    return RelFamily(pi.n, rels)


def brute_upper(family, k):
    return [r for r in eqstar.all_n_relations(family.n, k) if all(m <= r for m in family)]


def disjoint_areas_case(n, rng):
    """Two distinct areas of pi are disjoint iff the five-member family has a 4-relation above it."""
    pi = random_pairing(n, rng)
    a, b = rng.sample(four_sets_of(pi), 2)
    disjoint = not set(a) & set(b)
    return disjoint == eqstar.upper_k_nonempty(family_for(pi, [a, b]), 4)


def triple_areas_case(n, rng):
    """Pairwise meeting areas A, B, C: empty triple intersection iff a 6-relation lies above."""
    pi = random_pairing(n, rng)
    blocks = list(pi.blocks)
    if rng.random() < 0.5:
        e1, e2, e3 = rng.sample(blocks, 3)
        areas = [e1 + e2, e1 + e3, e2 + e3]
    else:
        e0, e1, e2, e3 = rng.sample(blocks, 4)
        areas = [e0 + e1, e0 + e2, e0 + e3]
    areas = [tuple(sorted(a)) for a in areas]
    empty = not set(areas[0]) & set(areas[1]) & set(areas[2])
    return empty == eqstar.upper_k_nonempty(family_for(pi, areas), 6)


def sigma4_disjointness_case(n, rng):
    """The area map induced by a point permutation preserves disjointness both ways."""
    sigma = Permutation.random(n, rng)
    rec = Reconstructor(psi_star(sigma))
    pi = random_pairing(n, rng)
    a, b = rng.sample(four_sets_of(pi), 2)
    ia, ib = rec.sigma4(pi, a), rec.sigma4(pi, b)
    return (not set(a) & set(b)) == (not set(ia) & set(ib))


def _rewired(pi, rng, swaps):
    lam = pi
    if len(pi.blocks) < 2:
        return lam
    for _ in range(swaps):
        blocks = lam.blocks
        i, j = rng.sample(range(len(blocks)), 2)
        lam = eqstar.companions_on(lam, blocks[i] + blocks[j])[rng.randrange(2)]
    return lam


def overlap_pair(n, rng):
    """A pair of 2-relations, biased towards overlapping ones."""
    pi = random_pairing(n, rng)
    mode = rng.randrange(3)
    if mode == 0:
        return pi, random_pairing(n, rng)
    if mode == 1:
        return pi, _rewired(pi, rng, rng.randint(0, n // 4))
    # rewire inside disjoint areas so that the overlap structure is clean
    blocks = list(pi.blocks)
    rng.shuffle(blocks)
    lam = pi
    for i in range(0, rng.randint(0, len(blocks) // 2) * 2, 2):
        lam = eqstar.companions_on(lam, blocks[i] + blocks[i + 1])[rng.randrange(2)]
    return pi, lam


def overlap_classification_case(n, rng):
    """Upper-bound count, tag and common-block rule agree with brute force."""
    pi, lam = overlap_pair(n, rng)
    oc = eqstar.overlap_classify(pi, lam)
    bounds = brute_upper(RelFamily(n, [pi, lam]), 4)
    common = sum(1 for b in pi.blocks if lam.has_block(b))
    if oc.upper_bound_count != len(bounds) or oc.common_block_count != common:
        return False
    if not bounds:
        return oc.tag == "disjoint-from-4-sets"
    expected = "full" if common <= 2 else "non-full"
    return oc.tag == expected and (len(bounds) == 1) == (oc.tag == "full")


def overlap_blocks_case(n, rng):
    """Overlaps are blocks of every upper bound; with non-full overlap, conversely."""
    pi, lam = overlap_pair(n, rng)
    oc = eqstar.overlap_classify(pi, lam)
    if not oc.overlaps:
        return True
    bounds = brute_upper(RelFamily(n, [pi, lam]), 4)
    shared = set.intersection(*(set(b.blocks) for b in bounds))
    found = set(eqstar.overlaps_of(pi, lam))
    if not found <= shared:
        return False
    if oc.tag == "non-full":
        return shared == found
    return True


def cycle_case(n, rng):
    phi, rho = random_pairing(n, rng), random_pairing(n, rng)
    if rng.random() < 0.3:
        rho = _rewired(phi, rng, rng.randint(0, n // 2))
    dec = eqstar.cycle_decomposition(phi, rho)
    flat = [x for c in dec.cycles for x in c]
    if sorted(flat) != list(range(n)) or any(len(c) % 2 for c in dec.cycles):
        return False
    for c in dec.cycles:
        m = len(c)
        for i in range(0, m, 2):
            if not phi.related(c[i], c[i + 1]) or not rho.related(c[i + 1], c[(i + 2) % m]):
                return False
    if join_closure([phi, rho]).block_count != len(dec.cycles):
        return False
    a_side = set(dec.a_side())
    return all(len(a_side & set(b)) == 1 for rel in (phi, rho) for b in rel.blocks)


def chain_case(n, rng):
    phi, rho = random_pairing(n, rng), random_pairing(n, rng)
    chain = eqstar.overlap_chain(phi, rho)
    return (chain[0] == phi and chain[-1] == rho and len(chain) - 1 <= n
            and all(eqstar.overlap_classify(u, v).overlaps for u, v in zip(chain, chain[1:])))


def apply_to_family(sigma, fam):
    return RelFamily(fam.n, [apply_perm(sigma, r) for r in fam])
