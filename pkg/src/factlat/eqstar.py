"""Regular equivalence relations under inclusion.

Covers the upper and lower operators U_k / L_n and the normal ideals they
generate, 2-relations that agree except on a 4-set, overlap of 2-relations
in 4-sets, and the alternating-cycle structure of two perfect matchings.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

from .errors import (
    GroundMismatch,
    LimitExceeded,
    NoOverlap,
    Not2Relation,
    NotBlockUnion,
    NotDivisible,
    NotNRelation,
    OddBlockCount,
)
from .partitions import (
    EquivRel,
    equal_block_partitions,
    ground_size,
    is_n_relation,
    join_closure,
    meet,
    meet_all,
)

__all__ = [
    "FourSet",
    "RelFamily",
    "OverlapClass",
    "CycleDecomposition",
    "GaloisReport",
    "four_set",
    "enumerate_n_relations",
    "all_n_relations",
    "iter_upper_k",
    "upper_k",
    "upper_k_nonempty",
    "lower_n",
    "galois_check",
    "normal_ideal",
    "agree_except_on",
    "companions_on",
    "overlap_classify",
    "overlaps_of",
    "cycle_decomposition",
    "bipartition_for_matchings",
    "overlap_chain",
    "partner",
    "pairing_with_blocks",
    "double_factorial",
]

FourSet = tuple  # a sorted 4-tuple of distinct ground elements


def four_set(elements: Iterable[int]) -> FourSet:
    out = tuple(sorted(set(elements)))
    if len(out) != 4:
        raise ValueError(f"a 4-set needs exactly 4 distinct elements, got {out}")
    return out


class RelFamily:
    """A deduplicated family of relations on a common ground set, kept sorted."""

    __slots__ = ("n", "members", "_set")

    def __init__(self, ground, members: Iterable[EquivRel] = ()):
        self.n = ground_size(ground)
        uniq = set()
        for r in members:
            if r.n != self.n:
                raise GroundMismatch(f"relation on {r.n} points in a family on {self.n}")
            uniq.add(r)
        self._set = frozenset(uniq)
        self.members = tuple(sorted(uniq, key=EquivRel.sort_key))

    @classmethod
    def of(cls, *rels: EquivRel) -> "RelFamily":
        if not rels:
            raise ValueError("use RelFamily(ground) for an empty family")
        return cls(rels[0].n, rels)

    def __iter__(self):
        return iter(self.members)

    def __len__(self) -> int:
        return len(self.members)

    def __contains__(self, rel) -> bool:
        return rel in self._set

    def __eq__(self, other) -> bool:
        return isinstance(other, RelFamily) and self.n == other.n and self._set == other._set

    def __hash__(self) -> int:
        return hash((self.n, self._set))

    def __le__(self, other: "RelFamily") -> bool:
        return self._set <= other._set

    def __or__(self, other: "RelFamily") -> "RelFamily":
        return RelFamily(self.n, self._set | other._set)

    def __and__(self, other: "RelFamily") -> "RelFamily":
        return RelFamily(self.n, self._set & other._set)

    def issubset(self, other: "RelFamily") -> bool:
        return self <= other

    def consists_of(self, n: int) -> bool:
        return all(is_n_relation(r, n) for r in self.members)

    def __repr__(self) -> str:
        return f"RelFamily(n={self.n}, size={len(self)})"


def _as_family(family, ground=None) -> RelFamily:
    if isinstance(family, RelFamily):
        return family
    family = list(family)
    if ground is None:
        if not family:
            raise ValueError("ground is required for an empty family")
        ground = family[0].n
    return RelFamily(ground, family)


def _check_divides(n: int, size: int) -> None:
    if size < 1 or n % size:
        raise NotDivisible(f"{size} does not divide the ground size {n}")


# -- enumeration and the Galois operators ------------------------------------

def enumerate_n_relations(ground, n: int) -> Iterator[EquivRel]:
    size = ground_size(ground)
    _check_divides(size, n)
    for blocks in equal_block_partitions(size, n):
        labels = [0] * size
        for b, block in enumerate(blocks):
            for x in block:
                labels[x] = b
        yield EquivRel(labels, _canonical=True)


@lru_cache(maxsize=32)
def all_n_relations(ground: int, n: int) -> RelFamily:
    return RelFamily(ground, enumerate_n_relations(ground, n))


def iter_upper_k(family, k: int, ground=None) -> Iterator[EquivRel]:
    """Stream the k-relations containing every member of the family.

    These are exactly the coarsenings of the join of the family whose blocks
    have k elements, produced by grouping the join's blocks.
    """
    fam = _as_family(family, ground)
    _check_divides(fam.n, k)
    if not len(fam):
        yield from enumerate_n_relations(fam.n, k)
        return
    join = join_closure(fam.members)
    blocks = join.blocks
    sizes = [len(b) for b in blocks]
    if max(sizes) > k:
        return
    count = len(blocks)
    group_of = [-1] * count

    def groups(next_group: int):
        try:
            first = group_of.index(-1)
        except ValueError:
            yield
            return
        group_of[first] = next_group
        yield from fill(first + 1, k - sizes[first], next_group)
        group_of[first] = -1

    def fill(start: int, need: int, g: int):
        if need == 0:
            yield from groups(g + 1)
            return
        for i in range(start, count):
            if group_of[i] == -1 and sizes[i] <= need:
                group_of[i] = g
                yield from fill(i + 1, need - sizes[i], g)
                group_of[i] = -1

    for _ in groups(0):
        yield EquivRel([group_of[b] for b in join.block_of], _canonical=True)


def upper_k(family, k: int, ground=None) -> RelFamily:
    fam = _as_family(family, ground)
    if not len(fam):
        _check_divides(fam.n, k)
        return all_n_relations(fam.n, k)
    return RelFamily(fam.n, iter_upper_k(fam, k))


def upper_k_nonempty(family, k: int, ground=None) -> bool:
    return next(iter_upper_k(family, k, ground), None) is not None


def lower_n(family, n: int, ground=None) -> RelFamily:
    """n-relations contained in every member: n-refinements of the family's meet."""
    fam = _as_family(family, ground)
    _check_divides(fam.n, n)
    if not len(fam):
        return all_n_relations(fam.n, n)
    bound = meet_all(fam.members)
    options = []
    for block in bound.blocks:
        parts = list(equal_block_partitions(block, n))
        if not parts:
            return RelFamily(fam.n)
        options.append(parts)
    out = []
    for choice in itertools.product(*options):
        labels = [0] * fam.n
        b = 0
        for parts in choice:
            for part in parts:
                for x in part:
                    labels[x] = b
                b += 1
        out.append(EquivRel(labels))
    return RelFamily(fam.n, out)


def normal_ideal(family, n: int, k: int, ground=None) -> RelFamily:
    """L_n U_k of a family of n-relations: the normal ideal it generates."""
    fam = _as_family(family, ground)
    _check_divides(fam.n, n)
    _check_divides(fam.n, k)
    for r in fam:
        if not is_n_relation(r, n):
            raise NotNRelation(f"{r!r} is not a {n}-relation")
    # L_n of a family only depends on the family's meet, so stream U_k and stop
    # once the running meet reaches the join of the generators.
    floor = join_closure(fam.members, fam.n)
    acc = None
    for rel in iter_upper_k(fam, k):
        acc = rel if acc is None else meet(acc, rel)
        if acc == floor:
            break
    if acc is None:
        return lower_n(RelFamily(fam.n), n)
    return lower_n(RelFamily(fam.n, [acc]), n)


@dataclass
class GaloisReport:
    clauses: dict[int, bool] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.clauses.values())

    def failures(self) -> list[int]:
        return [c for c, ok in self.clauses.items() if not ok]


def galois_check(family, n: int, k: int, other=None, ground=None) -> GaloisReport:
    """Evaluate the ten laws of the U_k / L_n connection on concrete families.

    ``other`` is a second family used for the monotonicity and union laws;
    the laws are checked for S and for the larger family S | other.
    """
    S = _as_family(family, ground)
    T = S | _as_family(other if other is not None else [], S.n)
    U, L = (lambda F: upper_k(F, k)), (lambda F: lower_n(F, n))
    rep = GaloisReport()
    uS, lS = U(S), L(S)
    K = uS  # a family of k-relations derived from S

    rep.clauses[1] = U(T) <= uS
    rep.clauses[2] = L(T) <= lS
    rep.clauses[3] = (not S.consists_of(n)) or S <= L(uS)
    ok4 = K <= U(L(K))
    if S.consists_of(k):
        ok4 = ok4 and S <= U(lS)
    rep.clauses[4] = ok4
    rep.clauses[5] = (not S.consists_of(n)) or U(L(uS)) == uS
    lK = L(K)
    ok6 = L(U(lK)) == lK
    if S.consists_of(k):
        ok6 = ok6 and L(U(lS)) == lS
    rep.clauses[6] = ok6
    # (7): S is fixed by L U exactly when it is L_n of a family of k-relations.
    closed = L(uS)
    fixed = closed == S
    rep.clauses[7] = L(U(closed)) == closed and (not fixed or S == L(uS))
    # (8): the dual statement, exercised on the k-side.
    opened = U(lK)
    rep.clauses[8] = U(L(opened)) == opened and U(L(uS)) == uS
    oT = T if other is None else _as_family(other, S.n)
    rep.clauses[9] = U(S | oT) == (uS & U(oT)) and U(RelFamily(S.n)) == all_n_relations(S.n, k)
    rep.clauses[10] = L(S | oT) == (lS & L(oT)) and L(RelFamily(S.n)) == all_n_relations(S.n, n)
    return rep


# -- agreement on 4-sets ------------------------------------------------------

def _require_2(*rels: EquivRel) -> None:
    for r in rels:
        if not is_n_relation(r, 2):
            raise Not2Relation(f"{r!r} is not a 2-relation")


def partner(rel: EquivRel, x: int) -> int:
    """The other element of x's block in a 2-relation."""
    a, b = rel.blocks[rel.block_of[x]]
    return b if a == x else a


def agree_except_on(theta1: EquivRel, theta2: EquivRel) -> FourSet | None:
    """The 4-set A outside which two distinct 2-relations agree, when A is the
    union of two blocks of each."""
    _require_2(theta1, theta2)
    if theta1 == theta2:
        return None
    only1 = [b for b in theta1.blocks if not theta2.has_block(b)]
    only2 = [b for b in theta2.blocks if not theta1.has_block(b)]
    if len(only1) != 2 or len(only2) != 2:
        return None
    area = set(only1[0]) | set(only1[1])
    if area != set(only2[0]) | set(only2[1]):
        return None
    return tuple(sorted(area))


def _two_blocks_in(pi: EquivRel, area: Sequence[int]) -> tuple[tuple[int, ...], tuple[int, ...]]:
    area = four_set(area)
    inside = sorted({pi.blocks[pi.block_of[x]] for x in area})
    if len(inside) != 2 or set(inside[0]) | set(inside[1]) != set(area):
        raise NotBlockUnion(f"{area} is not the union of two blocks")
    return inside[0], inside[1]


def _rewire(pi: EquivRel, new_blocks: Iterable[Sequence[int]]) -> EquivRel:
    labels = list(pi.block_of)
    fresh = pi.block_count
    for block in new_blocks:
        for x in block:
            labels[x] = fresh
        fresh += 1
    return EquivRel(labels)


def companions_on(pi: EquivRel, area: Sequence[int]) -> tuple[EquivRel, EquivRel]:
    """The two other 2-relations that agree with pi except on the 4-set."""
    _require_2(pi)
    (a, b), (c, d) = _two_blocks_in(pi, area)
    return (_rewire(pi, [(a, c), (b, d)]), _rewire(pi, [(a, d), (b, c)]))


def pairing_with_blocks(ground, blocks: Iterable[Sequence[int]], reverse: bool = False) -> EquivRel:
    """A 2-relation containing the given pairs; the remaining elements are
    paired consecutively in ascending (or descending) order."""
    n = ground_size(ground)
    labels = [-1] * n
    b = 0
    for block in blocks:
        if len(block) != 2:
            raise Not2Relation("blocks of a 2-relation have two elements")
        for x in block:
            if labels[x] != -1:
                raise ValueError("blocks overlap")
            labels[x] = b
        b += 1
    rest = [x for x in range(n) if labels[x] == -1]
    if len(rest) % 2:
        raise Not2Relation("an odd number of elements cannot be paired")
    if reverse:
        rest.reverse()
    for i in range(0, len(rest), 2):
        labels[rest[i]] = labels[rest[i + 1]] = b
        b += 1
    return EquivRel(labels)


# -- overlap in 4-sets --------------------------------------------------------

OVERLAP_NONE = "disjoint-from-4-sets"
OVERLAP_FULL = "full"
OVERLAP_NON_FULL = "non-full"


@dataclass(frozen=True)
class OverlapClass:
    tag: str
    common_block_count: int
    upper_bound_count: int

    @property
    def overlaps(self) -> bool:
        return self.tag != OVERLAP_NONE

    def as_dict(self) -> dict:
        return {
            "tag": self.tag,
            "common_block_count": self.common_block_count,
            "upper_bound_count": str(self.upper_bound_count),
        }


def double_factorial(m: int) -> int:
    out = 1
    while m > 1:
        out *= m
        m -= 2
    return out


def _partner_blocks(pi: EquivRel, lam: EquivRel) -> dict | None:
    """Map each pi-block that is not a lam-block to its partner E', or None when
    some block has no partner."""
    pairs = {}
    for block in pi.blocks:
        if lam.has_block(block):
            continue
        x, y = block
        other = tuple(sorted((partner(lam, x), partner(lam, y))))
        if not pi.has_block(other):
            return None
        pairs[block] = other
    return pairs


def overlap_classify(pi: EquivRel, lam: EquivRel) -> OverlapClass:
    """Whether two 2-relations have a common 4-relation upper bound, and how many.

    Upper bounds exist iff every block of pi outside lam has a partner block
    completing it to a union of two lam-blocks, and the common blocks can be
    paired; they then correspond to the pairings of the common blocks.
    """
    _require_2(pi, lam)
    if pi.n != lam.n:
        raise GroundMismatch("relations live on different ground sets")
    common = sum(1 for b in pi.blocks if lam.has_block(b))
    pairs = _partner_blocks(pi, lam)
    if pairs is None or common % 2:
        return OverlapClass(OVERLAP_NONE, common, 0)
    count = double_factorial(common - 1)
    return OverlapClass(OVERLAP_FULL if count == 1 else OVERLAP_NON_FULL, common, count)


def overlaps_of(pi: EquivRel, lam: EquivRel) -> list[FourSet]:
    """4-sets that are unions of two blocks of each relation, on which they differ."""
    if not overlap_classify(pi, lam).overlaps:
        raise NoOverlap("the relations have no common 4-relation upper bound")
    pairs = _partner_blocks(pi, lam)
    found = {tuple(sorted(block + other)) for block, other in pairs.items()}
    return sorted(found)


# -- alternating cycles and matchings ------------------------------------------

@dataclass(frozen=True)
class CycleDecomposition:
    """Each cycle is laid out as (a0, b0, a1, b1, ...): {a_i, b_i} is a block of
    the first relation and {b_i, a_(i+1)} a block of the second."""

    cycles: tuple[tuple[int, ...], ...]

    @property
    def lengths(self) -> list[int]:
        return [len(c) // 2 for c in self.cycles]

    def a_side(self) -> list[int]:
        return sorted(x for c in self.cycles for x in c[0::2])

    def b_side(self) -> list[int]:
        return sorted(x for c in self.cycles for x in c[1::2])


def cycle_decomposition(phi: EquivRel, rho: EquivRel) -> CycleDecomposition:
    _require_2(phi, rho)
    if phi.n != rho.n:
        raise GroundMismatch("relations live on different ground sets")
    seen = [False] * phi.n
    cycles = []
    for start in range(phi.n):
        if seen[start]:
            continue
        walk = []
        a = start
        while True:
            b = partner(phi, a)
            walk += [a, b]
            seen[a] = seen[b] = True
            a = partner(rho, b)
            if a == start:
                break
        cycles.append(tuple(walk))
    return CycleDecomposition(tuple(cycles))


def bipartition_for_matchings(phi: EquivRel, rho: EquivRel) -> tuple[list[int], list[int]]:
    """Split the ground set so both 2-relations match one side with the other."""
    dec = cycle_decomposition(phi, rho)
    return dec.a_side(), dec.b_side()


def _shift_matching(lam: EquivRel, a_side: set, moves: dict[int, int]) -> EquivRel:
    # blocks {a, b} with a on the A side become {a, moves(b)}
    labels = [0] * lam.n
    for i, (x, y) in enumerate(lam.blocks):
        a, b = (x, y) if x in a_side else (y, x)
        labels[a] = labels[moves.get(b, b)] = i
    return EquivRel(labels)


def overlap_chain(phi: EquivRel, rho: EquivRel, max_links: int | None = None) -> list[EquivRel]:
    """A chain phi = nu_0, ..., nu_m = rho of 2-relations, consecutive ones
    overlapping in 4-sets.

    Both relations match the two sides A, B of a bipartition, so rho is phi
    moved by a permutation of B.  That permutation is split into
    transpositions, and disjoint transpositions are grouped into involutions
    that fix at least half of B.  Each involution keeps an even number of
    blocks fixed, which is what makes consecutive links overlap.
    """
    _require_2(phi, rho)
    if (phi.n // 2) % 2:
        raise OddBlockCount(f"{phi.n // 2} blocks: the ground size must be a multiple of 4")
    a_list, b_list = bipartition_for_matchings(phi, rho)
    a_side = set(a_list)
    move = {b: partner(rho, partner(phi, b)) for b in b_list}
    # transpositions (c0 c1), (c0 c2), ... applied in turn realise the cycle c0 -> c1 -> ...
    per_cycle = []
    seen = set()
    for b in b_list:
        if b in seen:
            continue
        cyc = [b]
        seen.add(b)
        x = move[b]
        while x != b:
            cyc.append(x)
            seen.add(x)
            x = move[x]
        if len(cyc) > 1:
            per_cycle.append([(cyc[0], c) for c in cyc[1:]])
    per_step = max(1, len(b_list) // 4)
    chain = [phi]
    current = phi
    longest = max((len(t) for t in per_cycle), default=0)
    for j in range(longest):
        batch = [t[j] for t in per_cycle if len(t) > j]
        for i in range(0, len(batch), per_step):
            swaps = {}
            for u, v in batch[i:i + per_step]:
                swaps[u], swaps[v] = v, u
            current = _shift_matching(current, a_side, swaps)
            chain.append(current)
    if current != rho:
        raise AssertionError("overlap chain did not reach its target")
    limit = max_links if max_links is not None else phi.n
    if len(chain) - 1 > limit:
        raise LimitExceeded(f"chain needs {len(chain) - 1} links, above the bound {limit}")
    return chain
