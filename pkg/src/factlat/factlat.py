"""Factor pairs of a finite set and the orthomodular poset they form.

A factor pair (theta, theta') is a pair of equivalence relations meeting in
the identity relation and composing to the full relation; equivalently the
map x -> (x/theta, x/theta') is a bijection, so it records a two-factor
direct product decomposition of the ground set.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from .config import get_caps
from .errors import (
    GroundMismatch,
    LimitExceeded,
    NotApplicable,
    NotFactorPair,
    NotOrthogonal,
    NotRegular,
)
from .partitions import (
    BinRel,
    EquivRel,
    compose,
    delta,
    equal_block_partitions,
    from_blocks,
    ground_size,
    is_regular,
    join_closure,
    join_permuting,
    meet,
    meet_all,
    nabla,
    permutes,
)

__all__ = [
    "FactorPair",
    "BooleanOctet",
    "FactPoset",
    "OMPReport",
    "AtomFormulaReport",
    "IntervalIso",
    "is_factor_pair",
    "factor_pair",
    "canonical_bijection",
    "complement_of_regular",
    "complements",
    "leq",
    "boolean_octet",
    "orthocomplement",
    "orthogonal_join",
    "bottom",
    "top",
    "enumerate_fact",
    "iter_factor_pairs",
    "check_omp_axioms",
    "atoms",
    "is_p_atom",
    "p_atoms_below",
    "verify_atom_formulas",
    "interval_iso",
    "count_factor_pairs",
    "fact_cardinality",
    "count_table",
    "divisors",
    "is_prime",
]


@dataclass(frozen=True, slots=True)
class FactorPair:
    theta: EquivRel
    theta_prime: EquivRel

    @property
    def n(self) -> int:
        return self.theta.n

    @property
    def profile(self) -> tuple[int, int]:
        """(number of theta blocks, number of theta' blocks)."""
        return (self.theta.block_count, self.theta_prime.block_count)

    def perp(self) -> "FactorPair":
        return FactorPair(self.theta_prime, self.theta)

    def __iter__(self):
        yield self.theta
        yield self.theta_prime

    def __repr__(self) -> str:
        return f"FactorPair({self.theta!r}, {self.theta_prime!r})"


def divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


def is_prime(p: int) -> bool:
    return p >= 2 and all(p % q for q in range(2, math.isqrt(p) + 1))


def is_factor_pair(theta: EquivRel, theta_prime: EquivRel) -> bool:
    if theta.n != theta_prime.n:
        raise GroundMismatch(f"ground sizes differ: {theta.n} vs {theta_prime.n}")
    if meet(theta, theta_prime).block_count != theta.n:
        return False
    full = (1 << theta.n) - 1
    return all(r == full for r in compose(theta, theta_prime).rows)


def factor_pair(theta: EquivRel, theta_prime: EquivRel) -> FactorPair:
    """Validated constructor."""
    if not is_factor_pair(theta, theta_prime):
        raise NotFactorPair(f"{theta!r} and {theta_prime!r} do not form a factor pair")
    return FactorPair(theta, theta_prime)


def _require_factor_pair(fp: FactorPair) -> None:
    if not is_factor_pair(fp.theta, fp.theta_prime):
        raise NotFactorPair(f"{fp!r} is not a factor pair")


def canonical_bijection(fp: FactorPair) -> list[tuple[int, int]]:
    """x -> (block of x in theta, block of x in theta')."""
    _require_factor_pair(fp)
    return list(zip(fp.theta.block_of, fp.theta_prime.block_of))


def bottom(ground) -> FactorPair:
    return FactorPair(nabla(ground), delta(ground))


def top(ground) -> FactorPair:
    return FactorPair(delta(ground), nabla(ground))


def orthocomplement(fp: FactorPair) -> FactorPair:
    return fp.perp()


def complement_of_regular(theta: EquivRel) -> FactorPair:
    """Pair a regular relation with the relation collecting the j-th element
    (in ascending order) of every block."""
    if is_regular(theta) is None:
        raise NotRegular(f"{theta!r} has blocks of different sizes")
    labels = [0] * theta.n
    for block in theta.blocks:
        for j, x in enumerate(block):
            labels[x] = j
    return FactorPair(theta, EquivRel(labels))


def complements(theta: EquivRel) -> Iterator[EquivRel]:
    """Every theta' such that (theta, theta') is a factor pair.

    Each theta'-block takes exactly one element from every theta-block, so a
    complement is fixed by matching each block against the first one.
    """
    size = is_regular(theta)
    if size is None:
        return
    first, rest = theta.blocks[0], theta.blocks[1:]
    labels = [0] * theta.n
    for j, x in enumerate(first):
        labels[x] = j
    perms = list(itertools.permutations(range(size)))
    for choice in itertools.product(perms, repeat=len(rest)):
        for block, perm in zip(rest, choice):
            for j in range(size):
                labels[block[perm[j]]] = j
        yield EquivRel(labels)


def leq(fp1: FactorPair, fp2: FactorPair) -> bool:
    """(theta, theta') <= (phi, phi') iff phi is inside theta, theta' is inside
    phi', and phi permutes with theta'."""
    theta, theta_p = fp1.theta, fp1.theta_prime
    phi, phi_p = fp2.theta, fp2.theta_prime
    if theta.n != phi.n:
        raise GroundMismatch(f"ground sizes differ: {theta.n} vs {phi.n}")
    return phi.issubset(theta) and theta_p.issubset(phi_p) and permutes(phi, theta_p)


# -- the Boolean octet criterion --------------------------------------------

# A comparison x <= y labels eight relations by subsets S of three coordinates
# {A, B, C}: the relation is the kernel of the projection onto S.  Kernels of a
# three-fold product meet by union of index sets and join by intersection.
_CUBE = [frozenset(s) for r in range(4) for s in itertools.combinations("ABC", r)]


@dataclass(frozen=True)
class BooleanOctet:
    delta: EquivRel
    theta: EquivRel
    theta_prime: EquivRel
    phi: EquivRel
    phi_prime: EquivRel
    theta_meet_phi_prime: EquivRel
    theta_prime_join_phi: EquivRel
    nabla: EquivRel

    def members(self) -> list[EquivRel]:
        return [
            self.delta, self.theta, self.theta_prime, self.phi, self.phi_prime,
            self.theta_meet_phi_prime, self.theta_prime_join_phi, self.nabla,
        ]

    def check(self) -> bool:
        """Pairwise permuting, and closed under meet and join."""
        rels = set(self.members())
        for a in rels:
            for b in rels:
                if not permutes(a, b):
                    return False
                if meet(a, b) not in rels or join_permuting(a, b) not in rels:
                    return False
        return True


def _meet_rows(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
    return tuple(x & y for x, y in zip(a, b))


def _compose_rows(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
    # Row x of the relational product is the union of b-rows over a-row x.
    out = []
    for row in a:
        m = 0
        while row:
            low = row & -row
            m |= b[low.bit_length() - 1]
            row ^= low
        out.append(m)
    return tuple(out)


def _octet_labelling(fp1: FactorPair, fp2: FactorPair):
    theta, theta_p = fp1.theta, fp1.theta_prime
    phi, phi_p = fp2.theta, fp2.theta_prime
    t, tp, f, fp = theta.rows, theta_p.rows, phi.rows, phi_p.rows
    # meet(t, f) == f and meet(tp, fp) == tp, tested row by row with early exit
    for a, b in zip(f, t):
        if a & ~b:
            return None
    for a, b in zip(tp, fp):
        if a & ~b:
            return None
    upper = _compose_rows(tp, f)
    if upper != _compose_rows(f, tp):
        return None
    full = (1 << theta.n) - 1
    return {
        frozenset("ABC"): tuple(1 << x for x in range(theta.n)),
        frozenset("A"): t,
        frozenset("BC"): tp,
        frozenset("AB"): f,
        frozenset("C"): fp,
        frozenset("AC"): _meet_rows(t, fp),
        frozenset("B"): upper,
        frozenset(): (full,) * theta.n,
    }


def boolean_octet(fp1: FactorPair, fp2: FactorPair) -> BooleanOctet | None:
    """The eight-element Boolean sublattice witnessing fp1 <= fp2, if it exists.

    The check is that the labelling of the cube of coordinate subsets is a
    lattice homomorphism into pairwise permuting relations.
    """
    if fp1.n != fp2.n:
        return None
    f = _octet_labelling(fp1, fp2)
    if f is None:
        return None
    for i, s in enumerate(_CUBE):
        for t in _CUBE[i:]:
            a, b = f[s], f[t]
            if _meet_rows(a, b) != f[s | t]:
                return None
            joined = f[s & t]
            if _compose_rows(a, b) != joined or _compose_rows(b, a) != joined:
                return None
    n = fp1.n
    rel = {k: BinRel(n, v).to_equivrel() for k, v in f.items()}
    return BooleanOctet(
        rel[frozenset("ABC")], rel[frozenset("A")], rel[frozenset("BC")], rel[frozenset("AB")],
        rel[frozenset("C")], rel[frozenset("AC")], rel[frozenset("B")], rel[frozenset()],
    )


def orthogonal_join(fp1: FactorPair, fp2: FactorPair) -> FactorPair:
    """Least upper bound of two orthogonal elements: (theta meet phi, theta' join phi')."""
    if not leq(fp1, fp2.perp()):
        raise NotOrthogonal(f"{fp1!r} is not orthogonal to {fp2!r}")
    gamma = meet(fp1.theta, fp2.theta)
    gamma_p = join_permuting(fp1.theta_prime, fp2.theta_prime)
    return FactorPair(gamma, gamma_p)


# -- counting ---------------------------------------------------------------

def count_factor_pairs(m: int, n: int) -> int:
    """Number of factor pairs whose first relation has m blocks of n elements."""
    if m < 1 or n < 1:
        raise ValueError("block count and block size must be positive")
    return math.factorial(m * n) // (math.factorial(m) * math.factorial(n))


def fact_cardinality(n: int) -> int:
    if n < 1:
        raise ValueError("ground size must be positive")
    return sum(count_factor_pairs(n // d, d) for d in divisors(n))


def count_table(n: int) -> list[dict]:
    """One row per block size d of the first relation."""
    total = fact_cardinality(n)
    return [
        {"n": n, "divisor": d, "pairs": count_factor_pairs(n // d, d), "total": total}
        for d in divisors(n)
    ]


# -- enumeration ------------------------------------------------------------

def iter_factor_pairs(ground, block_size: int | None = None) -> Iterator[FactorPair]:
    """Factor pairs grouped by the number of first-component blocks (ascending)."""
    n = ground_size(ground)
    sizes = [block_size] if block_size is not None else sorted(divisors(n), reverse=True)
    for d in sizes:
        if n % d:
            continue
        for blocks in equal_block_partitions(n, d):
            theta = from_blocks(n, blocks)
            for theta_p in complements(theta):
                yield FactorPair(theta, theta_p)


def _bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class FactPoset:
    """All factor pairs of {0..n-1} with order and orthocomplement.

    Elements are listed with the number of first-component blocks ascending,
    which is a linear extension of the order: 0 comes first and 1 last.
    The order is materialized on demand as up-set and down-set bitmasks.
    """

    def __init__(self, n: int, elements: Sequence[FactorPair]):
        self.n = n
        self.elements = list(elements)
        self.index = {fp: i for i, fp in enumerate(self.elements)}
        if len(self.index) != len(self.elements):
            raise ValueError("duplicate factor pairs")
        self.bottom = self.index[bottom(n)]
        self.top = self.index[top(n)]
        self.perp = [self.index[fp.perp()] for fp in self.elements]
        self._up: list[int] | None = None
        self._down: list[int] | None = None

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __getitem__(self, i: int) -> FactorPair:
        return self.elements[i]

    @property
    def materialized(self) -> bool:
        return self._up is not None

    def by_profile(self) -> dict[tuple[int, int], list[int]]:
        groups: dict[tuple[int, int], list[int]] = {}
        for i, fp in enumerate(self.elements):
            groups.setdefault(fp.profile, []).append(i)
        return groups

    def materialize(self, limit: int | None = None) -> "FactPoset":
        if self._up is not None:
            return self
        limit = get_caps().order_cap if limit is None else limit
        if self.n > limit:
            raise LimitExceeded(f"order materialization is capped at n={limit}")
        by_first: dict[EquivRel, list[int]] = {}
        for i, fp in enumerate(self.elements):
            by_first.setdefault(fp.theta, []).append(i)
        firsts = list(by_first)
        finer: dict[EquivRel, list[EquivRel]] = {}
        for theta in firsts:
            k = theta.block_count
            finer[theta] = [
                phi for phi in firsts
                if phi.block_count % k == 0 and phi.issubset(theta)
            ]
        perm_cache: dict[tuple[EquivRel, EquivRel], bool] = {}
        up = [0] * len(self.elements)
        for i, (theta, theta_p) in enumerate(self.elements):
            mask = 0
            for phi in finer[theta]:
                for j in by_first[phi]:
                    phi_p = self.elements[j].theta_prime
                    if not theta_p.issubset(phi_p):
                        continue
                    key = (phi, theta_p)
                    ok = perm_cache.get(key)
                    if ok is None:
                        ok = perm_cache[key] = permutes(phi, theta_p)
                    if ok:
                        mask |= 1 << j
            up[i] = mask
        down = [0] * len(self.elements)
        for i, mask in enumerate(up):
            bit = 1 << i
            for j in _bits(mask):
                down[j] |= bit
        self._up, self._down = up, down
        return self

    def up(self, i: int) -> int:
        self.materialize()
        return self._up[i]

    def down(self, i: int) -> int:
        self.materialize()
        return self._down[i]

    def leq(self, i: int, j: int) -> bool:
        if self._up is not None:
            return bool(self._up[i] >> j & 1)
        return leq(self.elements[i], self.elements[j])

    def lub(self, i: int, j: int) -> int | None:
        """Least upper bound read off the materialized order."""
        common = self.up(i) & self.up(j)
        if not common:
            return None
        low = common & -common
        k = low.bit_length() - 1  # the lowest index is the only candidate
        return k if common & ~self._up[k] == 0 else None

    def covers(self) -> list[tuple[int, int]]:
        self.materialize()
        out = []
        for i in range(len(self.elements)):
            strict_up = self._up[i] & ~(1 << i)
            for j in _bits(strict_up):
                if self._up[i] & self._down[j] == (1 << i) | (1 << j):
                    out.append((i, j))
        return out

    def heights(self) -> list[int]:
        self.materialize()
        h = [0] * len(self.elements)
        for j in range(len(self.elements)):
            below = self._down[j] & ~(1 << j)
            h[j] = 1 + max((h[i] for i in _bits(below)), default=-1)
        return h

    def atoms(self) -> list[int]:
        self.materialize()
        zero = 1 << self.bottom
        return [
            i for i in range(len(self.elements))
            if i != self.bottom and self._down[i] == zero | (1 << i)
        ]


def enumerate_fact(ground, limit: int | None = None) -> FactPoset:
    n = ground_size(ground)
    limit = get_caps().poset_cap if limit is None else limit
    if n > limit:
        raise LimitExceeded(f"enumerate_fact is capped at n={limit}; got n={n}")
    return FactPoset(n, list(iter_factor_pairs(n)))


# -- orthomodular poset axioms -----------------------------------------------

@dataclass
class AxiomResult:
    name: str
    checked: int = 0
    violations: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def fail(self, witness, cap: int = 10) -> None:
        if len(self.violations) < cap:
            self.violations.append(witness)


@dataclass
class OMPReport:
    n: int
    size: int
    results: list[AxiomResult]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "size": self.size,
            "passed": self.passed,
            "checks": [
                {"name": r.name, "checked": r.checked, "passed": r.passed,
                 "violations": [list(v) for v in r.violations]}
                for r in self.results
            ],
        }


def check_omp_axioms(poset: FactPoset) -> OMPReport:
    """Exhaustive check of the partial order, the bounds and the five axioms."""
    poset.materialize()
    up, down, perp = poset._up, poset._down, poset.perp
    size = len(poset)
    full = (1 << size) - 1
    zero, one = poset.bottom, poset.top

    order = AxiomResult("partial_order")
    for i in range(size):
        order.checked += 1
        if not up[i] >> i & 1:
            order.fail((i, i))
        for j in _bits(up[i] & ~(1 << i)):
            if up[j] >> i & 1:
                order.fail((i, j))
            if up[j] & ~up[i]:
                order.fail((i, j))

    bounds = AxiomResult("bounds")
    bounds.checked = 2
    if up[zero] != full:
        bounds.fail(("bottom", zero))
    if down[one] != full:
        bounds.fail(("top", one))

    reversing = AxiomResult("order_reversing")
    for i in range(size):
        for j in _bits(up[i]):
            reversing.checked += 1
            if not up[perp[j]] >> perp[i] & 1:
                reversing.fail((i, j))

    involution = AxiomResult("involution")
    for i in range(size):
        involution.checked += 1
        if perp[perp[i]] != i:
            involution.fail((i,))

    complement = AxiomResult("complement_bounds")
    for i in range(size):
        complement.checked += 1
        if down[i] & down[perp[i]] != 1 << zero or up[i] & up[perp[i]] != 1 << one:
            complement.fail((i,))

    join_exists = AxiomResult("orthogonal_join_exists")
    join_formula = AxiomResult("orthogonal_join_formula")
    orthomodular = AxiomResult("orthomodular_identity")
    for i in range(size):
        for k in _bits(up[i]):
            j = perp[k]  # i <= perp(j), so i and j are orthogonal
            join_exists.checked += 1
            s = poset.lub(i, j)
            if s is None:
                join_exists.fail((i, j))
                continue
            join_formula.checked += 1
            formula = poset.index.get(orthogonal_join(poset[i], poset[j]))
            if formula != s:
                join_formula.fail((i, j))
            orthomodular.checked += 1
            t = poset.lub(i, perp[s])
            if t != perp[j]:
                orthomodular.fail((i, j))

    return OMPReport(poset.n, size, [
        order, bounds, reversing, involution, complement,
        join_exists, join_formula, orthomodular,
    ])


# -- atoms --------------------------------------------------------------------

def is_p_atom(fp: FactorPair, p: int) -> bool:
    return (
        is_prime(p)
        and fp.theta.block_count == p
        and is_regular(fp.theta_prime) == p
    )


def atoms(poset: FactPoset) -> list[FactorPair]:
    return [poset[i] for i in poset.atoms()]


# -- interval isomorphism -----------------------------------------------------

class IntervalIso:
    """Transport between the interval [0, (gamma, gamma')] and Fact(X/gamma)."""

    def __init__(self, top_pair: FactorPair):
        _require_factor_pair(top_pair)
        self.top = top_pair
        self.gamma, self.gamma_prime = top_pair
        self.quotient_size = self.gamma.block_count
        self._reps = [block[0] for block in self.gamma.blocks]

    def contains(self, fp: FactorPair) -> bool:
        return leq(fp, self.top)

    def _quotient(self, rel: EquivRel) -> EquivRel:
        return EquivRel([rel.block_of[r] for r in self._reps])

    def _lift(self, rel: EquivRel) -> EquivRel:
        gb = self.gamma.block_of
        return EquivRel([rel.block_of[gb[x]] for x in range(self.gamma.n)])

    def sigma(self, fp: FactorPair) -> FactorPair:
        if not self.contains(fp):
            raise NotApplicable(f"{fp!r} does not lie below {self.top!r}")
        theta, theta_p = fp
        joined = compose(theta_p, self.gamma).to_equivrel()
        return FactorPair(self._quotient(theta), self._quotient(joined))

    def phi(self, fp: FactorPair) -> FactorPair:
        mu, nu = fp
        if mu.n != self.quotient_size:
            raise GroundMismatch("pair does not live on the quotient set")
        return FactorPair(self._lift(mu), meet(self._lift(nu), self.gamma_prime))

    def interval(self, poset: FactPoset) -> list[int]:
        """Indices of the interval's elements in a materialized poset."""
        return list(_bits(poset.down(poset.index[self.top])))


def interval_iso(gamma_pair: FactorPair) -> IntervalIso:
    return IntervalIso(gamma_pair)


def p_atoms_below(fp: FactorPair, p: int) -> list[FactorPair]:
    """All p-atoms beneath fp, transported back from Fact(X/theta)."""
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    _require_factor_pair(fp)
    m = fp.theta.block_count
    if m % p:
        raise NotApplicable(f"{p} does not divide the block count {m}; no {p}-atom lies below")
    iso = IntervalIso(FactorPair(fp.theta, fp.theta_prime))
    found = []
    for blocks in equal_block_partitions(m, m // p):
        mu = from_blocks(m, blocks)
        for nu in complements(mu):
            found.append(iso.phi(FactorPair(mu, nu)))
    return found


@dataclass
class AtomFormulaReport:
    atom_count: int
    intersection_ok: bool
    union_ok: bool
    lub_ok: bool | None  # None when no materialized poset was available

    @property
    def passed(self) -> bool:
        return self.intersection_ok and self.union_ok and self.lub_ok is not False


def verify_atom_formulas(fp: FactorPair, p: int, poset: FactPoset | None = None) -> AtomFormulaReport:
    """Check that fp is recovered from the p-atoms beneath it.

    theta should be the intersection of their first components, theta' the
    join of their second components, and fp their least upper bound.
    """
    below = p_atoms_below(fp, p)
    n = fp.n
    inter_ok = meet_all((a.theta for a in below), n) == fp.theta
    union_ok = join_closure((a.theta_prime for a in below), n) == fp.theta_prime
    lub_ok = None
    if poset is None and n <= get_caps().order_cap and n <= 8:
        poset = enumerate_fact(n)
    if poset is not None:
        poset.materialize()
        upper = (1 << len(poset)) - 1
        for a in below:
            upper &= poset.up(poset.index[a])
        me = poset.index[fp]
        lub_ok = bool(upper >> me & 1) and upper & ~poset.up(me) == 0
    return AtomFormulaReport(len(below), inter_ok, union_ok, lub_ok)
