"""Automorphisms of Fact(X) and Eq*(X), and recovering point permutations.

The reconstruction pipeline treats a size-preserving automorphism beta of
Eq*(X) as an opaque oracle.  From the way beta moves 2-relations that agree
except on 4-sets it rebuilds maps on 4-sets and on blocks, and finally a
permutation sigma of X with beta(pi) = sigma(pi) for every 2-relation pi.
Every step whose justification relies on X being infinite is audited at run
time, so a beta that is not induced by a permutation surfaces as an error.
"""

from __future__ import annotations

import itertools
import random
from collections import Counter, deque
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from .config import get_caps
from .eqstar import (
    agree_except_on,
    all_n_relations,
    companions_on,
    normal_ideal,
    pairing_with_blocks,
)
from .errors import (
    AuditFailure,
    BadIndex,
    ChoiceInconsistency,
    ClausesUnsatisfied,
    InconsistentFirstComponents,
    NotApplicable,
    NotBlockUnion,
    NotDivisible,
    NotPAtom,
    NotRegular,
    NotSharedBlock,
    PipelineHypothesisFailure,
    ProfileMismatch,
    TooLarge,
    VerificationFailure,
    WitnessIntersectionNotSingleton,
)
from .factlat import (
    FactorPair,
    FactPoset,
    IntervalIso,
    complement_of_regular,
    complements,
    is_factor_pair,
    is_p_atom,
    is_prime,
    iter_factor_pairs,
    leq,
)
from .partitions import (
    EquivRel,
    Permutation,
    apply_perm,
    compose,
    ground_size,
    is_n_relation,
    is_regular,
)

__all__ = [
    "Permutation",
    "SizePreservingAut",
    "PermutationAut",
    "TableAut",
    "FactAutomorphismOracle",
    "psi_star",
    "gamma",
    "induced_beta",
    "Reconstructor",
    "sigma4",
    "sigma2",
    "sigma_blockset",
    "cross_relation_agreement",
    "Witness",
    "ReconstructionTrace",
    "extract_permutation",
    "corrupted_beta",
    "SpecialEnumeration",
    "special_enumeration",
    "cube_pairs",
    "j_twist",
    "bat_variants",
    "dominating_pairs",
    "sim_p",
    "sim_p_neighbours",
    "approx_p_reachable",
    "transitive_move",
    "AutGroup",
    "brute_force_aut",
    "is_poset_automorphism",
    "gamma_action",
    "gamma_image_kernel",
    "SizeReport",
    "verify_size_preservation",
]


# -- automorphism oracles -----------------------------------------------------

class SizePreservingAut:
    """An automorphism of Eq*(X), given by a pair of mutually inverse maps."""

    def __init__(self, ground, forward: Callable[[EquivRel], EquivRel],
                 backward: Callable[[EquivRel], EquivRel]):
        self.n = ground_size(ground)
        self.forward = forward
        self.backward = backward

    def __call__(self, theta: EquivRel) -> EquivRel:
        return self.forward(theta)

    def inverse(self) -> "SizePreservingAut":
        return SizePreservingAut(self.n, self.backward, self.forward)

    def compose(self, other: "SizePreservingAut") -> "SizePreservingAut":
        """self after other."""
        return SizePreservingAut(
            self.n,
            lambda t: self.forward(other.forward(t)),
            lambda t: other.backward(self.backward(t)),
        )

    def violations(self, relations: Sequence[EquivRel]) -> list[str]:
        """Invariant violations observed on a sample of regular relations."""
        out = []
        images = [self.forward(r) for r in relations]
        for r, img in zip(relations, images):
            if self.backward(img) != r:
                out.append(f"backward(forward({r!r})) != itself")
            if is_regular(r) != is_regular(img):
                out.append(f"block size of {r!r} not preserved")
        for (r, ri), (s, si) in itertools.combinations(zip(relations, images), 2):
            if (r <= s) != (ri <= si) or (s <= r) != (si <= ri):
                out.append(f"inclusion between {r!r} and {s!r} not preserved")
        return out


class PermutationAut(SizePreservingAut):
    def __init__(self, sigma: Permutation):
        inv = sigma.inverse()
        super().__init__(sigma.n, lambda t: apply_perm(sigma, t), lambda t: apply_perm(inv, t))
        self.permutation = sigma


class TableAut(SizePreservingAut):
    """A base automorphism with some images replaced by explicit table entries.

    The replaced images must be a rearrangement of the base images of the
    same keys, so the result is still a bijection.
    """

    def __init__(self, base: SizePreservingAut, table: dict[EquivRel, EquivRel]):
        if {base(k) for k in table} != set(table.values()):
            raise ValueError("table entries do not permute the base images of their keys")
        self.base = base
        self.table = dict(table)
        back = {v: k for k, v in self.table.items()}
        super().__init__(
            base.n,
            lambda t: self.table[t] if t in self.table else base(t),
            lambda t: back[t] if t in back else base.backward(t),
        )


class FactAutomorphismOracle:
    """An automorphism of Fact(X), given by mutually inverse maps."""

    def __init__(self, ground, forward: Callable[[FactorPair], FactorPair],
                 backward: Callable[[FactorPair], FactorPair]):
        self.n = ground_size(ground)
        self.forward = forward
        self.backward = backward

    def __call__(self, fp: FactorPair) -> FactorPair:
        return self.forward(fp)

    def inverse(self) -> "FactAutomorphismOracle":
        return FactAutomorphismOracle(self.n, self.backward, self.forward)

    def compose(self, other: "FactAutomorphismOracle") -> "FactAutomorphismOracle":
        return FactAutomorphismOracle(
            self.n,
            lambda p: self.forward(other.forward(p)),
            lambda p: other.backward(self.backward(p)),
        )

    def violations(self, pairs: Sequence[FactorPair]) -> list[str]:
        out = []
        images = [self.forward(p) for p in pairs]
        for p, img in zip(pairs, images):
            if self.backward(img) != p:
                out.append(f"backward(forward({p!r})) != itself")
            if self.forward(p.perp()) != img.perp():
                out.append(f"orthocomplement of {p!r} not respected")
        for (p, pi), (q, qi) in itertools.combinations(zip(pairs, images), 2):
            if leq(p, q) != leq(pi, qi) or leq(q, p) != leq(qi, pi):
                out.append(f"order between {p!r} and {q!r} not preserved")
        return out


def psi_star(sigma: Permutation) -> PermutationAut:
    return PermutationAut(sigma)


def gamma(sigma: Permutation) -> FactAutomorphismOracle:
    inv = sigma.inverse()

    def move(perm):
        return lambda fp: FactorPair(apply_perm(perm, fp.theta), apply_perm(perm, fp.theta_prime))

    return FactAutomorphismOracle(sigma.n, move(sigma), move(inv))


def _random_complement(theta: EquivRel, rng: random.Random) -> EquivRel:
    labels = [0] * theta.n
    for block in theta.blocks:
        order = list(block)
        rng.shuffle(order)
        for j, x in enumerate(order):
            labels[x] = j
    return EquivRel(labels)


def induced_beta(alpha: FactAutomorphismOracle, audits: int = 5, seed: int = 0) -> SizePreservingAut:
    """beta(theta) is the first component of alpha(theta, theta') for a complement theta'.

    Every evaluation also tries ``audits`` random complements and insists on
    the same first component.
    """
    def make(oracle: FactAutomorphismOracle):
        def apply(theta: EquivRel) -> EquivRel:
            if is_regular(theta) is None:
                raise NotRegular(f"{theta!r} is not regular")
            first = oracle(complement_of_regular(theta)).theta
            rng = random.Random(hash((seed, theta.block_of)))
            for _ in range(audits):
                other = oracle(FactorPair(theta, _random_complement(theta, rng))).theta
                if other != first:
                    raise InconsistentFirstComponents(
                        f"complements of {theta!r} have images with different first components"
                    )
            return first
        return apply

    return SizePreservingAut(alpha.n, make(alpha), make(alpha.inverse()))


# -- the reconstruction pipeline ------------------------------------------------

def _choice_pairs(count: int) -> list[tuple[int, int]]:
    # consecutive pairs, so the audit covers both the shared-set and the
    # disjoint-pairs cases of choice independence
    if count >= 4:
        return [(0, 1), (1, 2), (2, 3)]
    if count == 3:
        return [(0, 1), (1, 2), (0, 2)]
    return [(0, 1)]


class Reconstructor:
    """Memoized sigma4 / sigma2 / block-set maps for one oracle beta."""

    def __init__(self, beta: SizePreservingAut, audit: bool = True):
        self.beta = beta
        self.audit = audit
        self.counts: Counter = Counter()
        self._images: dict[EquivRel, EquivRel] = {}
        self._four: dict[tuple, tuple] = {}
        self._two: dict[tuple, tuple] = {}

    def image(self, rel: EquivRel) -> EquivRel:
        out = self._images.get(rel)
        if out is None:
            self.counts["beta_evaluations"] += 1
            out = self.beta(rel)
            if not is_n_relation(out, 2):
                raise PipelineHypothesisFailure(f"beta sends the 2-relation {rel!r} to {out!r}")
            self._images[rel] = out
        return out

    def _audit(self, ok: bool, exc: type, message: str) -> None:
        self.counts["audits"] += 1
        if not ok:
            raise exc(message)

    def sigma4(self, pi: EquivRel, area: Sequence[int]) -> tuple[int, ...]:
        area = tuple(sorted(area))
        key = (pi, area)
        hit = self._four.get(key)
        if hit is not None:
            return hit
        self.counts["sigma4"] += 1
        first, second = companions_on(pi, area)
        img_pi, img_1, img_2 = self.image(pi), self.image(first), self.image(second)
        target = agree_except_on(img_pi, img_1)
        if target is None:
            raise PipelineHypothesisFailure(
                f"images of relations agreeing except on {area} do not agree except on a 4-set"
            )
        if self.audit:
            self._audit(
                agree_except_on(img_pi, img_2) == target and agree_except_on(img_1, img_2) == target,
                ChoiceInconsistency, f"companions on {area} lead to different 4-sets",
            )
            ideal = normal_ideal([img_pi, img_1], 2, 4)
            self._audit(
                len(ideal) == 3 and img_2 in ideal,
                PipelineHypothesisFailure,
                f"normal ideal of the images over {area} has {len(ideal)} members, not 3",
            )
        self._four[key] = target
        return target

    def sigma2(self, pi: EquivRel, block: Sequence[int]) -> tuple[int, int]:
        block = tuple(sorted(block))
        key = (pi, block)
        hit = self._two.get(key)
        if hit is not None:
            return hit
        if not pi.has_block(block):
            raise NotBlockUnion(f"{block} is not a block of {pi!r}")
        others = [b for b in pi.blocks if b != block]
        if len(others) < 2:
            raise NotApplicable("sigma2 needs at least two other blocks")
        self.counts["sigma2"] += 1
        img_pi = self.image(pi)
        choices = _choice_pairs(len(others)) if self.audit else [(0, 1)]
        result = None
        for i, j in choices:
            got = set(self.sigma4(pi, block + others[i])) & set(self.sigma4(pi, block + others[j]))
            got = tuple(sorted(got))
            if result is None:
                self._audit(
                    len(got) == 2 and img_pi.has_block(got), ChoiceInconsistency,
                    f"4-set images around {block} meet in {got}, not a block of beta(pi)",
                )
                result = got
            else:
                self._audit(got == result, ChoiceInconsistency,
                            f"4-set choices around {block} disagree: {got} vs {result}")
        self._two[key] = result
        return result

    def blockset(self, pi: EquivRel, subset: Iterable[int]) -> frozenset:
        subset = set(subset)
        if not pi.is_union_of_blocks(subset):
            raise NotBlockUnion(f"{sorted(subset)} is not a union of blocks")
        out = set()
        for block in pi.blocks:
            if block[0] in subset:
                out.update(self.sigma2(pi, block))
        return frozenset(out)

    def agrees_across(self, block: Sequence[int], pi: EquivRel, lam: EquivRel) -> bool:
        block = tuple(sorted(block))
        if not (pi.has_block(block) and lam.has_block(block)):
            raise NotSharedBlock(f"{block} is not a block of both relations")
        return self.sigma2(pi, block) == self.sigma2(lam, block)


def sigma4(beta: SizePreservingAut, pi: EquivRel, area: Sequence[int]) -> tuple[int, ...]:
    return Reconstructor(beta).sigma4(pi, area)


def sigma2(beta: SizePreservingAut, pi: EquivRel, block: Sequence[int]) -> tuple[int, int]:
    return Reconstructor(beta).sigma2(pi, block)


def sigma_blockset(beta: SizePreservingAut, pi: EquivRel, subset: Iterable[int]) -> frozenset:
    return Reconstructor(beta).blockset(pi, subset)


def cross_relation_agreement(beta: SizePreservingAut, block: Sequence[int],
                             pi: EquivRel, lam: EquivRel) -> bool:
    return Reconstructor(beta).agrees_across(block, pi, lam)


@dataclass(frozen=True)
class Witness:
    element: int
    first_block: tuple[int, int]
    second_block: tuple[int, int]
    pi: EquivRel
    lam: EquivRel
    first_image: tuple[int, int]
    second_image: tuple[int, int]
    value: int

    def as_dict(self) -> dict:
        return {
            "element": self.element,
            "P": list(self.first_block),
            "Q": list(self.second_block),
            "pi": list(self.pi.block_of),
            "lambda": list(self.lam.block_of),
            "sigma_P": list(self.first_image),
            "sigma_Q": list(self.second_image),
            "value": self.value,
        }


@dataclass
class ReconstructionTrace:
    n: int
    witnesses: list[Witness] = field(default_factory=list)
    audit_witnesses: list[Witness] = field(default_factory=list)
    counts: dict = field(default_factory=dict)
    audits_passed: int = 0
    verified_relations: int = 0
    permutation: list[int] = field(default_factory=list)

    def replay(self, beta: SizePreservingAut) -> Permutation:
        """Recompute the permutation from the recorded witnesses alone."""
        rec = Reconstructor(beta, audit=False)
        image = []
        for w in self.witnesses:
            meet = set(rec.sigma2(w.pi, w.first_block)) & set(rec.sigma2(w.lam, w.second_block))
            if len(meet) != 1:
                raise WitnessIntersectionNotSingleton(f"replay of {w.element} gives {sorted(meet)}")
            image.append(meet.pop())
        return Permutation(image)

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "witnesses": [w.as_dict() for w in self.witnesses],
            "audit_witnesses": [w.as_dict() for w in self.audit_witnesses],
            "counts": dict(sorted(self.counts.items())),
            "audits_passed": self.audits_passed,
            "audit_failures": 0,
            "verified_relations": self.verified_relations,
            "permutation": list(self.permutation),
        }


def _witness(rec: Reconstructor, n: int, x: int, y: int, z: int) -> Witness:
    first, second = tuple(sorted((x, y))), tuple(sorted((x, z)))
    pi = pairing_with_blocks(n, [first])
    lam = pairing_with_blocks(n, [second])
    img_p, img_q = rec.sigma2(pi, first), rec.sigma2(lam, second)
    meet = set(img_p) & set(img_q)
    if len(meet) != 1:
        raise WitnessIntersectionNotSingleton(
            f"images {img_p} and {img_q} of blocks through {x} meet in {sorted(meet)}"
        )
    return Witness(x, first, second, pi, lam, img_p, img_q, meet.pop())


def _random_pairing(n: int, rng: random.Random) -> EquivRel:
    order = list(range(n))
    rng.shuffle(order)
    labels = [0] * n
    for i, x in enumerate(order):
        labels[x] = i // 2
    return EquivRel(labels)


def extract_permutation(
    beta: SizePreservingAut,
    modulus: int = 12,
    audit: bool = True,
    verify: bool = True,
    verify_samples: int = 2000,
    seed: int = 0,
) -> tuple[Permutation, ReconstructionTrace]:
    """Recover sigma with beta(pi) = sigma(pi) on 2-relations.

    For each x the witnesses are P = {x, y} and Q = {x, z} with y, z the two
    smallest other elements, each completed to a 2-relation by pairing the
    remaining elements in ascending order.  The audits repeat the
    computation with the next two elements and compare block images across a
    second relation containing P.  Verification checks every 2-relation when
    n <= 12 and a seeded sample otherwise.
    """
    n = beta.n
    if n % modulus:
        raise NotDivisible(f"the ground size {n} is not a multiple of {modulus}")
    if n < 6:
        raise NotApplicable("the pipeline needs at least six points")
    rec = Reconstructor(beta, audit=audit)
    trace = ReconstructionTrace(n)
    image = []
    for x in range(n):
        others = [e for e in range(n) if e != x]
        main = _witness(rec, n, x, others[0], others[1])
        trace.witnesses.append(main)
        if audit:
            spare = _witness(rec, n, x, others[2], others[3])
            trace.audit_witnesses.append(spare)
            rec._audit(spare.value == main.value, AuditFailure,
                       f"witness pairs for {x} give {main.value} and {spare.value}")
            lam = pairing_with_blocks(n, [main.first_block], reverse=True)
            rec._audit(rec.agrees_across(main.first_block, main.pi, lam), AuditFailure,
                       f"block {main.first_block} has different images under two relations")
        image.append(main.value)
    if audit:
        rec._audit(len(set(image)) == n, AuditFailure, "the recovered map is not a bijection")
    elif len(set(image)) != n:
        raise AuditFailure("the recovered map is not a bijection")
    sigma = Permutation(image)
    if verify:
        if n <= 12:
            sample: Iterable[EquivRel] = all_n_relations(n, 2)
        else:
            rng = random.Random(seed)
            sample = (_random_pairing(n, rng) for _ in range(verify_samples))
        for rel in sample:
            trace.verified_relations += 1
            if beta(rel) != apply_perm(sigma, rel):
                raise VerificationFailure(f"beta({rel!r}) differs from its image under sigma")
    trace.counts = dict(rec.counts)
    trace.audits_passed = rec.counts["audits"]
    trace.permutation = list(image)
    return sigma, trace


def corrupted_beta(n: int, rng: random.Random) -> tuple[TableAut, dict]:
    """A table automorphism that is not induced by any permutation.

    Starting from a random Psi*(tau), pick distinct points u, v, w and let s
    swap u and w.  Every 2-relation with {u, v} or {w, v} as a block is sent
    to tau(s(theta)) instead of tau(theta); s exchanges these two families,
    so the table is still a bijection on 2-relations.
    """
    tau = Permutation.random(n, rng)
    u, v, w = rng.sample(range(n), 3)
    swap = Permutation.from_cycles(n, [(u, w)])
    base = psi_star(tau)
    table = {}
    for pinned in ((u, v), (w, v)):
        rest = [x for x in range(n) if x not in pinned]
        for rel in _pairings_with(n, pinned, rest):
            table[rel] = base(apply_perm(swap, rel))
    info = {"tau": list(tau.image), "u": u, "v": v, "w": w, "overridden": len(table)}
    return TableAut(base, table), info


def _pairings_with(n: int, pinned: tuple[int, int], rest: list[int]):
    from .partitions import equal_block_partitions

    for blocks in equal_block_partitions(rest, 2):
        yield pairing_with_blocks(n, [pinned, *blocks])


# -- special enumerations, twists and the relation ~p --------------------------

_COLUMNS = {
    8: [("a", "b"), ("c", "d"), ("e", "f"), ("g", "h")],
    27: [
        ("a", "b", "o"), ("c", "d", "r"), ("i", "l", "u"),
        ("e", "f", "p"), ("g", "h", "s"), ("j", "m", "v"),
        ("x", "z", "q"), ("y", "omega", "t"), ("k", "n", "w"),
    ],
}
# columns whose middle-level points trade places in the twist and its variants
_LEFT_PAIR = (0, 1)
_RIGHT_PAIR = {8: (2, 3), 27: (3, 4)}


@dataclass
class SpecialEnumeration:
    arity: int
    index_count: int
    table: dict[tuple[str, int], int]
    fp: FactorPair
    gp: FactorPair

    @property
    def levels(self) -> int:
        return 2 if self.arity == 8 else 3

    @property
    def columns(self) -> list[tuple[str, ...]]:
        return _COLUMNS[self.arity]

    def element(self, letter: str, index: int) -> int:
        return self.table[(letter, index)]

    def _relation(self, key) -> EquivRel:
        labels = [0] * self.fp.n
        ids: dict = {}
        for c, column in enumerate(self.columns):
            for t, letter in enumerate(column):
                for i in range(self.index_count):
                    labels[self.table[(letter, i)]] = ids.setdefault(key(t, c, i), len(ids))
        return EquivRel(labels)

    def check(self) -> bool:
        """The four relations have exactly the prescribed block patterns."""
        if sorted(self.table.values()) != list(range(self.fp.n)):
            return False
        return (
            self._relation(lambda t, c, i: t) == self.fp.theta
            and self._relation(lambda t, c, i: (c, i)) == self.fp.theta_prime
            and self._relation(lambda t, c, i: (t, c)) == self.gp.theta
            and self._relation(lambda t, c, i: i) == self.gp.theta_prime
        )

    def twisted(self, pairs: Sequence[tuple[int, int]], indices: Iterable[int]) -> EquivRel:
        """theta' with the middle-level points of the paired columns exchanged
        inside the chosen cubes."""
        indices = set(indices)
        labels = [0] * self.fp.n
        ncols = len(self.columns)
        for c, column in enumerate(self.columns):
            for t, letter in enumerate(column):
                for i in range(self.index_count):
                    labels[self.table[(letter, i)]] = c + ncols * i
        for i in indices:
            for c1, c2 in pairs:
                x = self.table[(self.columns[c1][1], i)]
                y = self.table[(self.columns[c2][1], i)]
                labels[x], labels[y] = labels[y], labels[x]
        return EquivRel(labels)


def special_enumeration(fp: FactorPair, gp: FactorPair, arity: int = 8) -> SpecialEnumeration:
    """Label X as cubes, realizing fp below gp, by reading off the coordinates
    x -> (theta block, (theta' o gamma) block, gamma' block)."""
    if arity not in _COLUMNS:
        raise ValueError("arity must be 8 or 27")
    p = 2 if arity == 8 else 3
    n = fp.n
    theta, theta_p = fp
    gam, gam_p = gp
    ok = (
        n % arity == 0
        and gam.n == n
        and theta.block_count == p and is_regular(theta_p) == p
        and gam.block_count == arity and is_regular(gam_p) == arity
        and is_factor_pair(theta, theta_p) and is_factor_pair(gam, gam_p)
        and leq(fp, gp)
    )
    if not ok:
        raise ClausesUnsatisfied("the pair is not a matching atom below a pair with the right profile")
    middle = compose(theta_p, gam).to_equivrel()
    coords = {}
    for x in range(n):
        coords[(theta.block_of[x], middle.block_of[x], gam_p.block_of[x])] = x
    count = n // arity
    if len(coords) != n or middle.block_count != arity // p:
        raise ClausesUnsatisfied("the relations do not form a three-fold decomposition")
    table = {}
    for c, column in enumerate(_COLUMNS[arity]):
        for t, letter in enumerate(column):
            for i in range(count):
                table[(letter, i)] = coords[(t, c, i)]
    xi = SpecialEnumeration(arity, count, table, fp, gp)
    if not xi.check():
        raise ClausesUnsatisfied("the decomposition does not give the block pattern")
    return xi


def cube_pairs(arity: int, index_count: int) -> tuple[FactorPair, FactorPair]:
    """The pairs (theta, theta') below (gamma, gamma') on arity * index_count
    points laid out as x = level + levels * (column + columns * index)."""
    if arity not in _COLUMNS:
        raise ValueError("arity must be 8 or 27")
    levels = 2 if arity == 8 else 3
    cols = arity // levels
    n = arity * index_count
    coords = [(x % levels, (x // levels) % cols, x // arity) for x in range(n)]

    def rel(key):
        ids: dict = {}
        return EquivRel([ids.setdefault(key(*c), len(ids)) for c in coords])

    fp = FactorPair(rel(lambda t, c, i: t), rel(lambda t, c, i: (c, i)))
    gp = FactorPair(rel(lambda t, c, i: (t, c)), rel(lambda t, c, i: i))
    return fp, gp


def j_twist(xi: SpecialEnumeration, subset: Iterable[int]) -> EquivRel:
    """Replace the blocks through a_j, c_j with {a_j, d_j, ...}, {c_j, b_j, ...} for j in the subset."""
    subset = list(subset)
    if any(j not in range(xi.index_count) for j in subset):
        raise BadIndex(f"indices must lie in range({xi.index_count})")
    return xi.twisted([_LEFT_PAIR], subset)


def bat_variants(xi: SpecialEnumeration) -> list[EquivRel]:
    """[theta^1, ..., theta^4]: the original, both sides twisted in every cube,
    only the e-h side twisted, only the a-d side twisted."""
    every = range(xi.index_count)
    right = _RIGHT_PAIR[xi.arity]
    return [
        xi.fp.theta_prime,
        xi.twisted([_LEFT_PAIR, right], every),
        xi.twisted([right], every),
        xi.twisted([_LEFT_PAIR], every),
    ]


def _require_p_atom(fp: FactorPair, p: int) -> None:
    if not is_p_atom(fp, p):
        raise NotPAtom(f"{fp!r} is not a {p}-atom")


def dominating_pairs(a: FactorPair, p: int):
    """Factor pairs (gamma, gamma') above the p-atom a with p**3 gamma-blocks.

    (gamma', gamma) lies below a's orthocomplement (theta', theta), so these
    are transported from factor pairs of X/theta' whose first component has
    blocks of size p**2.
    """
    _require_p_atom(a, p)
    n = a.n
    if n % p ** 3:
        raise NotApplicable(f"{p ** 3} does not divide {n}")
    iso = IntervalIso(a.perp())
    for mu_nu in iter_factor_pairs(iso.quotient_size, block_size=p * p):
        g_prime, g = iso.phi(mu_nu)
        if g.block_count == p ** 3:
            yield FactorPair(g, g_prime)


def sim_p(a: FactorPair, b: FactorPair, p: int) -> bool:
    _require_p_atom(a, p)
    _require_p_atom(b, p)
    if a.theta != b.theta:
        return False
    return any(leq(b, g) for g in dominating_pairs(a, p))


def _atoms_with_first(g: FactorPair, theta: EquivRel, p: int):
    iso = IntervalIso(g)
    mu = EquivRel([theta.block_of[r] for r in iso._reps])
    for nu in complements(mu):
        cand = iso.phi(FactorPair(mu, nu))
        if is_p_atom(cand, p):
            yield cand


def sim_p_neighbours(a: FactorPair, p: int) -> list[FactorPair]:
    """Every p-atom c with a ~p c."""
    found = {}
    for g in dominating_pairs(a, p):
        for c in _atoms_with_first(g, a.theta, p):
            found.setdefault(c, None)
    return list(found)


def approx_p_reachable(a: FactorPair, b: FactorPair, p: int, budget: int | None = None):
    """Breadth-first search along ~p from a to b; the chain, or None once the
    budget of expanded atoms is spent or the component is exhausted.

    Neighbourhoods are computed once, for a.  A permutation preserving every
    theta-block and carrying a to c induces an automorphism fixing theta, so
    it carries the neighbours of a onto the neighbours of c.
    """
    _require_p_atom(a, p)
    _require_p_atom(b, p)
    if a.theta != b.theta:
        return None
    budget = get_caps().search_budget if budget is None else budget
    around_a = [c.theta_prime for c in sim_p_neighbours(a, p)]
    parent = {a: None}
    queue = deque([a])
    expanded = 0
    while queue and expanded < budget and b not in parent:
        cur = queue.popleft()
        expanded += 1
        move = transitive_move(a, cur)
        for rel in around_a:
            nxt = FactorPair(a.theta, apply_perm(move, rel))
            if nxt not in parent:
                parent[nxt] = cur
                queue.append(nxt)
    if b not in parent:
        return None
    chain = [b]
    while parent[chain[-1]] is not None:
        chain.append(parent[chain[-1]])
    return chain[::-1]


def transitive_move(fp1: FactorPair, fp2: FactorPair) -> Permutation:
    """sigma with Gamma(sigma)(fp1) = fp2, sending the point in the i-th
    theta'-block and j-th theta-block to the matching point for fp2."""
    if fp1.profile != fp2.profile:
        raise ProfileMismatch(f"block counts {fp1.profile} and {fp2.profile} differ")
    n = fp1.n
    target = {}
    for y in range(n):
        target[(fp2.theta_prime.block_of[y], fp2.theta.block_of[y])] = y
    return Permutation([target[(fp1.theta_prime.block_of[x], fp1.theta.block_of[x])] for x in range(n)])


# -- automorphism groups of small Fact(X) --------------------------------------

@dataclass
class AutGroup:
    order: int
    generators: list[list[int]]
    base: list[int]
    orbit_sizes: list[int]
    respects_perp: bool = True

    def as_dict(self) -> dict:
        return {"order": str(self.order), "generators": self.generators}


def is_poset_automorphism(poset: FactPoset, perm: Sequence[int], respect_perp: bool = True) -> bool:
    if sorted(perm) != list(range(len(poset))):
        return False
    for i in range(len(poset)):
        up = 0
        for j in _bits(poset.up(i)):
            up |= 1 << perm[j]
        if up != poset.up(perm[i]):
            return False
        if respect_perp and perm[poset.perp[i]] != poset.perp[perm[i]]:
            return False
    return True


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class _Refiner:
    """Equitable colour refinement on the comparability graph (plus perp)."""

    def __init__(self, poset: FactPoset, respect_perp: bool):
        poset.materialize()
        size = len(poset)
        self.size = size
        self.above = [[j for j in _bits(poset.up(i)) if j != i] for i in range(size)]
        self.below = [[j for j in _bits(poset.down(i)) if j != i] for i in range(size)]
        self.perp = poset.perp if respect_perp else None
        heights = poset.heights()
        seed = [
            (heights[i], len(self.above[i]), len(self.below[i]),
             (self.perp[i] == i) if self.perp else False)
            for i in range(size)
        ]
        self.initial = self._relabel(seed)

    @staticmethod
    def _relabel(signatures):
        ranks = {s: r for r, s in enumerate(sorted(set(signatures)))}
        return [ranks[s] for s in signatures]

    def refine(self, colours: list[int]) -> list[int]:
        count = len(set(colours))
        while True:
            sig = [
                (
                    colours[i],
                    tuple(sorted(colours[j] for j in self.above[i])),
                    tuple(sorted(colours[j] for j in self.below[i])),
                    colours[self.perp[i]] if self.perp else -1,
                )
                for i in range(self.size)
            ]
            colours = self._relabel(sig)
            new = len(set(colours))
            if new == count:
                return colours
            count = new

    def individualize(self, colours: list[int], v: int) -> list[int]:
        out = [2 * c for c in colours]
        out[v] += 1  # splits v off its cell; ranks of other cells keep their order
        return self.refine(self._relabel(out))


def _cells(colours: list[int]) -> dict[int, list[int]]:
    cells: dict[int, list[int]] = {}
    for v, c in enumerate(colours):
        cells.setdefault(c, []).append(v)
    return cells


def _target_cell(colours: list[int]) -> list[int] | None:
    best = None
    for c, members in sorted(_cells(colours).items()):
        if len(members) > 1 and (best is None or len(members) > len(best)):
            best = members
    return best


def _search(ref: _Refiner, poset, respect_perp, left: list[int], right: list[int]):
    """An automorphism mapping the left colouring onto the right one, if any."""
    if sorted(left) != sorted(right):
        return None
    cell = _target_cell(left)
    if cell is None:
        where = {c: v for v, c in enumerate(right)}
        perm = [where[left[v]] for v in range(ref.size)]
        return perm if is_poset_automorphism(poset, perm, respect_perp) else None
    v = cell[0]
    colour = left[v]
    for w in (u for u in range(ref.size) if right[u] == colour):
        found = _search(ref, poset, respect_perp, ref.individualize(left, v), ref.individualize(right, w))
        if found is not None:
            return found
    return None


def _orbit(point: int, generators: list[list[int]]) -> set[int]:
    seen = {point}
    stack = [point]
    while stack:
        x = stack.pop()
        for g in generators:
            y = g[x]
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return seen


def brute_force_aut(poset: FactPoset, respect_perp: bool = True, cap: int | None = None) -> AutGroup:
    """Order and generators of the automorphism group of a small Fact(X).

    Individualization-refinement along a base; the orbit of each base point
    under the pointwise stabilizer of the earlier ones is found deepest level
    first, so generators found lower down prune the searches higher up.
    """
    cap = get_caps().aut_cap if cap is None else cap
    if len(poset) > cap:
        raise TooLarge(f"{len(poset)} elements exceed the cap of {cap}")
    ref = _Refiner(poset, respect_perp)
    colourings = [ref.refine(ref.initial)]
    base = []
    while True:
        cell = _target_cell(colourings[-1])
        if cell is None:
            break
        base.append(cell[0])
        colourings.append(ref.individualize(colourings[-1], cell[0]))
    generators: list[list[int]] = []
    orbit_sizes = [0] * len(base)
    for level in range(len(base) - 1, -1, -1):
        point = base[level]
        fixed_colours = colourings[level]
        cell = [u for u in range(ref.size) if fixed_colours[u] == fixed_colours[point]]
        orbit = _orbit(point, generators)
        rejected: set[int] = set()
        for w in cell:
            if w in orbit or w in rejected:
                continue
            found = _search(ref, poset, respect_perp, colourings[level + 1],
                            ref.individualize(fixed_colours, w))
            if found is None:
                rejected |= _orbit(w, generators)
            else:
                generators.append(found)
                orbit = _orbit(point, generators)
        orbit_sizes[level] = len(orbit)
    order = 1
    for s in orbit_sizes:
        order *= s
    return AutGroup(order, generators, base, orbit_sizes, respect_perp)


def gamma_action(poset: FactPoset, sigma: Permutation) -> list[int]:
    g = gamma(sigma)
    return [poset.index[g(fp)] for fp in poset.elements]


def gamma_image_kernel(poset: FactPoset) -> tuple[int, int, list[list[int]]]:
    """|image|, |kernel| and the kernel elements of Gamma on Perm(X)."""
    images = set()
    kernel = []
    identity = list(range(len(poset)))
    for image in itertools.permutations(range(poset.n)):
        sigma = Permutation(image)
        act = gamma_action(poset, sigma)
        images.add(tuple(act))
        if act == identity:
            kernel.append(list(image))
    return len(images), len(kernel), kernel


@dataclass
class SizeReport:
    checked: int = 0
    violations: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations


def verify_size_preservation(alpha: FactAutomorphismOracle, samples: Iterable[FactorPair]) -> SizeReport:
    """Block sizes of both components, and p-atom status, survive alpha."""
    rep = SizeReport()
    for fp in samples:
        rep.checked += 1
        img = alpha(fp)
        if (is_regular(fp.theta), is_regular(fp.theta_prime)) != (is_regular(img.theta), is_regular(img.theta_prime)):
            rep.violations.append(f"block sizes of {fp!r} change")
        for p in range(2, fp.n + 1):
            if is_prime(p) and is_p_atom(fp, p) != is_p_atom(img, p):
                rep.violations.append(f"{p}-atom status of {fp!r} changes")
    return rep
