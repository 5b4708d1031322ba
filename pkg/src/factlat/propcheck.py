"""Randomized invariant checks, grouped into suites.

Each check runs one trial on a ground set of size n with a seeded generator
and returns None on success or a JSON-friendly witness on failure.  The
runner shrinks a failure to the smallest admissible ground size that still
fails with the same trial seed.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable

from . import eqstar, factlat, partitions, wigner
from .eqstar import RelFamily
from .factlat import FactorPair
from .partitions import EquivRel, Permutation

SUITES = ("partitions", "factlat", "eqstar", "wigner")

__all__ = ["Check", "CHECKS", "SUITES", "CheckResult", "run_suite", "random_relation", "random_regular"]


@dataclass(frozen=True)
class Check:
    name: str
    suite: str
    applies: Callable[[int], bool]
    run: Callable[[int, random.Random], object]


@dataclass
class CheckResult:
    name: str
    suite: str
    status: str  # pass, fail or skip
    trials: int
    witness: object = None

    def as_dict(self) -> dict:
        return {"name": self.name, "suite": self.suite, "status": self.status,
                "trials": self.trials, "witness": self.witness}


CHECKS: list[Check] = []


def check(suite: str, applies: Callable[[int], bool] = lambda n: n >= 1):
    def register(fn):
        CHECKS.append(Check(fn.__name__, suite, applies, fn))
        return fn
    return register


# -- random generators -----------------------------------------------------------

def random_relation(n: int, rng: random.Random) -> EquivRel:
    k = rng.randint(1, n)
    return EquivRel([rng.randrange(k) for _ in range(n)])


def random_regular(n: int, size: int, rng: random.Random) -> EquivRel:
    order = list(range(n))
    rng.shuffle(order)
    labels = [0] * n
    for i, x in enumerate(order):
        labels[x] = i // size
    return EquivRel(labels)


def _random_pair(n: int, rng: random.Random) -> FactorPair:
    size = rng.choice(factlat.divisors(n))
    theta = random_regular(n, size, rng)
    comp = factlat.complement_of_regular(theta).theta_prime
    return FactorPair(theta, partitions.apply_perm(_within_blocks(theta, rng), comp))


def _within_blocks(theta: EquivRel, rng: random.Random) -> Permutation:
    image = list(range(theta.n))
    for block in theta.blocks:
        shuffled = list(block)
        rng.shuffle(shuffled)
        for src, dst in zip(block, shuffled):
            image[src] = dst
    return Permutation(image)


def _pairs(rel: EquivRel) -> list[list[int]]:
    return [list(b) for b in rel.blocks]


# -- partitions -------------------------------------------------------------------

@check("partitions")
def meet_join_lattice_laws(n, rng):
    a, b = random_relation(n, rng), random_relation(n, rng)
    m = partitions.meet(a, b)
    j = partitions.join_closure([a, b])
    ok = (m == partitions.meet(b, a) and m <= a and m <= b and a <= j and b <= j
          and partitions.meet(a, j) == a and partitions.join_closure([a, m]) == a)
    return None if ok else {"a": _pairs(a), "b": _pairs(b)}


@check("partitions")
def composition_permutes_symmetry(n, rng):
    a, b = random_relation(n, rng), random_relation(n, rng)
    comp = partitions.compose(a, b)
    if partitions.permutes(a, b) != partitions.permutes(b, a):
        return {"a": _pairs(a), "b": _pairs(b)}
    if partitions.permutes(a, b) and comp.to_equivrel() != partitions.join_closure([a, b]):
        return {"a": _pairs(a), "b": _pairs(b)}
    return None


@check("partitions")
def permutation_action_homomorphism(n, rng):
    s, t = Permutation.random(n, rng), Permutation.random(n, rng)
    a = random_relation(n, rng)
    lhs = partitions.apply_perm(s * t, a)
    rhs = partitions.apply_perm(s, partitions.apply_perm(t, a))
    return None if lhs == rhs else {"relation": _pairs(a), "s": list(s.image), "t": list(t.image)}


# -- factlat ---------------------------------------------------------------------------

@check("factlat")
def complement_is_factor_pair(n, rng):
    fp = _random_pair(n, rng)
    ok = factlat.is_factor_pair(*fp) and fp.perp().perp() == fp
    return None if ok else {"theta": _pairs(fp.theta), "theta_prime": _pairs(fp.theta_prime)}


@check("factlat")
def order_matches_octet(n, rng):
    a, b = _random_pair(n, rng), _random_pair(n, rng)
    # bias towards comparable pairs by sometimes taking an atom below b
    if rng.random() < 0.5 and b.theta.block_count > 1:
        p = min(d for d in factlat.divisors(b.theta.block_count) if d > 1)
        below = factlat.p_atoms_below(b, p)
        a = below[rng.randrange(len(below))]
    for x, y in ((a, b), (b, a)):
        if factlat.leq(x, y) != (factlat.boolean_octet(x, y) is not None):
            return {"x": [_pairs(x.theta), _pairs(x.theta_prime)], "y": [_pairs(y.theta), _pairs(y.theta_prime)]}
    return None


@check("factlat")
def interval_maps_inverse(n, rng):
    g = _random_pair(n, rng)
    iso = factlat.IntervalIso(g)
    m = iso.quotient_size
    size = rng.choice(factlat.divisors(m))
    mu = random_regular(m, size, rng)
    nu = partitions.apply_perm(_within_blocks(mu, rng), factlat.complement_of_regular(mu).theta_prime)
    lifted = iso.phi(FactorPair(mu, nu))
    ok = factlat.is_factor_pair(*lifted) and factlat.leq(lifted, g) and iso.sigma(lifted) == FactorPair(mu, nu)
    return None if ok else {"gamma": [_pairs(g.theta), _pairs(g.theta_prime)], "mu": _pairs(mu), "nu": _pairs(nu)}


# -- eqstar -------------------------------------------------------------------------------

def _even(n):
    return n >= 4 and n % 4 == 0


def _random_two_family(n, rng, count):
    if rng.random() < 0.5:
        top = random_regular(n, 4, rng)
        out = []
        for _ in range(count):
            labels = [0] * n
            b = 0
            for block in top.blocks:
                pts = list(block)
                rng.shuffle(pts)
                for i in range(0, 4, 2):
                    labels[pts[i]] = labels[pts[i + 1]] = b
                    b += 1
            out.append(EquivRel(labels))
        return RelFamily(n, out)
    return RelFamily(n, [random_regular(n, 2, rng) for _ in range(count)])


@check("eqstar", _even)
def galois_laws(n, rng):
    fam = _random_two_family(n, rng, rng.randint(1, 3))
    other = _random_two_family(n, rng, 1)
    rep = eqstar.galois_check(fam, 2, 4, other=other)
    return None if rep.passed else {"family": [_pairs(r) for r in fam], "failed": rep.failures()}


@check("eqstar", _even)
def normal_ideal_idempotent(n, rng):
    fam = _random_two_family(n, rng, rng.randint(1, 2))
    ideal = eqstar.normal_ideal(fam, 2, 4)
    ok = fam <= ideal and eqstar.normal_ideal(ideal, 2, 4) == ideal
    return None if ok else {"family": [_pairs(r) for r in fam]}


@check("eqstar", _even)
def overlap_count_matches_upper_bounds(n, rng):
    pi = random_regular(n, 2, rng)
    if rng.random() < 0.5:
        lam = pi
        for _ in range(rng.randint(1, 2)):
            blocks = lam.blocks
            i, j = rng.sample(range(len(blocks)), 2)
            lam = eqstar.companions_on(lam, blocks[i] + blocks[j])[rng.randrange(2)]
    else:
        lam = random_regular(n, 2, rng)
    oc = eqstar.overlap_classify(pi, lam)
    bounds = sum(1 for _ in eqstar.iter_upper_k([pi, lam], 4))
    return None if oc.upper_bound_count == bounds else {"pi": _pairs(pi), "lambda": _pairs(lam)}


@check("eqstar", lambda n: n >= 2 and n % 2 == 0)
def cycles_partition_ground(n, rng):
    phi, rho = random_regular(n, 2, rng), random_regular(n, 2, rng)
    dec = eqstar.cycle_decomposition(phi, rho)
    flat = sorted(x for c in dec.cycles for x in c)
    closure = partitions.join_closure([phi, rho])
    ok = flat == list(range(n)) and all(len(c) % 2 == 0 for c in dec.cycles) and closure.block_count == len(dec.cycles)
    return None if ok else {"phi": _pairs(phi), "rho": _pairs(rho)}


@check("eqstar", _even)
def chain_links_overlap(n, rng):
    phi, rho = random_regular(n, 2, rng), random_regular(n, 2, rng)
    chain = eqstar.overlap_chain(phi, rho)
    ok = chain[0] == phi and chain[-1] == rho and all(
        eqstar.overlap_classify(u, v).overlaps for u, v in zip(chain, chain[1:]))
    return None if ok else {"phi": _pairs(phi), "rho": _pairs(rho)}


# -- wigner ----------------------------------------------------------------------------------

@check("wigner")
def gamma_homomorphism_and_perp(n, rng):
    s, t = Permutation.random(n, rng), Permutation.random(n, rng)
    fp = _random_pair(n, rng)
    gs, gt = wigner.gamma(s), wigner.gamma(t)
    ok = wigner.gamma(s * t)(fp) == gs(gt(fp)) and gs(fp.perp()) == gs(fp).perp()
    return None if ok else {"s": list(s.image), "t": list(t.image)}


@check("wigner")
def induced_beta_matches_psi_star(n, rng):
    s = Permutation.random(n, rng)
    beta = wigner.induced_beta(wigner.gamma(s), audits=3, seed=rng.randrange(1 << 30))
    theta = random_regular(n, rng.choice(factlat.divisors(n)), rng)
    return None if beta(theta) == wigner.psi_star(s)(theta) else {"sigma": list(s.image), "theta": _pairs(theta)}


@check("wigner")
def transitive_move_hits_target(n, rng):
    a = _random_pair(n, rng)
    b = FactorPair(a.theta, partitions.apply_perm(_within_blocks(a.theta, rng), a.theta_prime))
    s = wigner.transitive_move(a, b)
    ok = wigner.gamma(s)(a) == b and all(a.theta.related(x, s(x)) for x in range(n))
    return None if ok else {"a": [_pairs(a.theta), _pairs(a.theta_prime)]}


@check("wigner", lambda n: n % 12 == 0)
def permutation_round_trip(n, rng):
    s = Permutation.random(n, rng)
    got, _ = wigner.extract_permutation(wigner.psi_star(s), verify_samples=200, seed=rng.randrange(1 << 30))
    return None if got == s else {"sigma": list(s.image), "recovered": list(got.image)}


# -- runner --------------------------------------------------------------------------------------

def _run_once(chk: Check, n: int, seed: int):
    try:
        return chk.run(n, random.Random(seed))
    except Exception as exc:  # an exception is a failure with its message as witness
        return {"error": type(exc).__name__, "message": str(exc)}


def _shrink(chk: Check, n: int, seed: int, witness):
    for m in range(1, n):
        if chk.applies(m):
            got = _run_once(chk, m, seed)
            if got is not None:
                return {"n": m, "seed": seed, "witness": got}
    return {"n": n, "seed": seed, "witness": witness}


def run_suite(suite: str, n: int, trials: int, seed: int) -> list[CheckResult]:
    """Run every check of a suite ("all" for every suite, "none" for no checks)."""
    if suite == "none":
        return []
    chosen = [c for c in CHECKS if suite == "all" or c.suite == suite]
    if not chosen and suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}")
    results = []
    for idx, chk in enumerate(chosen):
        if not chk.applies(n):
            results.append(CheckResult(chk.name, chk.suite, "skip", 0))
            continue
        master = random.Random(f"{seed}:{chk.name}")
        status, witness, done = "pass", None, 0
        for _ in range(trials):
            trial_seed = master.getrandbits(64)
            done += 1
            got = _run_once(chk, n, trial_seed)
            if got is not None:
                status, witness = "fail", _shrink(chk, n, trial_seed, got)
                break
        results.append(CheckResult(chk.name, chk.suite, status, done, witness))
    return results
