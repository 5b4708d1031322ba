"""Equivalence relations on a finite ground set {0, ..., n-1}.

Relations are immutable values kept in canonical form: block ids are dense,
and block ``k`` is the block with the k-th smallest minimum element.  The
hot paths work on per-element bitmasks (Python ints), so meets, composites
and inclusion tests stay allocation-light.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .errors import (
    EmptySubset,
    GroundMismatch,
    MalformedPartition,
    NotPermuting,
)

__all__ = [
    "GroundSet",
    "EquivRel",
    "BinRel",
    "Permutation",
    "from_blocks",
    "from_labels",
    "delta",
    "nabla",
    "meet",
    "meet_all",
    "compose",
    "permutes",
    "join_permuting",
    "join_closure",
    "is_regular",
    "is_n_relation",
    "apply_perm",
    "restrict",
    "equal_block_partitions",
    "ground_size",
]


@dataclass(frozen=True)
class GroundSet:
    n: int

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 1:
            raise ValueError(f"ground set size must be a positive integer, got {self.n!r}")

    def __iter__(self):
        return iter(range(self.n))

    def __len__(self):
        return self.n


def ground_size(ground) -> int:
    """Accept a GroundSet, a plain int, or anything carrying ``n``."""
    if isinstance(ground, int):
        if ground < 1:
            raise ValueError(f"ground set size must be positive, got {ground}")
        return ground
    return ground.n


def _canonical_labels(labels: Sequence[int]) -> tuple[int, ...]:
    # Relabel by order of first occurrence, which is the order of block minima.
    remap: dict[int, int] = {}
    out = []
    for lab in labels:
        new = remap.get(lab)
        if new is None:
            new = remap[lab] = len(remap)
        out.append(new)
    return tuple(out)


class EquivRel:
    """A partition of {0..n-1} in canonical block form."""

    __slots__ = ("n", "block_of", "blocks", "_hash", "_rows", "_masks")

    def __init__(self, block_of: Sequence[int], *, _canonical: bool = False):
        labels = tuple(block_of) if _canonical else _canonical_labels(block_of)
        if not labels:
            raise MalformedPartition("ground set must be non-empty")
        self.n = len(labels)
        self.block_of = labels
        buckets: list[list[int]] = [[] for _ in range(max(labels) + 1)]
        for x, b in enumerate(labels):
            buckets[b].append(x)
        self.blocks = tuple(tuple(b) for b in buckets)
        self._hash = hash(labels)
        self._rows = None
        self._masks = None

    # -- views -----------------------------------------------------------
    @property
    def ground(self) -> GroundSet:
        return GroundSet(self.n)

    @property
    def block_count(self) -> int:
        return len(self.blocks)

    @property
    def block_sizes(self) -> tuple[int, ...]:
        return tuple(len(b) for b in self.blocks)

    @property
    def block_masks(self) -> tuple[int, ...]:
        if self._masks is None:
            masks = []
            for block in self.blocks:
                m = 0
                for x in block:
                    m |= 1 << x
                masks.append(m)
            self._masks = tuple(masks)
        return self._masks

    @property
    def rows(self) -> tuple[int, ...]:
        """rows[x] is the bitmask of the block containing x."""
        if self._rows is None:
            masks = self.block_masks
            self._rows = tuple(masks[b] for b in self.block_of)
        return self._rows

    def block_containing(self, x: int) -> tuple[int, ...]:
        return self.blocks[self.block_of[x]]

    def related(self, x: int, y: int) -> bool:
        return self.block_of[x] == self.block_of[y]

    def has_block(self, block: Iterable[int]) -> bool:
        block = sorted(block)
        return bool(block) and self.blocks[self.block_of[block[0]]] == tuple(block)

    def is_union_of_blocks(self, subset: Iterable[int]) -> bool:
        s = set(subset)
        return all(set(self.blocks[self.block_of[x]]) <= s for x in s)

    def issubset(self, other: "EquivRel") -> bool:
        """Inclusion of relations: every block of self lies inside a block of other."""
        _same_ground(self, other)
        ob = other.block_of
        for block in self.blocks:
            t = ob[block[0]]
            for x in block:
                if ob[x] != t:
                    return False
        return True

    __le__ = issubset

    def __ge__(self, other: "EquivRel") -> bool:
        return other.issubset(self)

    def __eq__(self, other) -> bool:
        return isinstance(other, EquivRel) and self.block_of == other.block_of

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        inner = ",".join("{" + ",".join(map(str, b)) + "}" for b in self.blocks)
        return f"EquivRel(n={self.n}, {inner})"

    def sort_key(self):
        return self.block_of

    def to_binrel(self) -> "BinRel":
        return BinRel(self.n, self.rows)


class BinRel:
    """A binary relation on {0..n-1}; rows[x] is the bitmask of the set {y : (x, y)}."""

    __slots__ = ("n", "rows")

    def __init__(self, n: int, rows: Sequence[int]):
        self.n = n
        self.rows = tuple(rows)
        if len(self.rows) != n:
            raise ValueError("one row per ground element is required")

    @classmethod
    def from_pairs(cls, n: int, pairs: Iterable[tuple[int, int]]) -> "BinRel":
        rows = [0] * n
        for x, y in pairs:
            if not (0 <= x < n and 0 <= y < n):
                raise ValueError(f"pair {(x, y)} outside the ground set")
            rows[x] |= 1 << y
        return cls(n, rows)

    def __contains__(self, pair) -> bool:
        x, y = pair
        return bool(self.rows[x] >> y & 1)

    def pairs(self) -> Iterator[tuple[int, int]]:
        for x, row in enumerate(self.rows):
            for y in range(self.n):
                if row >> y & 1:
                    yield (x, y)

    def __len__(self) -> int:
        return sum(bin(r).count("1") for r in self.rows)

    def __eq__(self, other) -> bool:
        if isinstance(other, EquivRel):
            other = other.to_binrel()
        return isinstance(other, BinRel) and self.n == other.n and self.rows == other.rows

    def __hash__(self) -> int:
        return hash((self.n, self.rows))

    def is_equivalence(self) -> bool:
        rows = self.rows
        for x, row in enumerate(rows):
            if not row >> x & 1:
                return False
            # In an equivalence every member of the row has exactly this row.
            r = row
            while r:
                low = r & -r
                if rows[low.bit_length() - 1] != row:
                    return False
                r ^= low
        return True

    def to_equivrel(self) -> EquivRel:
        if not self.is_equivalence():
            raise NotPermuting("relation is not an equivalence relation")
        ids: dict[int, int] = {}
        return EquivRel([ids.setdefault(r, len(ids)) for r in self.rows], _canonical=True)

    def __repr__(self) -> str:
        return f"BinRel(n={self.n}, pairs={len(self)})"


def _same_ground(a, b) -> None:
    if a.n != b.n:
        raise GroundMismatch(f"ground sizes differ: {a.n} vs {b.n}")


# -- construction --------------------------------------------------------

def from_blocks(ground, raw_blocks: Iterable[Iterable[int]]) -> EquivRel:
    n = ground_size(ground)
    labels = [-1] * n
    for b, block in enumerate(raw_blocks):
        block = list(block)
        if not block:
            raise MalformedPartition("empty block")
        for x in block:
            if not isinstance(x, int) or not 0 <= x < n:
                raise MalformedPartition(f"element {x!r} outside 0..{n - 1}")
            if labels[x] != -1:
                raise MalformedPartition(f"element {x} appears in more than one block")
            labels[x] = b
    missing = [x for x in range(n) if labels[x] == -1]
    if missing:
        raise MalformedPartition(f"elements {missing} are not covered")
    return EquivRel(labels)


def from_labels(labels: Sequence[int]) -> EquivRel:
    return EquivRel(labels)


def delta(ground) -> EquivRel:
    n = ground_size(ground)
    return EquivRel(range(n), _canonical=True)


def nabla(ground) -> EquivRel:
    n = ground_size(ground)
    return EquivRel([0] * n, _canonical=True)


# -- algebra -------------------------------------------------------------

def meet(a: EquivRel, b: EquivRel) -> EquivRel:
    _same_ground(a, b)
    bb = b.block_of
    return EquivRel([(la, bb[x]) for x, la in enumerate(a.block_of)])


def meet_all(rels: Iterable[EquivRel], ground=None) -> EquivRel:
    """Intersection of a family; the empty family gives the full relation."""
    result = None
    for r in rels:
        result = r if result is None else meet(result, r)
    if result is None:
        if ground is None:
            raise ValueError("ground is required for an empty family")
        return nabla(ground)
    return result


def compose(a: EquivRel, b: EquivRel) -> BinRel:
    """The relational product {(x, y) : x a z and z b y for some z}."""
    _same_ground(a, b)
    brows = b.rows
    rows = [0] * a.n
    for block in a.blocks:
        m = 0
        for z in block:
            m |= brows[z]
        for x in block:
            rows[x] = m
    return BinRel(a.n, rows)


def permutes(a: EquivRel, b: EquivRel) -> bool:
    return compose(a, b).rows == compose(b, a).rows


def join_permuting(a: EquivRel, b: EquivRel) -> EquivRel:
    ab = compose(a, b)
    if ab.rows != compose(b, a).rows:
        raise NotPermuting("the relations do not permute")
    return ab.to_equivrel()


def join_closure(rels: Iterable[EquivRel], ground=None) -> EquivRel:
    """Transitive closure of the union (the join in the partition lattice)."""
    rels = list(rels)
    if not rels:
        if ground is None:
            raise ValueError("ground is required for an empty family")
        return delta(ground)
    n = rels[0].n
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for r in rels:
        _same_ground(rels[0], r)
        for block in r.blocks:
            root = find(block[0])
            for x in block[1:]:
                other = find(x)
                if other != root:
                    parent[other] = root
    return EquivRel([find(x) for x in range(n)])


def is_regular(theta: EquivRel) -> int | None:
    sizes = set(theta.block_sizes)
    return sizes.pop() if len(sizes) == 1 else None


def is_n_relation(theta: EquivRel, n: int) -> bool:
    return is_regular(theta) == n


def restrict(theta: EquivRel, subset: Iterable[int]) -> EquivRel:
    """Intersect the blocks of theta with subset, re-indexed as 0..len(subset)-1."""
    elems = sorted(set(subset))
    if not elems:
        raise EmptySubset("cannot restrict to an empty subset")
    for x in elems:
        if not 0 <= x < theta.n:
            raise MalformedPartition(f"element {x} outside the ground set")
    return EquivRel([theta.block_of[x] for x in elems])


# -- permutations --------------------------------------------------------

class Permutation:
    """A bijection of {0..n-1}; ``image[x]`` is the image of x."""

    __slots__ = ("image", "_hash")

    def __init__(self, image: Sequence[int]):
        image = tuple(image)
        if sorted(image) != list(range(len(image))):
            raise ValueError("image is not a bijection of 0..n-1")
        self.image = image
        self._hash = hash(image)

    @property
    def n(self) -> int:
        return len(self.image)

    @classmethod
    def identity(cls, ground) -> "Permutation":
        return cls(range(ground_size(ground)))

    @classmethod
    def from_cycles(cls, ground, cycles: Iterable[Sequence[int]]) -> "Permutation":
        image = list(range(ground_size(ground)))
        for cyc in cycles:
            for i, x in enumerate(cyc):
                image[x] = cyc[(i + 1) % len(cyc)]
        return cls(image)

    @classmethod
    def random(cls, ground, rng: random.Random) -> "Permutation":
        image = list(range(ground_size(ground)))
        rng.shuffle(image)
        return cls(image)

    def __call__(self, x: int) -> int:
        return self.image[x]

    def compose(self, other: "Permutation") -> "Permutation":
        """(self o other)(x) = self(other(x))."""
        if self.n != other.n:
            raise GroundMismatch("permutations act on different ground sets")
        img = self.image
        return Permutation(img[y] for y in other.image)

    __mul__ = compose

    def inverse(self) -> "Permutation":
        inv = [0] * self.n
        for x, y in enumerate(self.image):
            inv[y] = x
        return Permutation(inv)

    def is_identity(self) -> bool:
        return all(x == y for x, y in enumerate(self.image))

    def cycles(self) -> list[tuple[int, ...]]:
        seen = [False] * self.n
        out = []
        for start in range(self.n):
            if seen[start]:
                continue
            cyc = []
            x = start
            while not seen[x]:
                seen[x] = True
                cyc.append(x)
                x = self.image[x]
            out.append(tuple(cyc))
        return out

    def apply_set(self, subset: Iterable[int]) -> frozenset:
        return frozenset(self.image[x] for x in subset)

    def __eq__(self, other) -> bool:
        return isinstance(other, Permutation) and self.image == other.image

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"Permutation({list(self.image)})"


def apply_perm(sigma: Permutation, theta: EquivRel) -> EquivRel:
    """The image relation {(sigma x, sigma y) : (x, y) in theta}."""
    if sigma.n != theta.n:
        raise GroundMismatch("permutation and relation act on different ground sets")
    labels = [0] * theta.n
    img = sigma.image
    for x, b in enumerate(theta.block_of):
        labels[img[x]] = b
    return EquivRel(labels)


# -- enumeration ---------------------------------------------------------

def equal_block_partitions(elements: Sequence[int] | int, size: int) -> Iterator[list[tuple[int, ...]]]:
    """All partitions of ``elements`` into blocks of ``size`` elements.

    Blocks come out sorted and ordered by minimum; partitions are generated in
    lexicographic order of that block list.  Nothing is yielded when ``size``
    does not divide the number of elements.
    """
    if isinstance(elements, int):
        elements = range(elements)
    elems = tuple(sorted(elements))
    if size < 1 or len(elems) % size:
        return
    if not elems:
        yield []
        return

    def rec(remaining: tuple[int, ...]):
        if not remaining:
            yield []
            return
        first, rest = remaining[0], remaining[1:]
        for others in itertools.combinations(rest, size - 1):
            block = (first,) + others
            chosen = set(others)
            left = tuple(x for x in rest if x not in chosen)
            for tail in rec(left):
                yield [block] + tail

    yield from rec(elems)
