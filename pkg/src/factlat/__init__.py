"""Factor-pair posets of finite sets, regular equivalence relations and
reconstruction of point permutations from induced automorphisms."""

from . import eqstar, factlat, partitions, propcheck, serialize, wigner
from .errors import FactlatError
from .factlat import (
    FactorPair,
    FactPoset,
    IntervalIso,
    boolean_octet,
    check_omp_axioms,
    enumerate_fact,
    fact_cardinality,
    leq,
)
from .partitions import EquivRel, Permutation, from_blocks
from .wigner import extract_permutation, psi_star

__version__ = "0.1.0"

__all__ = [
    "EquivRel",
    "FactPoset",
    "FactlatError",
    "FactorPair",
    "IntervalIso",
    "Permutation",
    "boolean_octet",
    "check_omp_axioms",
    "enumerate_fact",
    "eqstar",
    "extract_permutation",
    "fact_cardinality",
    "factlat",
    "from_blocks",
    "leq",
    "partitions",
    "propcheck",
    "psi_star",
    "serialize",
    "wigner",
]
