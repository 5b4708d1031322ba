import random

import pytest
from hypothesis import settings
from hypothesis import strategies as st

from factlat.partitions import EquivRel, Permutation

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@st.composite
def relations(draw, n=None, min_n=1, max_n=9):
    size = draw(st.integers(min_n, max_n)) if n is None else n
    labels = draw(st.lists(st.integers(0, size - 1), min_size=size, max_size=size))
    return EquivRel(labels)


@st.composite
def relation_pairs(draw, min_n=1, max_n=9):
    size = draw(st.integers(min_n, max_n))
    return draw(relations(n=size)), draw(relations(n=size))


@st.composite
def permutations(draw, n):
    return Permutation(draw(st.permutations(range(n))))


@pytest.fixture
def rng():
    return random.Random(12345)
