import random

import pytest
from hypothesis import settings, strategies as st

from polyimage.coeffs import QQ
from polyimage.starpoly import StarPoly, all_words
from polyimage.triangular import TriMatrix, positions

settings.register_profile("polyimage", deadline=None)
settings.load_profile("polyimage")


def random_poly(rng: random.Random, m: int, l: int, field=QQ, degrees=None, density=0.5, lo=-2, hi=2):
    coeffs = {}
    for w in all_words(m):
        if rng.random() < density:
            c = rng.randint(lo, hi)
            if c:
                coeffs[w] = c
    return StarPoly(m, l, coeffs, field, degrees)


def random_tri(rng: random.Random, n: int, field=QQ, lo=-3, hi=3):
    return TriMatrix(n, field, [field(rng.randint(lo, hi)) for _ in positions(n)])


@st.composite
def star_polys(draw, max_m=4, field=QQ):
    m = draw(st.integers(1, max_m))
    l = draw(st.integers(0, m))
    words = all_words(m)
    cs = draw(st.lists(st.integers(-2, 2), min_size=len(words), max_size=len(words)))
    return StarPoly(m, l, {w: c for w, c in zip(words, cs) if c}, field)


@pytest.fixture
def rng():
    return random.Random(20261019)
