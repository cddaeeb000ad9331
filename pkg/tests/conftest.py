import random

import pytest

from mouldnf.moulds import Mould, mould_bracket, resonant_part
from mouldnf.scalars import Scalar


def rand_scalar(rng: random.Random, complex_ok: bool = True, lo: int = -5, hi: int = 5) -> Scalar:
    re = Scalar(rng.randint(lo, hi)) / rng.randint(1, 4)
    if complex_ok and rng.random() < 0.5:
        return re + Scalar(0, rng.randint(lo, hi)) / rng.randint(1, 4)
    return re


def letter_mould(alphabet, L, a, c=1):
    return Mould(alphabet, L, {(a,): c})


def random_alternal(rng: random.Random, alphabet, L: int, terms: int = 6, complex_ok=True) -> Mould:
    """Random combination of iterated brackets of single-letter moulds."""
    acc = Mould.zero(alphabet, L)
    for _ in range(terms):
        r = rng.randint(1, max(1, L))
        M = letter_mould(alphabet, L, rng.choice(alphabet), rand_scalar(rng, complex_ok))
        for _ in range(r - 1):
            M = mould_bracket(letter_mould(alphabet, L, rng.choice(alphabet)), M)
        acc = acc + M
    return acc


def random_mould(rng: random.Random, alphabet, L: int, density: float = 0.4,
                 const=None, complex_ok=True) -> Mould:
    import itertools
    entries = {}
    for r in range(0, L + 1):
        for w in itertools.product(alphabet, repeat=r):
            if rng.random() < density:
                entries[w] = rand_scalar(rng, complex_ok)
    if const is not None:
        entries[()] = const
    return Mould(alphabet, L, entries)


def random_resonant_alternal(rng, alphabet, L, lam, terms=8):
    return resonant_part(random_alternal(rng, alphabet, L, terms), lam)


@pytest.fixture
def rng():
    return random.Random(20240601)
