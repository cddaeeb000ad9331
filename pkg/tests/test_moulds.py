import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mouldnf import oracle
from mouldnf.errors import AlphabetMismatch, BadConstantTerm, NotInvertible, UnknownLetter
from mouldnf.moulds import (Mould, delta_coproduct, is_alternal, is_symmetral, mould_bracket,
                            mould_exp, mould_inverse, mould_log, mould_mul, nabla, nabla_length,
                            pullback, resonant_part, restrict_letters, shuffle_coefficient,
                            shuffle_product, truncate_below, words_up_to)
from mouldnf.scalars import ONE, ZERO, Scalar

from conftest import random_alternal, random_mould

AB = ("a", "b")


def test_product_on_two_letter_word():
    I = Mould.letters(AB, 3)
    assert (I * I)[("a", "b")] == ONE
    assert (I * I)[("a",)] == ZERO


def test_inverse_of_one_plus_letters():
    for L in range(1, 6):
        M = Mould.unit(AB, L) + Mould.letters(AB, L)
        inv = mould_inverse(M)
        for w in words_up_to(AB, L):
            assert inv[w] == Scalar((-1) ** len(w))
        assert mould_mul(M, inv) == Mould.unit(AB, L)
        assert mould_mul(inv, M) == Mould.unit(AB, L)


def test_not_invertible():
    with pytest.raises(NotInvertible):
        mould_inverse(Mould.letters(AB, 3))


def test_exp_of_letters():
    E = mould_exp(Mould.letters(AB, 4))
    fact = [1, 1, 2, 6, 24]
    for w in words_up_to(AB, 4):
        assert E[w] == ONE / fact[len(w)]
    assert is_symmetral(E)[0]


def test_exp_rejects_constant_term():
    with pytest.raises(BadConstantTerm):
        mould_exp(Mould.unit(AB, 2))
    with pytest.raises(BadConstantTerm):
        mould_log(Mould.letters(AB, 2))


def test_alphabet_mismatch():
    with pytest.raises(AlphabetMismatch):
        Mould.letters(AB, 2) + Mould.letters(("a",), 2)
    # differing lengths are allowed; the product is known to the shorter one
    assert (Mould.letters(AB, 2) * Mould.letters(AB, 3)).max_len == 2


def test_unknown_letter():
    with pytest.raises(UnknownLetter):
        Mould(AB, 2, {("c",): 1})


def test_non_symmetral_example():
    S = Mould(AB, 2, {(): 1, ("a", "b"): 1})
    ok, pair = is_symmetral(S)
    assert not ok
    assert pair == (("a",), ("b",))


def test_violating_pair_for_non_alternal():
    M = Mould(AB, 2, {("a",): 1, ("a", "b"): 1})
    ok, pair = is_alternal(M)
    assert not ok and pair == (("a",), ("b",))


def test_shuffle_coefficients():
    assert shuffle_coefficient("a", "b", "ab") == 1
    assert shuffle_coefficient("a", "a", "aa") == 2
    assert shuffle_coefficient("ab", "a", "aab") == 2
    assert shuffle_coefficient("ab", "c", "cab") == 1
    assert dict(shuffle_product(("a",), ("b",))) == {("a", "b"): 1, ("b", "a"): 1}


def test_shuffle_coefficient_matches_permutations():
    rng = random.Random(5)
    for _ in range(40):
        ra, rb = rng.randint(0, 3), rng.randint(0, 3)
        a = tuple(rng.choice("xy") for _ in range(ra))
        b = tuple(rng.choice("xy") for _ in range(rb))
        for n in itertools.product("xy", repeat=ra + rb):
            assert shuffle_coefficient(a, b, n) == oracle.shuffle_by_permutations(a, b, n)


@pytest.mark.parametrize("seed", range(6))
def test_lie_algebra_of_alternal_moulds(seed):
    rng = random.Random(seed)
    alph = ("a", "b", "c")
    A = random_alternal(rng, alph, 4)
    B = random_alternal(rng, alph, 4)
    assert is_alternal(A)[0] and is_alternal(B)[0]
    assert is_alternal(mould_bracket(A, B))[0]
    E = mould_exp(A)
    assert is_symmetral(E)[0]
    assert mould_log(E) == A
    assert is_symmetral(mould_mul(E, mould_exp(B)))[0]
    assert is_symmetral(mould_inverse(E))[0]


@pytest.mark.parametrize("seed", range(4))
def test_dense_and_sparse_checks_agree_with_coproduct(seed):
    rng = random.Random(100 + seed)
    alph = ("a", "b")
    A = random_alternal(rng, alph, 5, terms=10)
    assert oracle.alternal_by_coproduct(A)
    broken = A + Mould(alph, 5, {("a", "b", "a"): 1})
    assert not is_alternal(broken)[0]
    assert not oracle.alternal_by_coproduct(broken)
    S = mould_exp(A)
    assert oracle.symmetral_by_coproduct(S)
    assert not oracle.symmetral_by_coproduct(S + Mould(alph, 5, {("b", "b"): 1}))


def test_coproduct_of_product_is_product_of_coproducts():
    rng = random.Random(9)
    alph = ("a", "b")
    M = random_mould(rng, alph, 4, density=0.5)
    N = random_mould(rng, alph, 4, density=0.5)
    lhs = delta_coproduct(mould_mul(M, N))
    full = {k: v for k, v in oracle.dimould_product(delta_coproduct(M), delta_coproduct(N)).items()
            if len(k[0]) + len(k[1]) <= 4}
    assert lhs == {k: v for k, v in full.items() if v}


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000))
def test_associativity_and_derivations(seed):
    rng = random.Random(seed)
    alph = ("a", "b")
    M, N, P = (random_mould(rng, alph, 3, density=0.5) for _ in range(3))
    assert mould_mul(mould_mul(M, N), P) == mould_mul(M, mould_mul(N, P))
    phi = {"a": Scalar(2), "b": Scalar(-3, 1)}
    # nabla is a derivation of the product
    assert nabla(mould_mul(M, N), phi) == mould_mul(nabla(M, phi), N) + mould_mul(M, nabla(N, phi))
    assert nabla_length(mould_mul(M, N)) == (mould_mul(nabla_length(M), N)
                                           + mould_mul(M, nabla_length(N)))


def test_pullback_is_a_morphism():
    rng = random.Random(11)
    small = ("a", "b")
    big = ("x", "y", "z")
    phi = {"x": "a", "y": "a", "z": "b"}
    M = random_mould(rng, small, 3, density=0.6)
    N = random_mould(rng, small, 3, density=0.6)
    assert pullback(mould_mul(M, N), phi, big) == mould_mul(pullback(M, phi, big), pullback(N, phi, big))
    A = random_alternal(rng, small, 3)
    assert is_alternal(pullback(A, phi, big))[0]


def test_resonant_truncate_restrict():
    lam = {"a": Scalar(1), "b": Scalar(-1)}
    M = Mould(AB, 3, {("a",): 1, ("a", "b"): 2, ("b", "a", "a"): 3})
    assert resonant_part(M, lam) == Mould(AB, 3, {("a", "b"): 2})
    assert truncate_below(M, 2) == Mould(AB, 3, {("a",): 1})
    assert restrict_letters(M, ["a"]).entries == {("a",): ONE}


def test_json_round_trip_with_named_and_vector_letters():
    M = Mould(AB, 3, {("a", "b"): Scalar(1, 2), (): 1})
    assert Mould.from_json(M.to_json()) == M
    V = Mould([(1, 0), (0, -1)], 2, {((1, 0), (0, -1)): Scalar(Fraction(-1, 3), 7)})
    assert Mould.from_json(V.to_json()) == V
