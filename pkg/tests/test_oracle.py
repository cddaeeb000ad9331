import itertools
import random
from fractions import Fraction
from math import comb

import pytest

from mouldnf import oracle
from mouldnf.engines.hamiltonian import HamContext, PolyHamiltonian, birkhoff_decompose
from mouldnf.engines.quantum import MatrixOperator, QuantumContext, quantum_decompose
from mouldnf.errors import DegenerateSpectrum, ResonantAmbiguity, TooLong
from mouldnf.liecore import exp_ad, lie_comould, normal_form
from mouldnf.moulds import shuffle_coefficient
from mouldnf.scalars import Scalar

import engine_cases


def test_shuffle_values_and_limit():
    assert oracle.shuffle_by_permutations("nmp", "mq", "nmqpm") == 0
    assert oracle.shuffle_by_permutations("nmp", "mq", "nmmqp") == 2
    assert oracle.shuffle_by_permutations("nmp", "mq", "mnqmp") == 1
    with pytest.raises(TooLong):
        oracle.shuffle_by_permutations("abcde", "abcd", "abcdeabcd")


def test_shuffle_symmetry_and_total():
    rng = random.Random(0)
    for _ in range(15):
        ra, rb = rng.randint(0, 3), rng.randint(0, 3)
        a = "".join(rng.choice("xyz") for _ in range(ra))
        b = "".join(rng.choice("xyz") for _ in range(rb))
        total = 0
        for n in itertools.product("xyz", repeat=ra + rb):
            c = oracle.shuffle_by_permutations(a, b, n)
            assert c == oracle.shuffle_by_permutations(b, a, n) == shuffle_coefficient(a, b, n)
            total += c
        assert total == comb(ra + rb, ra)


def test_direct_conjugacy_agrees_with_exp_ad():
    problem, *_ = engine_cases.build("birkhoff", 3)
    Y = normal_form(problem).Y
    X = problem.X0 + problem.perturbation
    assert oracle.direct_conjugacy(problem, Y) == exp_ad(Y, X, problem.m)
    assert oracle.direct_conjugacy(problem, Y.zero()) == X.truncate(problem.m)


def test_lie_comould_from_associative_words():
    problem, *_ = engine_cases.build("quantum", 1)
    letters = problem.letters
    for r in (1, 2, 3):
        for w in itertools.product(letters, repeat=r):
            expanded = oracle.lie_from_associative(problem.components, w, oracle.matrix_product)
            assert expanded.truncate(problem.m) == lie_comould(problem, w)


def test_deprit_trivial_and_cubic():
    ctx = HamContext(1, grading="eps")
    zero = PolyHamiltonian({}, ctx)
    assert oracle.deprit_birkhoff([1], zero, 3).normal_form.is_zero()
    B = PolyHamiltonian.monomial(ctx, (3,), (0,), eps=1)
    ref = oracle.deprit_birkhoff([1], B, 3)
    Z = normal_form(birkhoff_decompose([1], B, 3)).Z
    assert ref.normal_form == Z


def test_deprit_quartic_first_order_average():
    ctx = HamContext(1, grading="eps")
    B = PolyHamiltonian.monomial(ctx, (4,), (0,), eps=1)
    ref = oracle.deprit_birkhoff([1], B, 2)
    mode0 = birkhoff_decompose([1], B, 2).components[(0,)]
    assert ref.normal_form == mode0


def test_deprit_flags_resonance():
    ctx = HamContext(2, grading="eps")
    B = PolyHamiltonian({(1, 0, (2, 1), (0, 0)): 1, (1, 0, (0, 1), (2, 0)): Fraction(1, 2)}, ctx)
    with pytest.raises(ResonantAmbiguity):
        oracle.deprit_birkhoff([1, 2], B, 3)
    assert oracle.deprit_birkhoff([1, 2], B, 3, strict=False).ambiguous
    with pytest.raises(TooLong):
        oracle.deprit_birkhoff([1, 2], B, 5)


def test_rayleigh_schrodinger_cases():
    ctx = QuantumContext(3, 1)
    diag = MatrixOperator({(1, 0, 0): 2, (1, 1, 1): -1}, ctx)
    assert [row[0] for row in oracle.rayleigh_schrodinger([0, 1, 2], diag, 2)] == [2, -1, 0]
    beta = Scalar(1, 2)
    pair = MatrixOperator({(1, 0, 1): beta, (1, 1, 0): beta.conjugate()},
                          QuantumContext(2, 1))
    second = [row[1] for row in oracle.rayleigh_schrodinger([0, 3], pair, 3)]
    assert second == [Scalar(-5) / 3, Scalar(5) / 3]
    with pytest.raises(DegenerateSpectrum):
        oracle.rayleigh_schrodinger([0, 0, 1], diag, 3)


def test_rayleigh_schrodinger_matches_normal_form():
    rng = random.Random(21)
    ctx = QuantumContext(3, 1)
    terms = {}
    for e in (1, 2):
        for r in range(3):
            for c in range(3):
                terms[(e, r, c)] = Scalar(rng.randint(-2, 2), rng.randint(-1, 1))
    B = MatrixOperator(terms, ctx)
    energies = [0, 1, 3]
    Z = normal_form(quantum_decompose(energies, B, 4)).Z
    corr = oracle.rayleigh_schrodinger(energies, B, 4)
    for k in range(3):
        assert [Z.terms.get((e, k, k), Scalar(0)) for e in (1, 2, 3)] == corr[k]


def test_deprit_two_degrees_nonresonant():
    ctx = HamContext(2, grading="eps")
    B = PolyHamiltonian({(1, 0, (3, 0), (0, 0)): 1, (1, 0, (1, 0), (0, 2)): 2,
                         (2, 0, (0, 2), (2, 0)): -1}, ctx)
    freqs = [1, 13]
    ref = oracle.deprit_birkhoff(freqs, B, 4)
    Z = normal_form(birkhoff_decompose(freqs, B, 4)).Z
    assert ref.normal_form == Z
