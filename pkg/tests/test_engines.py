import itertools
import random
from fractions import Fraction

import pytest

from mouldnf import oracle
from mouldnf.engines.averaging import (TrigContext, TrigPolyField, TrigPolyHamiltonian,
                                       averaging_decompose, cosine)
from mouldnf.engines.hamiltonian import (HamContext, PolyHamiltonian, birkhoff_decompose,
                                         poisson_bracket, to_xy, to_zw)
from mouldnf.engines.moyal import (MoyalSymbol, moyal_bracket, semiclassical_compare, sigma0,
                                   star_product)
from mouldnf.engines.quantum import (MatrixOperator, QuantumContext, conjugate_by,
                                     diagonal_operator, is_block_diagonal, quantum_decompose,
                                     unitary)
from mouldnf.engines.vectorfields import (Polynomial, PolyVectorField, pd_decompose, pd_flow,
                                          pd_problem_from_field)
from mouldnf.errors import (NonDiagonalLinearPart, NonDiagonalX0, OrderViolation,
                            RealnessViolation)
from mouldnf.liecore import normal_form
from mouldnf.scalars import I, ONE, Scalar, build_frequency_model

import engine_cases

# -- structural invariants in every engine ---------------------------------


@pytest.mark.parametrize("engine", engine_cases.ENGINES)
@pytest.mark.parametrize("seed", range(2))
def test_structural_invariants(engine, seed):
    problem, _, obj, rng = engine_cases.build(engine, seed)
    checks = engine_cases.structural_checks(problem, obj, rng)
    assert all(checks.values()), checks


@pytest.mark.parametrize("engine", engine_cases.ENGINES)
def test_normal_form_verifies(engine):
    problem, *_ = engine_cases.build(engine, 7)
    result = normal_form(problem)
    assert result.report.ok
    assert oracle.direct_conjugacy(problem, result.Y) == (problem.X0 + result.Z).truncate(problem.m)


# -- Poincare-Dulac ---------------------------------------------------------


def test_pd_modes():
    B = PolyVectorField({(0, (0, 2)): 1, (0, (0, 3)): 1}, 2)
    assert set(pd_decompose((5, 2), B, 4).letters) == {Scalar(-1), Scalar(1)}
    single = pd_decompose((1, 1), PolyVectorField({(0, (1, 1)): 1}, 2), 4)
    assert single.letters == (Scalar(1),)


def test_pd_nonresonant_surrogate_linearizes():
    model = build_frequency_model([[1, 0], [0, 1]], 8)
    B = PolyVectorField({(0, (0, 2)): 1, (1, (1, 1)): 2, (0, (2, 1)): -1, (1, (2, 0)): 3}, 2)
    problem = pd_decompose(model, B, 5)
    result = normal_form(problem)
    assert result.report.ok
    assert result.Z.is_zero()


def test_pd_flow_matches_exponential():
    B = PolyVectorField({(0, (0, 2)): 1, (1, (1, 1)): 1, (0, (2, 1)): 1}, 2)
    problem = pd_decompose((2, 1), B, 4)
    result = normal_form(problem)
    flow = pd_flow(problem, result)
    for j, phi in enumerate(flow):
        f = Polynomial.coordinate(2, j)
        acc, term = f, f
        for k in range(1, 4):
            term = result.Y.apply(term).truncate(4).scale(Scalar(1) / k)
            acc = acc + term
        assert phi == acc.truncate(4)


def test_pd_full_field_split():
    X = PolyVectorField({(0, (1, 0)): 2, (1, (0, 1)): 1, (0, (0, 2)): 1}, 2)
    assert pd_problem_from_field(X, 3).letters == (Scalar(0),)
    with pytest.raises(NonDiagonalLinearPart):
        pd_problem_from_field(PolyVectorField({(0, (0, 1)): 1}, 2), 3)
    with pytest.raises(OrderViolation):
        pd_decompose((1, 1), PolyVectorField({(0, (1, 0)): 1}, 2), 3)


# -- Birkhoff -----------------------------------------------------------------


def test_birkhoff_cubic_modes_and_coordinates():
    ctx = HamContext(1)
    B = PolyHamiltonian.monomial(ctx, (3,), (0,))
    problem = birkhoff_decompose([1], B, 4, real=True)
    assert set(problem.letters) == {(3,), (1,), (-1,), (-3,)}
    assert to_xy(to_zw(B)) == B
    for n, Bn in problem.components.items():
        assert Bn.conj() == problem.components[tuple(-a for a in n)]
    zw = HamContext(1, coords="zw")
    action = PolyHamiltonian.monomial(zw, (2,), (2,))
    assert birkhoff_decompose([1], action, 4).letters == ((0,),)


def test_birkhoff_canonical_coordinates():
    ctx = HamContext(2, coords="zw", scales=(2, 3))
    z = PolyHamiltonian.monomial(ctx, (1, 0), (0, 0))
    w = PolyHamiltonian.monomial(ctx, (0, 0), (1, 0))
    one = PolyHamiltonian.monomial(ctx, (0, 0), (0, 0))
    assert poisson_bracket(z, w) == one
    x = to_xy(z)
    assert to_zw(x) == z
    assert to_xy(z).conj() == to_xy(z.conj())


def test_birkhoff_eps_cubic_value():
    ctx = HamContext(1, grading="eps")
    B = PolyHamiltonian.monomial(ctx, (3,), (0,), eps=1)
    result = normal_form(birkhoff_decompose([1], B, 3, real=True))
    assert result.report.ok
    expected = PolyHamiltonian({(2, 0, (4,), (0,)): Fraction(-15, 16), (2, 0, (0,), (4,)): Fraction(-15, 16),
                                (2, 0, (2,), (2,)): Fraction(-15, 8)}, ctx)
    assert to_xy(result.Z) == expected
    assert result.Z.is_real() and result.Y.is_real()


def test_birkhoff_realness_enforced():
    ctx = HamContext(1)
    B = PolyHamiltonian({(0, 0, (3,), (0,)): I}, ctx)
    with pytest.raises(RealnessViolation):
        birkhoff_decompose([1], B, 4, real=True)
    with pytest.raises(OrderViolation):
        birkhoff_decompose([1], PolyHamiltonian.monomial(ctx, (2,), (0,)), 4)


def test_birkhoff_resonant_pair_is_real():
    ctx = HamContext(2)
    B = PolyHamiltonian({(0, 0, (2, 1), (0, 0)): 1, (0, 0, (0, 1), (2, 0)): 1,
                         (0, 0, (1, 0), (1, 1)): Fraction(2, 3)}, ctx)
    result = normal_form(birkhoff_decompose([1, 2], B, 4, real=True))
    assert result.report.ok
    assert result.Z.is_real() and result.Y.is_real()
    assert any(tuple(a - b for a, b in zip(k, l)) != (0, 0) for (_, _, k, l) in result.Z.terms)


# -- averaging ----------------------------------------------------------------


def test_averaging_cosine():
    ctx = TrigContext(1, 1)
    H = TrigPolyHamiltonian(cosine((1,), ctx, eps=1), ctx)
    problem = averaging_decompose([1], H, 2)
    assert set(problem.letters) == {(1,), (-1,)}
    result = normal_form(problem)
    assert result.Z.is_zero()


def test_averaging_constant_in_angle():
    ctx = TrigContext(1, 1)
    X = TrigPolyField({(1, (0,), (1,), 1): 1, (0, (0,), (2,), 2): 3}, ctx)
    result = normal_form(averaging_decompose([1], X, 4))
    assert result.Z == X and result.Y.is_zero()


def test_averaging_lattice_modes():
    ctx = TrigContext(2, 1)
    terms = {}
    for n in [(1, 0), (1, 1), (0, 1), (2, -1)]:
        for (mode, p, e), c in cosine(n, ctx, eps=1).items():
            terms[(2, mode, p, e)] = c
            terms[(0, mode, (1,), e)] = c
    X = TrigPolyField(terms, ctx)
    problem = averaging_decompose(None, X, 4, q=[[1, -1]])
    result = normal_form(problem)
    assert result.report.ok
    assert not result.Z.is_zero()
    assert all(n[0] == n[1] for (_, n, _, _) in result.Z.terms)
    assert result.Z.is_real()


# -- quantum ------------------------------------------------------------------


def test_quantum_two_level():
    ctx = QuantumContext(2, 1)
    B = MatrixOperator({(1, 0, 1): 1, (1, 1, 0): 1}, ctx)
    problem = quantum_decompose([0, 1], B, 3)
    assert set(problem.letters) == {Scalar(0, -1), Scalar(0, 1)}
    result = normal_form(problem)
    assert result.Z == MatrixOperator({(2, 0, 0): -1, (2, 1, 1): 1}, ctx)
    assert [row[1] for row in oracle.rayleigh_schrodinger([0, 1], B, 3)] == [-1, 1]


def test_quantum_diagonal_perturbation():
    ctx = QuantumContext(3, 2)
    B = MatrixOperator({(1, 0, 0): 1, (2, 2, 2): Scalar(1, 1)}, ctx)
    result = normal_form(quantum_decompose([0, 1, 2], B, 4))
    assert result.Z == B
    assert unitary(result.Y, 4) == MatrixOperator.identity(ctx)


def test_quantum_unitarity_and_conjugation():
    rng = random.Random(4)
    ctx = QuantumContext(3, 1)
    terms = {}
    for e in (1, 2):
        for r in range(3):
            for c in range(r, 3):
                v = Scalar(rng.randint(-2, 2), rng.randint(-2, 2) if r != c else 0)
                terms[(e, r, c)] = v
                terms[(e, c, r)] = v.conjugate()
    B = MatrixOperator(terms, ctx)
    energies = [0, 0, 1]
    result = normal_form(quantum_decompose(energies, B, 4))
    U = unitary(result.Y, 4)
    assert U.matmul(U.conj(), 4) == MatrixOperator.identity(ctx)
    assert is_block_diagonal(result.Z, energies)
    X = (diagonal_operator(energies, ctx) + B)
    assert conjugate_by(result.Y, X, 4) == (diagonal_operator(energies, ctx) + result.Z).truncate(4)
    with pytest.raises(NonDiagonalX0):
        quantum_decompose(MatrixOperator({(0, 0, 1): 1}, ctx), B, 3)


# -- Moyal ----------------------------------------------------------------------


def _sym(terms, grading="degree"):
    return MoyalSymbol(terms, HamContext(1, grading=grading))


def test_moyal_basic_values():
    x = _sym({(0, 0, (1,), (0,)): 1})
    xi = _sym({(0, 0, (0,), (1,)): 1})
    assert moyal_bracket(x, xi) == _sym({(0, 0, (0,), (0,)): 1})
    x3 = _sym({(0, 0, (3,), (0,)): 1})
    xi3 = _sym({(0, 0, (0,), (3,)): 1})
    assert moyal_bracket(x3, xi3) == _sym({(0, 0, (2,), (2,)): 9, (0, 2, (0,), (0,)): -6})


def test_moyal_quadratic_is_poisson():
    s0 = sigma0([3], grading="degree")
    rng = random.Random(1)
    V = engine_cases.random_real_xy(rng, 1, (3, 4, 5), s0.ctx, cls=MoyalSymbol)
    assert moyal_bracket(s0, V) == poisson_bracket(s0, V)


def test_star_product_associative_and_ambient_identity():
    rng = random.Random(8)
    ctx = HamContext(1, grading="eps")
    f, g, h = (engine_cases.random_real_xy(rng, 1, (1, 2, 3), ctx, cls=MoyalSymbol, eps=1)
               for _ in range(3))
    assert star_product(star_product(f, g), h) == star_product(f, star_product(g, h))
    lhs = f.ambient_act(g.ambient_act(h)) - g.ambient_act(f.ambient_act(h))
    assert lhs == moyal_bracket(f, g).ambient_act(h)


@pytest.mark.parametrize("power", [3, 4])
def test_semiclassical_limit(power):
    ctx = sigma0([1]).ctx
    B = MoyalSymbol.monomial(ctx, (power,), (0,), eps=1)
    report = semiclassical_compare([1], B, 3)
    assert report.equal_at_hbar_zero and report.corrections_even and report.same_mould


def test_semiclassical_resonant_mode_and_mismatch():
    ctx = sigma0([1]).ctx
    action = to_xy(MoyalSymbol.monomial(ctx.replace(coords="zw"), (1,), (1,), eps=1))
    report = semiclassical_compare([1], action, 3)
    assert report.Z_quantum == action.truncate(3)
    assert report.ok
    B = MoyalSymbol.monomial(ctx, (3,), (0,), eps=1)
    assert not semiclassical_compare([1], B, 3, classical_omega=[2]).equal_at_hbar_zero


def test_conjugation_squares_to_identity():
    rng = random.Random(12)
    for d, coords in itertools.product((1, 2), ("xy", "zw")):
        ctx = HamContext(d, coords=coords, scales=tuple(range(2, 2 + d)))
        f = PolyHamiltonian({(0, 0, tuple(rng.randint(0, 2) for _ in range(d)),
                              tuple(rng.randint(0, 2) for _ in range(d))): Scalar(1, 2)}, ctx)
        assert f.conj().conj() == f
    assert ONE
