"""Polynomial vector fields near a fixed point (Poincare-Dulac setting).

A :class:`PolyVectorField` in ``N`` variables is stored as a sparse map
``(j, k) -> b`` meaning ``sum b z^k d/dz_j``.  Its order is the total
degree minus one, so the diagonal linear part has order 0 and the
perturbation is made of components of order at least 1.  Vector fields act
on :class:`Polynomial` functions as derivations; this is the ambient
associative representation used by mould contractions and by the flow
formula.
"""

from __future__ import annotations

from typing import Dict, Mapping, Sequence

from ..errors import NonDiagonalLinearPart, OrderViolation, RangeExceeded
from ..liecore import HomogeneousProblem, NormalFormResult, SparseElement, associative_contraction
from ..scalars import Scalar, FrequencyModel, as_scalar, auto_frequency_model

__all__ = ["PolyVectorField", "Polynomial", "pd_linear_part", "pd_decompose",
           "pd_problem_from_field", "pd_flow"]


def _unit(N: int, j: int) -> tuple:
    return tuple(1 if i == j else 0 for i in range(N))


class Polynomial(SparseElement):
    """Polynomial function ``sum c z^k``; keys are exponent tuples.

    Order is degree minus one, matching the shift of vector fields, so a
    coordinate function has order 0.
    """

    engine = "polynomial"

    def key_order(self, key) -> int:
        return sum(key) - 1

    def bracket(self, other):
        return self.zero()

    @classmethod
    def coordinate(cls, N: int, j: int) -> "Polynomial":
        return cls({_unit(N, j): 1}, N)

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        out: Dict[tuple, Scalar] = {}
        for a, x in self.terms.items():
            for b, y in other.terms.items():
                k = tuple(i + j for i, j in zip(a, b))
                out[k] = out[k] + x * y if k in out else x * y
        return self._new(out)


class PolyVectorField(SparseElement):
    """Polynomial vector field ``sum_{j,k} b_{j,k} z^k d/dz_j``.

    Parameters
    ----------
    terms : mapping
        ``(j, k) -> coefficient`` with ``0 <= j < N`` and ``k`` an exponent
        tuple of length ``N``.
    N : int
        Number of variables.
    """

    engine = "pd"

    def __init__(self, terms: Mapping | None = None, N: int = 1):
        super().__init__(terms, N)
        for j, k in self.terms:
            if not 0 <= j < N or len(k) != N:
                raise ValueError(f"malformed vector field term {(j, k)} for N={N}")
            if sum(k) == 0:
                raise OrderViolation("vector fields must not have constant terms")

    @property
    def N(self) -> int:
        return self.ctx

    def key_order(self, key) -> int:
        return sum(key[1]) - 1

    def bracket(self, other: "PolyVectorField") -> "PolyVectorField":
        """Commutator ``[X, Y] = X(Y) - Y(X)`` computed componentwise."""
        self._check(other)
        out: Dict[tuple, Scalar] = {}
        for (i, a), x in self.terms.items():
            for (j, b), y in other.terms.items():
                # X_i d_i Y_j contributes to component j
                if b[i]:
                    k = tuple(p + q - (1 if t == i else 0) for t, (p, q) in enumerate(zip(a, b)))
                    key = (j, k)
                    val = x * y * b[i]
                    out[key] = out[key] + val if key in out else val
                # - Y_j d_j X_i contributes to component i
                if a[j]:
                    k = tuple(p + q - (1 if t == j else 0) for t, (p, q) in enumerate(zip(a, b)))
                    key = (i, k)
                    val = -(x * y * a[j])
                    out[key] = out[key] + val if key in out else val
        return self._new(out)

    def apply(self, f: Polynomial) -> Polynomial:
        """Derivative of ``f`` along the field."""
        out: Dict[tuple, Scalar] = {}
        for (j, a), x in self.terms.items():
            for b, y in f.terms.items():
                if b[j]:
                    k = tuple(p + q - (1 if t == j else 0) for t, (p, q) in enumerate(zip(a, b)))
                    val = x * y * b[j]
                    out[k] = out[k] + val if k in out else val
        return Polynomial._from_terms(out, f.ctx)

    def ambient_act(self, obj):
        if isinstance(obj, Polynomial):
            return self.apply(obj)
        return self.bracket(obj)

    def degree_part(self, degree: int) -> "PolyVectorField":
        return self._new({k: v for k, v in self.terms.items() if sum(k[1]) == degree})


def pd_linear_part(spectrum: Sequence) -> PolyVectorField:
    """Diagonal linear field ``sum_j s_j z_j d/dz_j``."""
    N = len(spectrum)
    return PolyVectorField({(j, _unit(N, j)): as_scalar(s) for j, s in enumerate(spectrum)}, N)


def _mode(j: int, k: tuple) -> tuple:
    return tuple(kk - (1 if t == j else 0) for t, kk in enumerate(k))


def pd_decompose(omega, B: PolyVectorField, m: int, q=None) -> HomogeneousProblem:
    """Eigen-decomposition of ``B`` under the diagonal linear part.

    Parameters
    ----------
    omega : sequence of scalars or FrequencyModel or None
        Diagonal entries of the linear part.  With a FrequencyModel (or a
        quotient matrix ``q``), the spectrum is ``i q^T Omega`` and letters
        are lattice modes ``k - e_j``; otherwise letters are the eigenvalues
        ``<k, omega> - omega_j`` themselves.
    B : PolyVectorField
        Perturbation; every term must have degree at least 2.
    m : int
        Truncation order.
    q : integer matrix, optional
        Quotient matrix for an automatically sized FrequencyModel.
    """
    N = B.N
    for _, k in B.terms:
        if sum(k) < 2:
            raise OrderViolation("perturbation terms must have degree at least 2")
    groups: Dict = {}
    model = None
    if q is not None or isinstance(omega, FrequencyModel):
        modes = {_mode(j, k) for j, k in B.terms}
        if isinstance(omega, FrequencyModel):
            model = omega
            model.check_words(modes, max(m - 1, 1))
        else:
            model = auto_frequency_model(q, modes, max(m - 1, 1))
        spectrum = [Scalar(0, f) for f in model.effective_frequencies()]
        for (j, k), v in B.terms.items():
            groups.setdefault(_mode(j, k), {})[(j, k)] = v
        lam = {n: sum((spectrum[t] * n[t] for t in range(N)), Scalar(0)) for n in groups}
    else:
        spectrum = [as_scalar(w) for w in omega]
        if len(spectrum) != N:
            raise ValueError("spectrum length does not match the number of variables")
        for (j, k), v in B.terms.items():
            ev = sum((spectrum[t] * k[t] for t in range(N)), Scalar(0)) - spectrum[j]
            groups.setdefault(ev, {})[(j, k)] = v
        lam = {ev: ev for ev in groups}
    X0 = pd_linear_part(spectrum)
    comps = {n: PolyVectorField(t, N) for n, t in groups.items()}
    return HomogeneousProblem.build(X0, comps, lam, m, model=model,
                                    metadata={"spectrum": [str(s) for s in spectrum]})


def pd_problem_from_field(X: PolyVectorField, m: int) -> HomogeneousProblem:
    """Split a full field into diagonal linear part and perturbation."""
    N = X.N
    lin = {k: v for k, v in X.terms.items() if sum(k[1]) == 1}
    for (j, k) in lin:
        if k != _unit(N, j):
            raise NonDiagonalLinearPart(f"linear term z^{k} d/dz_{j} is off-diagonal")
    spectrum = [lin.get((j, _unit(N, j)), Scalar(0)) for j in range(N)]
    B = X._new({k: v for k, v in X.terms.items() if sum(k[1]) != 1})
    return pd_decompose(spectrum, B, m)


def pd_flow(problem: HomogeneousProblem, result: NormalFormResult, m: int | None = None) -> list:
    """Components of the time-one flow of ``Y_m`` through the mould ``S``.

    ``Phi_j = sum_w S^w B_{n_r} ... B_{n_1} z_j``, truncated at degree ``m``.
    """
    m = problem.m if m is None else m
    N = problem.X0.N
    return [associative_contraction(problem, result.S, Polynomial.coordinate(N, j), m)
            for j in range(N)]
