"""Finite-dimensional quantum Birkhoff normal forms.

Operators are ``D x D`` matrices whose entries are polynomials in ``eps``.
The Lie bracket is ``[A, B]_q = (AB - BA) / (i hbar)`` for a fixed positive
rational ``hbar``.  With ``X0 = diag(E)`` the matrix unit ``|k><l|`` is an
eigenvector of ``[X0, .]_q`` with eigenvalue ``(E_k - E_l) / (i hbar)``.
The generator ``Y`` integrates to the operator ``U = exp(Y / (i hbar))``,
which conjugates ``X0 + B`` to ``X0 + Z``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Sequence

from ..errors import NonDiagonalX0, OrderViolation
from ..liecore import HomogeneousProblem, SparseElement
from ..scalars import I, ONE, Scalar, as_scalar

__all__ = ["QuantumContext", "MatrixOperator", "diagonal_operator", "quantum_decompose",
           "oscillator_energies", "unitary", "conjugate_by", "is_block_diagonal",
           "matrix_exp_series"]


@dataclass(frozen=True)
class QuantumContext:
    D: int
    hbar: Scalar

    def __post_init__(self):
        h = as_scalar(self.hbar)
        if not h.is_real() or h.re <= 0:
            raise ValueError("hbar must be a positive rational")
        object.__setattr__(self, "hbar", h)


def _add(out: dict, key, val):
    out[key] = out[key] + val if key in out else val


class MatrixOperator(SparseElement):
    """Sparse matrix ``sum c eps^e |row><col|``; keys ``(e, row, col)``."""

    engine = "quantum"

    def __init__(self, terms=None, ctx: QuantumContext | None = None):
        super().__init__(terms, ctx)
        for e, r, c in self.terms:
            if not (0 <= r < ctx.D and 0 <= c < ctx.D) or e < 0:
                raise ValueError(f"bad matrix entry index {(e, r, c)}")

    @classmethod
    def from_matrices(cls, matrices: Sequence, ctx: QuantumContext) -> "MatrixOperator":
        """Build from a list of dense matrices, one per eps power."""
        terms = {}
        for e, M in enumerate(matrices):
            for r, row in enumerate(M):
                for c, v in enumerate(row):
                    v = as_scalar(v)
                    if v:
                        terms[(e, r, c)] = v
        return cls(terms, ctx)

    @classmethod
    def identity(cls, ctx: QuantumContext) -> "MatrixOperator":
        return cls({(0, k, k): ONE for k in range(ctx.D)}, ctx)

    def to_matrices(self, m: int | None = None) -> List[List[List[Scalar]]]:
        top = max((e for e, _, _ in self.terms), default=-1) + 1 if m is None else m
        D = self.ctx.D
        mats = [[[Scalar(0)] * D for _ in range(D)] for _ in range(top)]
        for (e, r, c), v in self.terms.items():
            if e < top:
                mats[e][r][c] = v
        return mats

    def key_order(self, key) -> int:
        return key[0]

    def matmul(self, other: "MatrixOperator", m: int | None = None) -> "MatrixOperator":
        by_row: Dict[int, list] = {}
        for (e, r, c), v in other.terms.items():
            by_row.setdefault(r, []).append((e, c, v))
        out: Dict = {}
        for (e1, r, k), x in self.terms.items():
            for e2, c, y in by_row.get(k, ()):
                e = e1 + e2
                if m is None or e < m:
                    _add(out, (e, r, c), x * y)
        return self._new(out)

    def __matmul__(self, other):
        return self.matmul(other)

    def bracket(self, other: "MatrixOperator") -> "MatrixOperator":
        self._check(other)
        comm = self.matmul(other) - other.matmul(self)
        return comm.scale(ONE / (I * self.ctx.hbar))

    def ambient_act(self, obj):
        # T_A(M) = A M / (i hbar) satisfies [T_A, T_B] = T_[A,B]_q
        return self.matmul(obj).scale(ONE / (I * self.ctx.hbar))

    def conj(self) -> "MatrixOperator":
        """Conjugate transpose."""
        return self._new({(e, c, r): v.conjugate() for (e, r, c), v in self.terms.items()})

    def is_symmetric(self) -> bool:
        return self.conj() == self


def diagonal_operator(energies: Sequence, ctx: QuantumContext) -> MatrixOperator:
    return MatrixOperator({(0, k, k): as_scalar(E) for k, E in enumerate(energies)}, ctx)


def oscillator_energies(D: int, omega=1, hbar=1) -> list:
    """Harmonic oscillator levels ``hbar omega (k + 1/2)`` for ``k < D``."""
    w = as_scalar(omega) * as_scalar(hbar)
    return [w * (Scalar(2 * k + 1) / 2) for k in range(D)]


def _energies_of(X0) -> list:
    if not isinstance(X0, MatrixOperator):
        return [as_scalar(E) for E in X0]
    energies = [Scalar(0)] * X0.ctx.D
    for (e, r, c), v in X0.terms.items():
        if e != 0 or r != c:
            raise NonDiagonalX0(f"X0 has a non-diagonal or eps-dependent entry at {(e, r, c)}")
        energies[r] = v
    return energies


def quantum_decompose(X0, B: MatrixOperator, m: int) -> HomogeneousProblem:
    """Group the entries of ``B`` by energy difference.

    ``X0`` is either a diagonal :class:`MatrixOperator` or the list of its
    diagonal energies.  Letters are the eigenvalues ``(E_k - E_l) / (i hbar)``.
    """
    energies = _energies_of(X0)
    ctx = B.ctx
    if len(energies) != ctx.D:
        raise ValueError("energy list does not match the matrix dimension")
    X0 = diagonal_operator(energies, ctx)
    groups: Dict[Scalar, dict] = {}
    scale = ONE / (I * ctx.hbar)
    for (e, r, c), v in B.terms.items():
        if e < 1:
            raise OrderViolation("perturbation entries must have eps-order at least 1")
        lam = (energies[r] - energies[c]) * scale
        groups.setdefault(lam, {})[(e, r, c)] = v
    comps = {lam: MatrixOperator._from_terms(t, ctx) for lam, t in groups.items()}
    return HomogeneousProblem.build(X0, comps, {lam: lam for lam in comps}, m,
                                    metadata={"energies": [str(E) for E in energies]})


def matrix_exp_series(A: MatrixOperator, m: int) -> MatrixOperator:
    """``exp(A)`` modulo ``eps^m`` for ``A`` of eps-order at least 1."""
    if A.order() < 1:
        raise OrderViolation("exponent must have eps-order at least 1")
    acc = MatrixOperator.identity(A.ctx)
    term = acc
    for k in range(1, m):
        term = term.matmul(A, m).scale(Scalar(1) / k)
        if term.is_zero():
            break
        acc = acc + term
    return acc.truncate(m)


def unitary(Y: MatrixOperator, m: int) -> MatrixOperator:
    """``U = exp(Y / (i hbar))`` as an eps-series modulo ``eps^m``."""
    return matrix_exp_series(Y.scale(ONE / (I * Y.ctx.hbar)), m)


def conjugate_by(Y: MatrixOperator, X: MatrixOperator, m: int) -> MatrixOperator:
    """``U X U^{-1}`` modulo ``eps^m`` with ``U = exp(Y / (i hbar))``."""
    U = unitary(Y, m)
    Uinv = unitary(-Y, m)
    return U.matmul(X, m).matmul(Uinv, m)


def is_block_diagonal(Z: MatrixOperator, energies: Sequence) -> bool:
    energies = [as_scalar(E) for E in energies]
    return all(energies[r] == energies[c] for (_, r, c) in Z.terms)
