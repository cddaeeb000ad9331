"""Weyl symbols with the exact Moyal bracket, and the semi-classical comparison.

A :class:`MoyalSymbol` is a :class:`CanonicalPoly` in ``(x, xi)`` whose
coefficients are polynomials in an indeterminate ``hbar`` (the ``h`` slot of
each key).  For polynomial symbols the sine series terminates, so

    {f, g}_M = sum_{k odd} (-1)^((k-1)/2) hbar^(k-1) D^k(f, g) / k!

is computed exactly, where ``D = d_x . d_xi' - d_xi . d_x'``.  Setting
``hbar = 0`` recovers the Poisson bracket.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from math import factorial
from typing import Dict, Sequence

from gmpy2 import mpq

from ..errors import OrderViolation
from ..liecore import HomogeneousProblem, NormalFormResult, normal_form
from ..scalars import I, ONE, Scalar, as_scalar
from .hamiltonian import (CanonicalPoly, HamContext, PolyHamiltonian, _split_modes,
                          quadratic_part, resolve_frequencies, to_xy, to_zw)

__all__ = ["MoyalSymbol", "moyal_bracket", "star_product", "sigma0", "moyal_decompose",
           "SemiclassicalReport", "semiclassical_compare", "poisson_decompose_symbol"]


def _falling(n: int, k: int) -> int:
    out = 1
    for t in range(k):
        out *= n - t
    return out


def _multi_indices(bounds: tuple):
    return itertools.product(*[range(b + 1) for b in bounds])


@lru_cache(maxsize=None)
def _bidiff_terms(a: tuple, b: tuple, c: tuple, e: tuple, odd_only: bool):
    """Terms of ``sum_k s_k D^k/k!`` on ``q^a p^b (x) q^c p^e``.

    Returns ``(k, q_exp, p_exp, rational)`` with the sign ``(-1)^|beta|``
    and the factor ``1/(alpha! beta!)`` included; ``k = |alpha| + |beta|``.
    """
    out = []
    alphas = [al for al in _multi_indices(tuple(min(x, y) for x, y in zip(a, e)))]
    betas = [be for be in _multi_indices(tuple(min(x, y) for x, y in zip(b, c)))]
    for al in alphas:
        sa = sum(al)
        fa = 1
        for x, y, t in zip(a, e, al):
            fa *= _falling(x, t) * _falling(y, t)
        da = 1
        for t in al:
            da *= factorial(t)
        for be in betas:
            k = sa + sum(be)
            if odd_only and k % 2 == 0:
                continue
            fb = 1
            db = 1
            for x, y, t in zip(b, c, be):
                fb *= _falling(x, t) * _falling(y, t)
                db *= factorial(t)
            coeff = mpq(fa * fb * (-1) ** sum(be), da * db)
            qexp = tuple(x + y - s - t for x, y, s, t in zip(a, c, al, be))
            pexp = tuple(x + y - s - t for x, y, s, t in zip(b, e, be, al))
            out.append((k, qexp, pexp, coeff))
    return tuple(out)


class MoyalSymbol(CanonicalPoly):
    """Polynomial Weyl symbol; the Lie bracket is the Moyal bracket.

    The ambient associative action is ``T_f(g) = (f * g) / (2 i hbar)`` with
    the Moyal star product, so that ``[T_f, T_g] = T_{f, g}_M``.  Ambient
    values may carry negative powers of ``hbar``.
    """

    engine = "moyal"

    def bracket(self, other):
        self._check(other)
        return moyal_bracket(self, other)

    def ambient_act(self, obj):
        prod = star_product(self, obj)
        return prod._new({(e, h - 1, k, l): v * Scalar(0, mpq(-1, 2))
                          for (e, h, k, l), v in prod.terms.items()})

    def at_hbar_zero(self) -> PolyHamiltonian:
        return PolyHamiltonian._from_terms(self.hbar_free().terms, self.ctx)

    def hbar_corrections(self) -> "MoyalSymbol":
        return self._new({k: v for k, v in self.terms.items() if k[1] != 0})


def _combine(f: CanonicalPoly, g: CanonicalPoly, odd_only: bool, weight):
    out: Dict[tuple, Scalar] = {}
    for (e1, h1, a, b), x in f.terms.items():
        for (e2, h2, c, e), y in g.terms.items():
            terms = _bidiff_terms(a, b, c, e, odd_only)
            if not terms:
                continue
            xy = x * y
            for k, qexp, pexp, r in terms:
                dh, w = weight(k)
                key = (e1 + e2, h1 + h2 + dh, qexp, pexp)
                val = xy * w * r
                out[key] = out[key] + val if key in out else val
    return f._new(out)


def _bracket_weight(k: int):
    return k - 1, (-1 if (k // 2) % 2 else 1)


def _star_weight(k: int):
    return k, I ** k


def moyal_bracket(f: CanonicalPoly, g: CanonicalPoly) -> CanonicalPoly:
    """Exact Moyal bracket of two polynomial symbols."""
    if f.ctx != g.ctx:
        raise TypeError("symbols live in different contexts")
    return _combine(f, g, True, _bracket_weight)


def star_product(f: CanonicalPoly, g: CanonicalPoly) -> CanonicalPoly:
    """``f * g = sum_k (i hbar)^k D^k(f, g) / k!``."""
    return _combine(f, g, False, _star_weight)


def sigma0(omega: Sequence, grading: str = "eps") -> MoyalSymbol:
    """``sum_j (xi_j^2 + omega_j^2 x_j^2) / 2`` with the matching scale context."""
    omega = [as_scalar(w) for w in omega]
    ctx = HamContext(len(omega), grading=grading, coords="xy", scales=tuple(omega))
    return quadratic_part(ctx, omega, MoyalSymbol)


def _symbol_context(omega, grading, d):
    return HamContext(d, grading=grading, coords="xy", scales=tuple(as_scalar(w) for w in omega))


def _decompose_symbol(omega, B: CanonicalPoly, m: int, cls, q=None) -> HomogeneousProblem:
    for key in B.terms:
        if B.key_order(key) < 1:
            raise OrderViolation("perturbation terms must have order at least 1")
    Bz = to_zw(B, cls)
    groups = _split_modes(Bz)
    freqs, model = resolve_frequencies(omega, groups.keys(), m, q)
    d = B.ctx.d
    comps = {n: to_xy(cls._from_terms(t, Bz.ctx)) for n, t in groups.items()}
    X0 = quadratic_part(B.ctx, freqs, cls)
    lam = {n: I * sum((freqs[j] * n[j] for j in range(d)), Scalar(0)) for n in comps}
    return HomogeneousProblem.build(X0, comps, lam, m, model=model,
                                    metadata={"frequencies": [str(f) for f in freqs]})


def moyal_decompose(omega, B: MoyalSymbol, m: int, q=None) -> HomogeneousProblem:
    """Modes of a symbol perturbation of ``sigma0``.

    ``B`` must use the context of :func:`sigma0` for the same ``omega``
    (position/momentum coordinates with scales ``omega``).  The symbols
    ``z^k w^l`` are eigenvectors of the Moyal bracket with ``sigma0`` because
    it is quadratic; each mode is returned in ``(x, xi)`` coordinates.
    """
    return _decompose_symbol(omega, B, m, MoyalSymbol, q)


def poisson_decompose_symbol(omega, B: CanonicalPoly, m: int) -> HomogeneousProblem:
    """Classical counterpart of :func:`moyal_decompose` with the Poisson bracket."""
    return _decompose_symbol(omega, B, m, PolyHamiltonian)


@dataclass
class SemiclassicalReport:
    """Termwise comparison of the quantum and classical normal forms."""

    m: int
    quantum: NormalFormResult
    classical: NormalFormResult
    Z_quantum: MoyalSymbol
    Z_classical: PolyHamiltonian
    mismatch: PolyHamiltonian
    corrections: MoyalSymbol
    same_mould: bool

    @property
    def equal_at_hbar_zero(self) -> bool:
        return self.mismatch.is_zero()

    @property
    def corrections_even(self) -> bool:
        return all(k[1] % 2 == 0 for k in self.corrections.terms)

    @property
    def ok(self) -> bool:
        return self.equal_at_hbar_zero and self.corrections_even

    def by_eps_order(self) -> list:
        rows = []
        for e in range(self.m):
            rows.append({
                "eps": e,
                "classical": self.Z_classical.degree_in_eps(e),
                "quantum_hbar0": self.Z_quantum.at_hbar_zero().degree_in_eps(e),
                "corrections": self.corrections.degree_in_eps(e),
            })
        return rows


def semiclassical_compare(omega: Sequence, B: MoyalSymbol, m: int,
                          classical_omega: Sequence | None = None) -> SemiclassicalReport:
    """Normal forms of ``sigma0 + B`` by the Moyal and by the Poisson path.

    The classical perturbation is ``B`` at ``hbar = 0``.  ``classical_omega``
    exists to exercise the failure path: with other frequencies the two
    normal forms generally disagree.
    """
    classical_omega = omega if classical_omega is None else classical_omega
    qprob = moyal_decompose(omega, B, m)
    qres = normal_form(qprob)
    cctx = _symbol_context(classical_omega, B.ctx.grading, B.ctx.d)
    Bcl = PolyHamiltonian._from_terms(B.hbar_free().terms, cctx)
    cprob = poisson_decompose_symbol(classical_omega, Bcl, m)
    cres = normal_form(cprob)
    Zq = qres.Z
    Zq0 = PolyHamiltonian._from_terms(Zq.hbar_free().terms, cctx)
    same = (qprob.letters == cprob.letters and qres.F == cres.F)
    return SemiclassicalReport(m=m, quantum=qres, classical=cres, Z_quantum=Zq,
                               Z_classical=cres.Z, mismatch=(Zq0 - cres.Z).truncate(m),
                               corrections=Zq.hbar_corrections(), same_mould=same)
