"""Solver for the resonant mould equation and its gauge group.

Given an eigenvalue map ``lam`` on a finite alphabet, :func:`solve` builds the
unique quadruple ``(F, S, G, N)`` with

* ``F`` alternal and resonant,
* ``S = exp(G)`` symmetral,
* ``nabla_lam S = I x S - S x F``,
* the resonant part of ``N = inv(S) x nabla_length(S)`` equal to a
  prescribed resonant alternal *gauge* ``A`` (zero by default).

The induction runs over words by increasing length and uses only values on
strictly shorter words.  The remaining functions act on solutions with
resonant symmetral moulds ``K`` and normalize the gauge.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence

from .errors import GaugeNotAdmissible, NotAlternal
from .moulds import (LetterMap, Mould, eigen_map, is_alternal, is_symmetral,
                     mould_exp, mould_inverse, mould_log, mould_mul, nabla,
                     nabla_length, resonant_part, word_eigenvalue)
from .scalars import ONE, ZERO, FrequencyModel, Scalar

__all__ = [
    "MouldSolution", "SolutionReport", "ClosedFormReport", "solve", "verify_solution",
    "closed_form_check", "gauge_transform", "gauge_from_generator",
    "normalize_zero_resonant", "transformed_gauge", "connecting_gauge",
]


@dataclass(frozen=True)
class MouldSolution:
    """Solution bundle of the resonant mould equation, valid to ``max_len``."""

    F: Mould
    S: Mould
    G: Mould
    N: Mould
    A: Mould
    eigenvalues: Mapping
    max_len: int
    model: Optional[FrequencyModel] = None

    @property
    def alphabet(self) -> tuple:
        return self.F.alphabet


def _check_gauge(A: Mould, lam: Mapping) -> None:
    if A[()]:
        raise GaugeNotAdmissible("gauge generator must vanish on the empty word", ((), ()))
    ok, pair = is_alternal(A)
    if not ok:
        raise GaugeNotAdmissible(f"gauge generator is not alternal, violating pair {pair}", pair)
    for w in A.entries:
        if not word_eigenvalue(lam, w).is_zero():
            raise GaugeNotAdmissible(f"gauge generator is not resonant at word {w}", (w, ()))


def solve(lam: LetterMap, alphabet: Sequence, max_len: int, gauge: Mould | None = None,
          check: bool = True) -> MouldSolution:
    """Solve the mould equation to length ``max_len``.

    Parameters
    ----------
    lam : mapping, callable or FrequencyModel
        Eigenvalue of each letter.
    alphabet : sequence
        Letters of the problem.
    max_len : int
        Truncation length ``L``.
    gauge : Mould, optional
        Resonant alternal gauge generator ``A``; zero when omitted.
    check : bool
        Re-check alternality of ``F`` and ``G`` and symmetrality of ``S``.

    Returns
    -------
    MouldSolution
    """
    model = lam if isinstance(lam, FrequencyModel) else None
    probe = Mould(alphabet, max_len)
    alphabet = probe.alphabet
    lam = eigen_map(lam, alphabet, max_len)
    if gauge is None:
        gauge = Mould.zero(alphabet, max_len)
    elif gauge.alphabet != alphabet:
        raise GaugeNotAdmissible("gauge generator lives on a different alphabet")
    _check_gauge(gauge, lam)
    A = gauge.entries

    S: Dict[tuple, Scalar] = {(): ONE}
    F: Dict[tuple, Scalar] = {}
    N: Dict[tuple, Scalar] = {}
    lam_word: Dict[tuple, Scalar] = {(): ZERO}
    S_get, F_get, N_get = S.get, F.get, N.get
    for r in range(1, max_len + 1):
        for w in itertools.product(alphabet, repeat=r):
            tail = w[1:]
            lw = lam[w[0]] + lam_word[tail]
            lam_word[w] = lw
            sum_sf = ZERO
            sum_sn = ZERO
            for k in range(1, r):
                s = S_get(w[:k])
                if s is None:
                    continue
                f = F_get(w[k:])
                if f is not None:
                    sum_sf = sum_sf + s * f
                n = N_get(w[k:])
                if n is not None:
                    sum_sn = sum_sn + s * n
            s_tail = S_get(tail, ZERO)
            if lw:
                s_val = (s_tail - sum_sf) / lw
                n_val = s_val * r - sum_sn
                f_val = ZERO
            else:
                f_val = s_tail - sum_sf
                n_val = A.get(w, ZERO)
                s_val = (n_val + sum_sn) / r
            if s_val:
                S[w] = s_val
            if f_val:
                F[w] = f_val
            if n_val:
                N[w] = n_val
    Sm = Mould._make(probe, S)
    sol = MouldSolution(F=Mould._make(probe, F), S=Sm, G=mould_log(Sm),
                        N=Mould._make(probe, N), A=gauge, eigenvalues=lam,
                        max_len=max_len, model=model)
    if check:
        _assert_structure(sol)
    return sol


def _assert_structure(sol: MouldSolution) -> None:
    for name, M in (("F", sol.F), ("G", sol.G)):
        ok, pair = is_alternal(M)
        if not ok:
            raise AssertionError(f"{name} is not alternal, violating pair {pair}")
    ok, pair = is_symmetral(sol.S)
    if not ok:
        raise AssertionError(f"S is not symmetral, violating pair {pair}")


# ---------------------------------------------------------------------------
# Verification
# ---------------------------------------------------------------------------


@dataclass
class SolutionReport:
    """Exact residuals of a mould solution; every mould should be zero."""

    resonance: Mould           # nabla_lam F
    equation: Mould            # nabla_lam S - (I x S - S x F)
    gauge: Mould               # J(log S) - A
    exponential: Mould         # exp(G) - S
    nbar: Mould                # resonant part of N minus A
    alternal_F: tuple
    alternal_G: tuple
    symmetral_S: tuple

    @property
    def ok(self) -> bool:
        moulds = (self.resonance, self.equation, self.gauge, self.exponential, self.nbar)
        flags = (self.alternal_F, self.alternal_G, self.symmetral_S)
        return all(m.is_zero() for m in moulds) and all(f[0] for f in flags)

    def summary(self) -> dict:
        def first(m: Mould):
            items = m.sorted_items()
            return None if not items else [list(items[0][0]), str(items[0][1])]
        return {
            "resonance": first(self.resonance),
            "equation": first(self.equation),
            "gauge": first(self.gauge),
            "exponential": first(self.exponential),
            "nbar": first(self.nbar),
            "alternal_F": self.alternal_F[0],
            "alternal_G": self.alternal_G[0],
            "symmetral_S": self.symmetral_S[0],
        }


def verify_solution(sol: MouldSolution) -> SolutionReport:
    """Recompute both sides of the defining equations from mould primitives."""
    lam = sol.eigenvalues
    L = sol.max_len
    I = Mould.letters(sol.alphabet, L)
    S, F = sol.S, sol.F
    lhs = nabla(S, lam)
    rhs = mould_mul(I, S) - mould_mul(S, F)
    E = mould_exp(sol.G)
    jg = resonant_part(mould_mul(mould_exp(-sol.G), nabla_length(E)), lam)
    return SolutionReport(
        resonance=nabla(F, lam),
        equation=lhs - rhs,
        gauge=jg - sol.A,
        exponential=E - S,
        nbar=resonant_part(sol.N, lam) - sol.A,
        alternal_F=is_alternal(F),
        alternal_G=is_alternal(sol.G),
        symmetral_S=is_symmetral(S),
    )


@dataclass
class ClosedFormReport:
    checked_S: int = 0
    checked_F: int = 0
    mismatches: List[tuple] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.mismatches


def _suffix_sums(lam: Mapping, w: tuple) -> list:
    """``[lam(w[i:]) for i in range(len(w))]``."""
    sums = []
    total = ZERO
    for a in reversed(w):
        total = total + lam[a]
        sums.append(total)
    return sums[::-1]


def closed_form_check(sol: MouldSolution, words=None) -> ClosedFormReport:
    """Compare the solution with the explicit product formulas.

    For a word whose suffix sums are all nonzero, ``S`` is the inverse of
    their product and ``F`` vanishes.  For a resonant word whose strict
    suffix sums are all nonzero, ``F`` is the inverse of the product of the
    strict suffix sums.  Other words are skipped.
    """
    lam = sol.eigenvalues
    report = ClosedFormReport()
    if words is None:
        words = itertools.chain.from_iterable(
            itertools.product(sol.alphabet, repeat=r) for r in range(1, sol.max_len + 1))
    for w in words:
        sums = _suffix_sums(lam, w)
        if all(sums):
            expected = ONE
            for s in sums:
                expected = expected / s
            report.checked_S += 1
            if sol.S[w] != expected:
                report.mismatches.append(("S", w, sol.S[w], expected))
            if sol.F[w]:
                report.mismatches.append(("F", w, sol.F[w], ZERO))
        elif not sums[0] and all(sums[1:]):
            expected = ONE
            for s in sums[1:]:
                expected = expected / s
            report.checked_F += 1
            if sol.F[w] != expected:
                report.mismatches.append(("F", w, sol.F[w], expected))
    return report


# ---------------------------------------------------------------------------
# Gauge group
# ---------------------------------------------------------------------------


def _check_resonant_symmetral(K: Mould, lam: Mapping) -> None:
    ok, pair = is_symmetral(K)
    if not ok:
        raise GaugeNotAdmissible(f"gauge mould is not symmetral, violating pair {pair}", pair)
    for w in K.entries:
        if not word_eigenvalue(lam, w).is_zero():
            raise GaugeNotAdmissible(f"gauge mould is not resonant at word {w}", (w, ()))


def gauge_transform(sol: MouldSolution, K: Mould, check: bool = True) -> MouldSolution:
    """Right action ``(F, S) -> (inv(K) x F x K, S x K)`` of a resonant symmetral K."""
    lam = sol.eigenvalues
    _check_resonant_symmetral(K, lam)
    Ki = mould_inverse(K)
    F = mould_mul(mould_mul(Ki, sol.F), K)
    S = mould_mul(sol.S, K)
    N = mould_mul(mould_inverse(S), nabla_length(S))
    new = MouldSolution(F=F, S=S, G=mould_log(S), N=N, A=resonant_part(N, lam),
                        eigenvalues=lam, max_len=sol.max_len, model=sol.model)
    if check:
        _assert_structure(new)
    return new


def transformed_gauge(A: Mould, K: Mould) -> Mould:
    """Gauge generator after acting by ``K``: ``inv(K) x A x K + inv(K) x nabla_length(K)``."""
    Ki = mould_inverse(K)
    return mould_mul(mould_mul(Ki, A), K) + mould_mul(Ki, nabla_length(K))


def connecting_gauge(first: MouldSolution, second: MouldSolution) -> Mould:
    """The unique K carrying ``first`` to ``second``, namely ``inv(S1) x S2``."""
    return mould_mul(mould_inverse(first.S), second.S)


def gauge_from_generator(A: Mould, max_len: int | None = None) -> Mould:
    """Unique K with empty-word value 1 and ``nabla_length(K) = K x A``.

    Built by induction: ``K^w = (K x A)^w / len(w)``.
    """
    ok, pair = is_alternal(A)
    if not ok:
        raise NotAlternal(f"generator is not alternal, violating pair {pair}", pair)
    L = A.max_len if max_len is None else max_len
    heads = sorted(((b, v) for b, v in A.entries.items() if len(b) <= L),
                   key=lambda kv: len(kv[0]))
    by_len: List[Dict[tuple, Scalar]] = [dict() for _ in range(L + 1)]
    by_len[0][()] = ONE
    for r in range(1, L + 1):
        acc: Dict[tuple, Scalar] = {}
        for b, v in heads:
            rb = len(b)
            if rb > r:
                break
            for a, x in by_len[r - rb].items():
                w = a + b
                acc[w] = acc.get(w, ZERO) + x * v
        by_len[r] = {w: v / r for w, v in acc.items() if v}
    entries = {}
    for layer in by_len:
        entries.update(layer)
    K = Mould(A.alphabet, L, entries)
    ok, pair = is_symmetral(K)
    if not ok:
        raise AssertionError(f"generated gauge mould is not symmetral at {pair}")
    return K


def normalize_zero_resonant(sol: MouldSolution, return_generator: bool = False):
    """Gauge-transform ``sol`` so that the resonant part of ``G`` vanishes.

    The resonant alternal ``J`` is found by the fixed-point iteration
    ``J <- J - resonant_part(log(exp(G) x exp(J)))``, which gains at least one
    word length per step and therefore settles after at most ``max_len + 1``
    steps.  With ``return_generator`` the pair ``(solution, J)`` is returned.
    """
    lam = sol.eigenvalues
    J = Mould.zero(sol.alphabet, sol.max_len)
    for _ in range(sol.max_len + 1):
        residual = resonant_part(mould_log(mould_mul(sol.S, mould_exp(J))), lam)
        if residual.is_zero():
            break
        J = J - residual
    else:
        raise AssertionError("zero-resonant normalization did not settle")
    new = gauge_transform(sol, mould_exp(J))
    if not resonant_part(new.G, lam).is_zero():
        raise AssertionError("normalized solution still has a resonant logarithm")
    again = resonant_part(mould_log(new.S), lam)
    if not again.is_zero():
        raise AssertionError("second normalization pass is not trivial")
    return (new, J) if return_generator else new
