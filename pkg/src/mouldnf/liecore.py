"""Filtered Lie algebra machinery shared by all engines.

An engine supplies an element type derived from :class:`FilteredElement`
and an exact eigen-decomposition of its perturbations under ``ad X0``.
This module turns such a decomposition into a :class:`HomogeneousProblem`,
contracts mould solutions against the Lie comould to obtain the truncated
normal form ``Z_m`` and generator ``Y_m``, and checks the conjugacy

    exp(ad Y_m)(X0 + B) = X0 + Z_m   modulo order m

by plain engine arithmetic.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Dict, Iterable, Mapping, Optional, Sequence

from .errors import (EigenIdentityFailure, NotResonant, OrderViolation,
                     UnknownLetter, UnsupportedBackend)
from .moulds import Mould, canonical_alphabet, mould_exp, mould_log, mould_mul
from .scalars import ONE, ZERO, FrequencyModel, Scalar, as_scalar
from .solver import MouldSolution, solve

__all__ = [
    "FilteredElement", "SparseElement", "HomogeneousProblem", "NormalFormResult",
    "NormalFormReport", "lie_comould", "lie_contraction", "normal_form", "exp_ad",
    "bch", "tilde_solution", "verify_normal_form", "associative_contraction",
    "associative_comould",
]

INF = float("inf")


class FilteredElement(ABC):
    """Element of a complete filtered Lie algebra, stored exactly.

    Subclasses implement the vector-space operations, the bracket, the
    order function and truncation modulo ``L_{>=m}``.  They may also
    provide an *ambient* associative representation through
    :meth:`ambient_act`: an operator ``T_X`` with ``[T_X, T_Y] = T_[X,Y]``.
    By default it is ``ad_X`` acting on elements.
    """

    engine = "abstract"
    has_ambient = True

    @abstractmethod
    def bracket(self, other: "FilteredElement") -> "FilteredElement": ...

    @abstractmethod
    def __add__(self, other): ...

    @abstractmethod
    def scale(self, c) -> "FilteredElement": ...

    @abstractmethod
    def order(self) -> float: ...

    @abstractmethod
    def truncate(self, m: int) -> "FilteredElement": ...

    @abstractmethod
    def is_zero(self) -> bool: ...

    @abstractmethod
    def zero(self) -> "FilteredElement": ...

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def __rmul__(self, c):
        return self.scale(c)

    def conj(self) -> "FilteredElement":
        raise UnsupportedBackend(f"{self.engine} elements have no real structure")

    # ambient associative representation
    def ambient_act(self, obj):
        return self.bracket(obj)

    @staticmethod
    def ambient_truncate(obj, m: int):
        return obj.truncate(m)


class SparseElement(FilteredElement):
    """Element stored as a dict ``key -> Scalar`` plus a hashable context.

    Subclasses set :attr:`engine` and implement :meth:`key_order` and
    :meth:`bracket`.
    """

    __slots__ = ("terms", "ctx")

    def __init__(self, terms: Mapping | None = None, ctx=None):
        self.ctx = ctx
        self.terms = {k: as_scalar(v) for k, v in (terms or {}).items() if as_scalar(v)}

    @classmethod
    def _from_terms(cls, terms: dict, ctx):
        obj = object.__new__(cls)
        obj.ctx = ctx
        obj.terms = {k: v for k, v in terms.items() if v}
        return obj

    def _new(self, terms: dict):
        return type(self)._from_terms(terms, self.ctx)

    def _check(self, other):
        if type(other) is not type(self) or other.ctx != self.ctx:
            raise TypeError(f"incompatible {self.engine} elements")

    @abstractmethod
    def key_order(self, key) -> int: ...

    def __add__(self, other):
        self._check(other)
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out[k] + v if k in out else v
        return self._new(out)

    def scale(self, c):
        c = as_scalar(c)
        if not c:
            return self.zero()
        return self._new({k: c * v for k, v in self.terms.items()})

    def order(self) -> float:
        return min((self.key_order(k) for k in self.terms), default=INF)

    def truncate(self, m: int):
        return self._new({k: v for k, v in self.terms.items() if self.key_order(k) < m})

    def is_zero(self) -> bool:
        return not self.terms

    def zero(self):
        return self._new({})

    def __eq__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return self.ctx == other.ctx and self.terms == other.terms

    def __hash__(self):
        return hash((type(self).__name__, self.ctx, frozenset(self.terms.items())))

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda kv: _sort_key(kv[0]))

    def __repr__(self):
        items = ", ".join(f"{k}: {v}" for k, v in self.sorted_terms()[:5])
        more = ", ..." if len(self.terms) > 5 else ""
        return f"{type(self).__name__}({{{items}{more}}})"


def _sort_key(key):
    if isinstance(key, tuple):
        return tuple(_sort_key(k) for k in key)
    if isinstance(key, Scalar):
        return (key.re, key.im)
    if key is None:
        return ()
    return key


# ---------------------------------------------------------------------------
# Problems and results
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HomogeneousProblem:
    """``X0`` plus eigencomponents ``B_n`` with ``[X0, B_n] = lam(n) B_n``.

    Use :meth:`build`; it verifies every eigen-identity exactly, drops zero
    components and components of order ``>= m`` (they vanish modulo
    ``L_{>=m}``), and truncates the remaining ones at ``m``.  The full,
    untruncated perturbation is kept in :attr:`perturbation` for
    verification.
    """

    X0: FilteredElement
    components: Mapping
    eigenvalues: Mapping
    m: int
    perturbation: FilteredElement
    model: Optional[FrequencyModel] = None
    engine: str = ""
    metadata: Mapping = field(default_factory=dict)

    @classmethod
    def build(cls, X0: FilteredElement, components: Mapping, eigenvalues: Mapping | None,
              m: int, model: FrequencyModel | None = None, metadata: Mapping | None = None,
              check: bool = True) -> "HomogeneousProblem":
        if m < 1:
            raise ValueError("truncation order m must be at least 1")
        total = X0.zero()
        kept = {}
        lam = {}
        for n, B in components.items():
            if B.is_zero():
                continue
            total = total + B
            if B.order() < 1:
                raise OrderViolation(f"component {n} has order {B.order()} < 1")
            if eigenvalues is None:
                raise UnknownLetter("eigenvalues are required")
            if n not in eigenvalues:
                raise UnknownLetter(f"no eigenvalue given for mode {n!r}")
            ev = as_scalar(eigenvalues[n])
            if check:
                lhs = X0.bracket(B)
                if lhs != B.scale(ev):
                    raise EigenIdentityFailure(f"[X0, B_n] != lambda(n) B_n for mode {n!r}")
            if B.order() < m:
                kept[n] = B.truncate(m)
                lam[n] = ev
        letters = canonical_alphabet(kept)
        return cls(X0=X0, components={n: kept[n] for n in letters},
                   eigenvalues={n: lam[n] for n in letters}, m=m, perturbation=total,
                   model=model, engine=X0.engine, metadata=dict(metadata or {}))

    @property
    def letters(self) -> tuple:
        return tuple(self.components)

    def with_order(self, m: int) -> "HomogeneousProblem":
        """The same problem decomposed for another truncation order."""
        # components of order >= the old m were discarded, so only lowering is safe
        if m > self.m:
            raise ValueError("cannot raise the truncation order of a built problem")
        comps = {n: B.truncate(m) for n, B in self.components.items() if B.order() < m}
        lam = {n: self.eigenvalues[n] for n in comps}
        return HomogeneousProblem(self.X0, comps, lam, m, self.perturbation, self.model,
                                  self.engine, self.metadata)


@dataclass
class NormalFormReport:
    commutation: FilteredElement      # [X0, Z_m], exact
    conjugacy: FilteredElement        # exp(ad Y_m)(X0 + B) - X0 - Z_m mod order m

    @property
    def ok(self) -> bool:
        return self.commutation.is_zero() and self.conjugacy.is_zero()


@dataclass
class NormalFormResult:
    Z: FilteredElement
    Y: FilteredElement
    solution: MouldSolution
    report: Optional[NormalFormReport] = None

    @property
    def F(self) -> Mould:
        return self.solution.F

    @property
    def S(self) -> Mould:
        return self.solution.S

    @property
    def G(self) -> Mould:
        return self.solution.G


# ---------------------------------------------------------------------------
# Comoulds and contractions
# ---------------------------------------------------------------------------


def lie_comould(problem: HomogeneousProblem, word: Sequence) -> FilteredElement:
    """``[B_{n_r}, [..., [B_{n_2}, B_{n_1}]...]]`` truncated at ``m``."""
    word = tuple(word)
    if not word:
        raise ValueError("the Lie comould is defined on nonempty words")
    comps = problem.components
    for n in word:
        if n not in comps:
            raise UnknownLetter(f"mode {n!r} is not a component of the problem")
    acc = comps[word[0]]
    for n in word[1:]:
        acc = comps[n].bracket(acc).truncate(problem.m)
    return acc


def _comould_table(problem: HomogeneousProblem, max_len: int) -> Dict:
    """All nonzero Lie comould values on words of length <= max_len.

    A zero value kills every extension of the word, so those subtrees are
    pruned.
    """
    comps = problem.components
    m = problem.m
    table: Dict[tuple, FilteredElement] = {}
    layer = {}
    for n, B in comps.items():
        layer[(n,)] = B
    table.update(layer)
    for _ in range(2, max_len + 1):
        nxt = {}
        for w, val in layer.items():
            for n, B in comps.items():
                v = B.bracket(val).truncate(m)
                if not v.is_zero():
                    nxt[w + (n,)] = v
        table.update(nxt)
        layer = nxt
    return table


def lie_contraction(problem: HomogeneousProblem, M: Mould, table: Dict | None = None):
    """``sum over nonempty words (1/r) M^w B_[w]`` truncated at ``m``."""
    L = min(M.max_len, problem.m - 1)
    if table is None:
        table = _comould_table(problem, L)
    acc = problem.X0.zero()
    for w, v in M.sorted_items():
        if not w or len(w) > L:
            continue
        B = table.get(w)
        if B is not None:
            acc = acc + B.scale(v / len(w))
    return acc.truncate(problem.m)


def associative_comould(problem: HomogeneousProblem, word: Sequence, obj):
    """Apply ``T_{B_{n_r}} ... T_{B_{n_1}}`` to an ambient object."""
    comps = problem.components
    for n in word:
        obj = comps[n].ambient_act(obj)
    return obj


def associative_contraction(problem: HomogeneousProblem, M: Mould, obj, m: int | None = None):
    """``sum_w M^w T_{B_{n_r}} ... T_{B_{n_1}} (obj)``, truncated at order ``m``.

    ``T`` is the engine's ambient associative representation.  Words are
    enumerated as a prefix tree so each operator application is shared.
    """
    m = problem.m if m is None else m
    X0 = problem.X0
    if not X0.has_ambient:
        raise UnsupportedBackend(f"{X0.engine} has no ambient action")
    trunc = type(X0).ambient_truncate
    comps = problem.components
    letters = [n for n in comps if n in set(M.alphabet)]
    L = min(M.max_len, max(m - 1, 0))
    needed_prefixes = set()
    for w in M.entries:
        if len(w) <= L:
            for k in range(len(w) + 1):
                needed_prefixes.add(w[:k])
    acc = trunc(obj, m).scale(M[()]) if M[()] else None
    layer = {(): trunc(obj, m)}
    for r in range(1, L + 1):
        nxt = {}
        for w, val in layer.items():
            for n in letters:
                key = w + (n,)
                if key not in needed_prefixes:
                    continue
                v = trunc(comps[n].ambient_act(val), m)
                if v.is_zero():
                    continue
                nxt[key] = v
                c = M[key]
                if c:
                    term = v.scale(c)
                    acc = term if acc is None else acc + term
        layer = nxt
    if acc is None:
        return trunc(obj, m).scale(0)
    return acc


# ---------------------------------------------------------------------------
# Normal form
# ---------------------------------------------------------------------------


def _check_order(Y: FilteredElement):
    if not Y.is_zero() and Y.order() < 1:
        raise OrderViolation(f"generator has order {Y.order()} < 1")


def exp_ad(Y: FilteredElement, X: FilteredElement, m: int) -> FilteredElement:
    """``sum_{k<m} ad_Y^k(X) / k!`` truncated at order ``m``."""
    _check_order(Y)
    term = X.truncate(m)
    acc = term
    for k in range(1, m):
        term = Y.bracket(term).truncate(m).scale(Scalar(1) / k)
        if term.is_zero():
            break
        acc = acc + term
    return acc


def normal_form(problem: HomogeneousProblem, gauge: Mould | None = None,
                verify: bool = True, check_moulds: bool = True) -> NormalFormResult:
    """Truncated normal form ``(Z_m, Y_m)`` of ``X0 + sum B_n``.

    The mould equation is solved on the mode alphabet to length ``m - 1``,
    and ``Z_m``, ``Y_m`` are the Lie contractions of ``F`` and ``G``.
    """
    L = problem.m - 1
    letters = problem.letters
    sol = solve(problem.eigenvalues, letters, L, gauge=gauge, check=check_moulds)
    table = _comould_table(problem, L)
    Z = lie_contraction(problem, sol.F, table)
    Y = lie_contraction(problem, sol.G, table)
    result = NormalFormResult(Z=Z, Y=Y, solution=sol)
    if verify:
        result.report = verify_normal_form(problem, result)
    return result


def verify_normal_form(problem: HomogeneousProblem, result: NormalFormResult) -> NormalFormReport:
    """Recompute ``[X0, Z_m]`` and the conjugacy defect by engine arithmetic."""
    m = problem.m
    X = problem.X0 + problem.perturbation
    commutation = problem.X0.bracket(result.Z)
    conj = exp_ad(result.Y, X, m) - problem.X0 - result.Z
    return NormalFormReport(commutation=commutation, conjugacy=conj.truncate(m))


def bch(W: FilteredElement, Y: FilteredElement, m: int) -> FilteredElement:
    """``C`` with ``exp(ad C) = exp(ad W) exp(ad Y)`` modulo order ``m``.

    The coefficients come from the mould ``log(exp(I_y) x exp(I_w))`` on the
    two-letter alphabet ``{w, y}``; they are alternal, so contracting them
    against the Lie comould of ``(W, Y)`` gives an element of the algebra.
    The factor order reflects the anti-morphism property of contraction.
    """
    _check_order(W)
    _check_order(Y)
    L = max(m - 1, 0)
    alphabet = ("w", "y")
    Iw = Mould(alphabet, L, {("w",): 1})
    Iy = Mould(alphabet, L, {("y",): 1})
    C = mould_log(mould_mul(mould_exp(Iy), mould_exp(Iw)))
    comps = {"w": W.truncate(m), "y": Y.truncate(m)}
    acc = W.zero()
    layer = {(n,): B for n, B in comps.items() if not B.is_zero()}
    for r in range(1, L + 1):
        for w, val in layer.items():
            c = C[w]
            if c:
                acc = acc + val.scale(c / r)
        if r == L:
            break
        nxt = {}
        for w, val in layer.items():
            for n, B in comps.items():
                v = B.bracket(val).truncate(m)
                if not v.is_zero():
                    nxt[w + (n,)] = v
        layer = nxt
    return acc.truncate(m)


def tilde_solution(problem: HomogeneousProblem, result: NormalFormResult,
                   W: FilteredElement) -> NormalFormResult:
    """Another normal form: ``Z~ = exp(ad W) Z`` and ``Y~ = BCH(W, Y)``.

    Requires ``[X0, W] = 0`` exactly and ``ord(W) >= 1``.
    """
    if not problem.X0.bracket(W).is_zero():
        raise NotResonant("W does not commute with X0")
    _check_order(W)
    m = problem.m
    Zt = exp_ad(W, result.Z, m)
    Yt = bch(W, result.Y, m)
    new = NormalFormResult(Z=Zt, Y=Yt, solution=result.solution)
    new.report = verify_normal_form(problem, new)
    return new
