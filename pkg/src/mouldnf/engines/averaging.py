"""Slow-fast systems: multiphase averaging with trigonometric polynomials.

Fast angles ``phi in T^d`` rotate at frequencies ``omega``; slow variables
``I = (I_1, ..., I_Nslow)`` enter polynomially.  Everything carries an
explicit ``eps`` power, which is the filtration.

* :class:`TrigPoly` is a function ``sum c eps^e e^{i<n,phi>} I^p`` with keys
  ``(n, p, e)``.
* :class:`TrigPolyField` is a vector field; keys ``(t, n, p, e)`` where the
  target ``t < d`` is ``d/dphi_t`` and ``t >= d`` is ``d/dI_{t-d}``.
* :class:`TrigPolyHamiltonian` is a function with the Poisson bracket of
  the action-angle pairs ``(I_j, phi_j)`` (so ``Nslow == d``).

In both cases ``e^{i<n,phi>}`` times anything independent of ``phi`` is an
eigenvector of the unperturbed part with eigenvalue ``i <n, omega>``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Sequence

from ..errors import OrderViolation
from ..liecore import HomogeneousProblem, SparseElement
from ..scalars import I, Scalar, as_scalar
from .hamiltonian import resolve_frequencies

__all__ = ["TrigContext", "TrigPoly", "TrigPolyField", "TrigPolyHamiltonian",
           "averaging_decompose", "rotation_field", "action_hamiltonian", "cosine", "sine"]


@dataclass(frozen=True)
class TrigContext:
    d: int
    Nslow: int


def _add(out: dict, key, val):
    out[key] = out[key] + val if key in out else val


def _vsub(a, b):
    return tuple(x - y for x, y in zip(a, b))


def _vadd(a, b):
    return tuple(x + y for x, y in zip(a, b))


def _unit(n: int, j: int) -> tuple:
    return tuple(1 if t == j else 0 for t in range(n))


def _validate(mode, poly, ctx):
    if len(mode) != ctx.d or len(poly) != ctx.Nslow:
        raise ValueError("mode or multi-index has the wrong length")


def _d_phi(n, p, e, c, j):
    """``d/dphi_j`` of a single term, as ``(key, coeff)`` or ``None``."""
    if not n[j]:
        return None
    return (n, p, e), c * Scalar(0, n[j])


def _d_slow(n, p, e, c, t):
    if not p[t]:
        return None
    return (n, tuple(x - (1 if s == t else 0) for s, x in enumerate(p)), e), c * p[t]


class TrigPoly(SparseElement):
    """Function ``sum c eps^e e^{i<n,phi>} I^p``; commutative, zero bracket."""

    engine = "trigpoly"

    def __init__(self, terms=None, ctx: TrigContext | None = None):
        super().__init__(terms, ctx)
        for n, p, _ in self.terms:
            _validate(n, p, ctx)

    def key_order(self, key) -> int:
        return key[2]

    def bracket(self, other):
        return self.zero()

    def __mul__(self, other: "TrigPoly") -> "TrigPoly":
        out: Dict = {}
        for (n1, p1, e1), x in self.terms.items():
            for (n2, p2, e2), y in other.terms.items():
                _add(out, (_vadd(n1, n2), _vadd(p1, p2), e1 + e2), x * y)
        return self._new(out)

    def derivative(self, target: int) -> "TrigPoly":
        """Partial derivative in the coordinate numbered like field targets."""
        out: Dict = {}
        d = self.ctx.d
        for (n, p, e), c in self.terms.items():
            t = _d_phi(n, p, e, c, target) if target < d else _d_slow(n, p, e, c, target - d)
            if t:
                _add(out, *t)
        return self._new(out)

    def conj(self) -> "TrigPoly":
        return self._new({(tuple(-a for a in n), p, e): c.conjugate()
                          for (n, p, e), c in self.terms.items()})

    def is_real(self) -> bool:
        return self.conj() == self

    def average(self) -> "TrigPoly":
        """Mean over the torus: the ``n = 0`` part."""
        return self._new({k: v for k, v in self.terms.items() if not any(k[0])})


class TrigPolyField(SparseElement):
    """Vector field on ``T^d x R^Nslow`` with trigonometric-polynomial components."""

    engine = "averaging"

    def __init__(self, terms=None, ctx: TrigContext | None = None):
        super().__init__(terms, ctx)
        for t, n, p, _ in self.terms:
            if not 0 <= t < ctx.d + ctx.Nslow:
                raise ValueError(f"target {t} out of range")
            _validate(n, p, ctx)

    def key_order(self, key) -> int:
        return key[3]

    def component(self, target: int) -> TrigPoly:
        return TrigPoly._from_terms({(n, p, e): c for (t, n, p, e), c in self.terms.items()
                                     if t == target}, self.ctx)

    def _components(self) -> Dict[int, TrigPoly]:
        groups: Dict[int, dict] = {}
        for (t, n, p, e), c in self.terms.items():
            groups.setdefault(t, {})[(n, p, e)] = c
        return {t: TrigPoly._from_terms(g, self.ctx) for t, g in groups.items()}

    @classmethod
    def from_components(cls, comps: Dict[int, TrigPoly], ctx: TrigContext):
        out: Dict = {}
        for t, f in comps.items():
            for (n, p, e), c in f.terms.items():
                _add(out, (t, n, p, e), c)
        return cls._from_terms(out, ctx)

    def apply(self, f: TrigPoly) -> TrigPoly:
        """Derivative of ``f`` along the field."""
        acc = f.zero()
        for t, comp in self._components().items():
            df = f.derivative(t)
            if not df.is_zero():
                acc = acc + comp * df
        return acc

    def bracket(self, other: "TrigPolyField") -> "TrigPolyField":
        """``[X, Y] = X(Y) - Y(X)`` componentwise."""
        self._check(other)
        mine = self._components()
        theirs = other._components()
        out: Dict[int, TrigPoly] = {}
        for t, g in theirs.items():
            out[t] = out.get(t, g.zero()) + self.apply(g)
        for t, f in mine.items():
            out[t] = out.get(t, f.zero()) - other.apply(f)
        return TrigPolyField.from_components(out, self.ctx)

    def ambient_act(self, obj):
        if isinstance(obj, TrigPoly):
            return self.apply(obj)
        return self.bracket(obj)

    def conj(self) -> "TrigPolyField":
        return self._new({(t, tuple(-a for a in n), p, e): c.conjugate()
                          for (t, n, p, e), c in self.terms.items()})

    def is_real(self) -> bool:
        return self.conj() == self


class TrigPolyHamiltonian(TrigPoly):
    """Function of ``(I, phi)`` with ``{f, g} = sum dI f dphi g - dphi f dI g``."""

    engine = "averaging-hamiltonian"

    def __init__(self, terms=None, ctx: TrigContext | None = None):
        super().__init__(terms, ctx)
        if ctx.Nslow != ctx.d:
            raise ValueError("a Hamiltonian needs one action per angle")

    def bracket(self, other: "TrigPolyHamiltonian") -> "TrigPolyHamiltonian":
        self._check(other)
        out: Dict = {}
        d = self.ctx.d
        for (n1, p1, e1), x in self.terms.items():
            for (n2, p2, e2), y in other.terms.items():
                n = _vadd(n1, n2)
                e = e1 + e2
                xy = None
                for j in range(d):
                    # dI_j f * dphi_j g - dphi_j f * dI_j g
                    c = p1[j] * n2[j] - n1[j] * p2[j]
                    if not c:
                        continue
                    if xy is None:
                        xy = x * y
                    p = tuple(a + b - (1 if s == j else 0) for s, (a, b) in enumerate(zip(p1, p2)))
                    _add(out, (n, p, e), xy * Scalar(0, c))
        return self._new(out)

    def ambient_act(self, obj):
        return self.bracket(obj)


def rotation_field(omega: Sequence, ctx: TrigContext) -> TrigPolyField:
    """``sum omega_j d/dphi_j``."""
    zero_n = (0,) * ctx.d
    zero_p = (0,) * ctx.Nslow
    return TrigPolyField({(j, zero_n, zero_p, 0): as_scalar(w) for j, w in enumerate(omega)}, ctx)


def action_hamiltonian(omega: Sequence, ctx: TrigContext) -> TrigPolyHamiltonian:
    """``<omega, I>``."""
    zero_n = (0,) * ctx.d
    return TrigPolyHamiltonian({(zero_n, _unit(ctx.Nslow, j), 0): as_scalar(w)
                                for j, w in enumerate(omega)}, ctx)


def cosine(n: Sequence[int], ctx: TrigContext, coeff=1, eps: int = 0, p=None) -> dict:
    """Terms of ``coeff * eps^e * I^p * cos<n, phi>``."""
    n = tuple(n)
    p = tuple(p) if p is not None else (0,) * ctx.Nslow
    half = as_scalar(coeff) / 2
    out: Dict = {}
    _add(out, (n, p, eps), half)
    _add(out, (tuple(-a for a in n), p, eps), half)
    return out


def sine(n: Sequence[int], ctx: TrigContext, coeff=1, eps: int = 0, p=None) -> dict:
    """Terms of ``coeff * eps^e * I^p * sin<n, phi>``."""
    n = tuple(n)
    p = tuple(p) if p is not None else (0,) * ctx.Nslow
    half = as_scalar(coeff) / 2
    out: Dict = {}
    _add(out, (n, p, eps), -I * half)
    _add(out, (tuple(-a for a in n), p, eps), I * half)
    return out


def averaging_decompose(omega, B, m: int, q=None) -> HomogeneousProblem:
    """Fourier-mode decomposition of a slow-fast perturbation.

    ``B`` is a :class:`TrigPolyField` (perturbation of ``omega . d/dphi``) or
    a :class:`TrigPolyHamiltonian` (perturbation of ``<omega, I>``); every term
    needs eps-order at least 1.  Mode ``n`` has eigenvalue ``i <n, omega>``,
    or ``i <n, q^T Omega>`` for a quotient model.
    """
    ctx = B.ctx
    for key in B.terms:
        if B.key_order(key) < 1:
            raise OrderViolation("perturbation terms must have eps-order at least 1")
    hamiltonian = isinstance(B, TrigPolyHamiltonian)
    groups: Dict[tuple, dict] = {}
    for key, c in B.terms.items():
        n = key[0] if hamiltonian else key[1]
        groups.setdefault(n, {})[key] = c
    freqs, model = resolve_frequencies(omega, groups.keys(), m, q)
    X0 = action_hamiltonian(freqs, ctx) if hamiltonian else rotation_field(freqs, ctx)
    comps = {n: type(B)._from_terms(t, ctx) for n, t in groups.items()}
    lam = {n: I * sum((freqs[j] * n[j] for j in range(ctx.d)), Scalar(0)) for n in comps}
    return HomogeneousProblem.build(X0, comps, lam, m, model=model,
                                    metadata={"frequencies": [str(f) for f in freqs]})
