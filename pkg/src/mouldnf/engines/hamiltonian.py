"""Polynomial Hamiltonians in canonical coordinates (Birkhoff setting).

Polynomials live in ``d`` canonical pairs ``(q_j, p_j)`` and may carry
powers of a perturbation parameter ``eps`` and of ``hbar``.  A term is keyed
by ``(e, h, k, l)``: the monomial ``eps^e hbar^h q^k p^l``.

Two coordinate systems are used.  In ``"xy"`` coordinates the pairs are the
real positions and momenta.  In ``"zw"`` coordinates,

    z_j = s_j x_j + i y_j,      w_j = (i s_j x_j + y_j) / (2 s_j),

which is a canonical change of variables (``{z_j, w_j} = 1``) with rational
coefficients for rational scale ``s_j``.  The quadratic part
``(y_j^2 + s_j^2 x_j^2) / 2`` becomes ``-i s_j z_j w_j`` and monomials
``z^k w^l`` are eigenvectors of its Poisson bracket with eigenvalue
``i <k - l, omega>``.  Complex conjugation of real ``x, y`` acts on
``z, w`` through ``conj(z_j) = -2 i s_j w_j`` and
``conj(w_j) = -i z_j / (2 s_j)``.

Filtration: with ``grading="degree"`` the order of a monomial is its
degree in ``q, p`` minus 2, counting ``hbar`` with degree 2.  With
``grading="eps"`` it is the power of eps.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, Mapping, Sequence

from ..errors import OrderViolation, RealnessViolation
from ..liecore import HomogeneousProblem, SparseElement
from ..scalars import I, ONE, ZERO, FrequencyModel, Scalar, as_scalar, auto_frequency_model

__all__ = ["HamContext", "CanonicalPoly", "PolyHamiltonian", "to_zw", "to_xy",
           "quadratic_part", "birkhoff_decompose", "poisson_bracket", "resolve_frequencies"]


@dataclass(frozen=True)
class HamContext:
    d: int
    grading: str = "degree"        # "degree" or "eps"
    coords: str = "xy"             # "xy" or "zw"
    scales: tuple = ()             # one rational scale per pair, default 1

    def __post_init__(self):
        if self.grading not in ("degree", "eps"):
            raise ValueError(f"unknown grading {self.grading!r}")
        if self.coords not in ("xy", "zw"):
            raise ValueError(f"unknown coordinates {self.coords!r}")
        if not self.scales:
            object.__setattr__(self, "scales", tuple(ONE for _ in range(self.d)))
        else:
            object.__setattr__(self, "scales", tuple(as_scalar(s) for s in self.scales))

    def replace(self, **kw) -> "HamContext":
        data = dict(d=self.d, grading=self.grading, coords=self.coords, scales=self.scales)
        data.update(kw)
        return HamContext(**data)


def _add(out: dict, key, val):
    if key in out:
        out[key] = out[key] + val
    else:
        out[key] = val


class CanonicalPoly(SparseElement):
    """Polynomial in canonical pairs with optional eps and hbar powers.

    Terms are ``(e, h, k, l) -> coefficient``.  Build terms conveniently
    with :meth:`monomial` or :meth:`from_terms`.
    """

    engine = "canonical"

    def __init__(self, terms: Mapping | None = None, ctx: HamContext | None = None):
        if ctx is None:
            raise ValueError("a HamContext is required")
        super().__init__(terms, ctx)
        for (e, h, k, l) in self.terms:
            if len(k) != ctx.d or len(l) != ctx.d:
                raise ValueError("exponent tuples do not match the number of pairs")

    @classmethod
    def monomial(cls, ctx: HamContext, k: Sequence[int], l: Sequence[int],
                 coeff=1, eps: int = 0, hbar: int = 0):
        return cls({(eps, hbar, tuple(k), tuple(l)): coeff}, ctx)

    @property
    def d(self) -> int:
        return self.ctx.d

    def key_order(self, key) -> int:
        if self.ctx.grading == "eps":
            return key[0]
        return sum(key[2]) + sum(key[3]) + 2 * key[1] - 2

    def degree_in_eps(self, e: int):
        return self._new({k: v for k, v in self.terms.items() if k[0] == e})

    def hbar_free(self):
        """Set ``hbar = 0``."""
        return self._new({k: v for k, v in self.terms.items() if k[1] == 0})

    def hbar_powers(self) -> set:
        return {k[1] for k in self.terms}

    def with_context(self, ctx: HamContext, cls=None):
        cls = cls or type(self)
        return cls._from_terms(dict(self.terms), ctx)

    def __mul__(self, other: "CanonicalPoly"):
        if not isinstance(other, CanonicalPoly):
            return self.scale(other)
        out: Dict[tuple, Scalar] = {}
        for (e1, h1, k1, l1), x in self.terms.items():
            for (e2, h2, k2, l2), y in other.terms.items():
                key = (e1 + e2, h1 + h2, tuple(a + b for a, b in zip(k1, k2)),
                       tuple(a + b for a, b in zip(l1, l2)))
                _add(out, key, x * y)
        return self._new(out)

    def poisson(self, other: "CanonicalPoly"):
        """``{f, g} = sum_j df/dq_j dg/dp_j - df/dp_j dg/dq_j``."""
        out: Dict[tuple, Scalar] = {}
        d = self.ctx.d
        for (e1, h1, k1, l1), x in self.terms.items():
            for (e2, h2, k2, l2), y in other.terms.items():
                xy = None
                for j in range(d):
                    c = k1[j] * l2[j] - l1[j] * k2[j]
                    if not c:
                        continue
                    if xy is None:
                        xy = x * y
                        ks = [a + b for a, b in zip(k1, k2)]
                        ls = [a + b for a, b in zip(l1, l2)]
                    ks[j] -= 1
                    ls[j] -= 1
                    key = (e1 + e2, h1 + h2, tuple(ks), tuple(ls))
                    ks[j] += 1
                    ls[j] += 1
                    _add(out, key, xy * c)
        return self._new(out)

    def bracket(self, other):
        self._check(other)
        return self.poisson(other)

    def conj(self):
        """Complex conjugation of the represented function of real variables."""
        if self.ctx.coords == "xy":
            return self._new({k: v.conjugate() for k, v in self.terms.items()})
        out = {}
        scales = self.ctx.scales
        for (e, h, k, l), v in self.terms.items():
            c = v.conjugate()
            for j in range(self.ctx.d):
                s = scales[j]
                c = c * (Scalar(0, -2) * s) ** k[j] * (-I / (s * 2)) ** l[j]
            out[(e, h, l, k)] = c
        return self._new(out)

    def is_real(self) -> bool:
        return self.conj() == self


class PolyHamiltonian(CanonicalPoly):
    """Hamiltonian function with the Poisson bracket as Lie bracket."""

    engine = "birkhoff"


def poisson_bracket(f: CanonicalPoly, g: CanonicalPoly) -> CanonicalPoly:
    return f.poisson(g)


# ---------------------------------------------------------------------------
# Coordinate changes
# ---------------------------------------------------------------------------


def _pair_power_table(images, j: int, max_deg: tuple):
    """Powers of the images of ``q_j`` and ``p_j`` as dicts ``(a, b) -> c``."""
    def mul(P, Q):
        out = {}
        for (a1, b1), x in P.items():
            for (a2, b2), y in Q.items():
                _add(out, (a1 + a2, b1 + b2), x * y)
        return {k: v for k, v in out.items() if v}

    tables = []
    for img, top in zip(images, max_deg):
        pw = [{(0, 0): ONE}]
        for _ in range(top):
            pw.append(mul(pw[-1], img))
        tables.append(pw)
    return tables, mul


def _substitute(poly: CanonicalPoly, images: list, ctx: HamContext, cls):
    """Replace ``q_j, p_j`` by the given per-pair linear images."""
    d = poly.ctx.d
    max_q = [max((k[2][j] for k in poly.terms), default=0) for j in range(d)]
    max_p = [max((k[3][j] for k in poly.terms), default=0) for j in range(d)]
    tables = []
    mul = None
    for j in range(d):
        t, mul = _pair_power_table(images[j], j, (max_q[j], max_p[j]))
        tables.append(t)
    out: Dict[tuple, Scalar] = {}
    for (e, h, k, l), v in poly.terms.items():
        factors = [mul(tables[j][0][k[j]], tables[j][1][l[j]]) for j in range(d)]
        for combo in itertools.product(*[list(f.items()) for f in factors]):
            c = v
            kk = []
            ll = []
            for (a, b), x in combo:
                c = c * x
                kk.append(a)
                ll.append(b)
            _add(out, (e, h, tuple(kk), tuple(ll)), c)
    return cls._from_terms(out, ctx)


def to_zw(poly: CanonicalPoly, cls=None) -> CanonicalPoly:
    """Rewrite an ``xy`` polynomial in ``zw`` coordinates."""
    if poly.ctx.coords == "zw":
        return poly
    half = Scalar(1) / 2
    images = []
    for s in poly.ctx.scales:
        # x = z / (2 s) - i w,   y = s w - (i/2) z
        images.append(({(1, 0): ONE / (s * 2), (0, 1): -I},
                       {(0, 1): s, (1, 0): -I * half}))
    return _substitute(poly, images, poly.ctx.replace(coords="zw"), cls or type(poly))


def to_xy(poly: CanonicalPoly, cls=None) -> CanonicalPoly:
    """Rewrite a ``zw`` polynomial in ``xy`` coordinates."""
    if poly.ctx.coords == "xy":
        return poly
    half = Scalar(1) / 2
    images = []
    for s in poly.ctx.scales:
        # z = s x + i y,   w = (i/2) x + y / (2 s)
        images.append(({(1, 0): s, (0, 1): I},
                       {(1, 0): I * half, (0, 1): ONE / (s * 2)}))
    return _substitute(poly, images, poly.ctx.replace(coords="xy"), cls or type(poly))


def quadratic_part(ctx: HamContext, omega: Sequence, cls=PolyHamiltonian) -> CanonicalPoly:
    """The unperturbed Hamiltonian in the coordinates of ``ctx``.

    In ``zw`` coordinates this is ``-i sum omega_j z_j w_j``.  In ``xy``
    coordinates it is ``sum omega_j (y_j^2 + s_j^2 x_j^2) / (2 s_j)``, which
    reduces to ``omega_j (x_j^2 + y_j^2) / 2`` for unit scale and to
    ``(y_j^2 + omega_j^2 x_j^2) / 2`` for scale ``omega_j``.
    """
    d = ctx.d
    terms = {}
    zero = (0,) * d
    for j in range(d):
        unit = tuple(1 if t == j else 0 for t in range(d))
        two = tuple(2 if t == j else 0 for t in range(d))
        w = as_scalar(omega[j])
        if ctx.coords == "zw":
            terms[(0, 0, unit, unit)] = -I * w
        else:
            s = ctx.scales[j]
            terms[(0, 0, zero, two)] = w / (s * 2)
            terms[(0, 0, two, zero)] = w * s / 2
    return cls(terms, ctx)


def resolve_frequencies(omega, modes, m: int, q=None):
    """Return ``(frequencies, model)`` for rational ``omega`` or a quotient model."""
    if isinstance(omega, FrequencyModel):
        omega.check_words(modes, max(m - 1, 1))
        return [as_scalar(f) for f in omega.effective_frequencies()], omega
    if q is not None:
        model = auto_frequency_model(q, modes, max(m - 1, 1))
        return [as_scalar(f) for f in model.effective_frequencies()], model
    return [as_scalar(w) for w in omega], None


def _split_modes(B_zw: CanonicalPoly) -> Dict[tuple, dict]:
    groups: Dict[tuple, dict] = {}
    for key, v in B_zw.terms.items():
        n = tuple(a - b for a, b in zip(key[2], key[3]))
        groups.setdefault(n, {})[key] = v
    return groups


def birkhoff_decompose(omega, B: CanonicalPoly, m: int, q=None, real: bool = False,
                       cls=PolyHamiltonian) -> HomogeneousProblem:
    """Split ``B`` into modes ``n = k - l`` of its ``zw`` expansion.

    Parameters
    ----------
    omega : sequence, FrequencyModel or None
        Frequencies; or a model (then ``i q^T Omega`` plays the role of
        ``i omega``).  With ``q`` given the model is sized automatically.
    B : CanonicalPoly
        Perturbation in ``xy`` or ``zw`` coordinates.  In degree grading every
        term has degree at least 3; in eps grading eps-order at least 1.
    real : bool
        Require that ``B`` represents a real function.
    """
    ctx = B.ctx
    for key in B.terms:
        if B.key_order(key) < 1:
            raise OrderViolation("perturbation terms must have order at least 1")
    if real and not B.is_real():
        raise RealnessViolation("perturbation is not real")
    Bz = to_zw(B, cls)
    groups = _split_modes(Bz)
    freqs, model = resolve_frequencies(omega, groups.keys(), m, q)
    zctx = Bz.ctx
    X0 = quadratic_part(zctx, freqs, cls)
    comps = {n: cls._from_terms(t, zctx) for n, t in groups.items()}
    lam = {n: I * sum((freqs[j] * n[j] for j in range(ctx.d)), ZERO) for n in comps}
    if real:
        for n, Bn in comps.items():
            neg = tuple(-a for a in n)
            if Bn.conj() != comps.get(neg, Bn.zero()):
                raise RealnessViolation(f"conjugate of mode {n} is not mode {neg}")
    return HomogeneousProblem.build(X0, comps, lam, m, model=model,
                                    metadata={"frequencies": [str(f) for f in freqs]})
