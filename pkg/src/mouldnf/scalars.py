"""Exact Gaussian rationals and resonance-faithful eigenvalue maps.

Every coefficient in the package is a :class:`Scalar`, a complex number
whose real and imaginary parts are arbitrary-precision rationals.  The
rational parts are ``gmpy2.mpq`` values, which are always stored in lowest
terms with a positive denominator.

Irrational frequency vectors are never represented directly.  Instead a
:class:`FrequencyModel` declares which integer combinations of modes are
resonant (through an integer quotient matrix ``q``) and realizes the
eigenvalues with integer surrogate frequencies that reproduce exactly that
resonance pattern on a bounded range of word sums.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from gmpy2 import mpq

from .errors import RangeExceeded, RankDeficient

__all__ = [
    "Scalar",
    "as_scalar",
    "ZERO",
    "ONE",
    "I",
    "FrequencyModel",
    "build_frequency_model",
    "auto_frequency_model",
    "eigenvalue_of",
    "matrix_rank",
]

_MPQ = type(mpq(0))
_ZERO_Q = mpq(0)


def _rational(x) -> mpq:
    if isinstance(x, _MPQ):
        return x
    if isinstance(x, int):
        return mpq(x)
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    if isinstance(x, str):
        return mpq(x.strip())
    raise TypeError(f"cannot interpret {x!r} as a rational number")


class Scalar:
    """Exact Gaussian rational ``re + im*i``.

    Parameters
    ----------
    re, im : int, Fraction, mpq or str
        Real and imaginary parts.

    Notes
    -----
    Scalars compare equal to plain integers and rationals with zero
    imaginary part, and hash accordingly, so they can be mixed freely with
    ``int`` keys in dictionaries.  The ``<`` operator is the lexicographic
    order on ``(re, im)``.  It is only used to order alphabets whose
    letters are eigenvalues; it is not a field order.
    """

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = _rational(re)
        self.im = _rational(im)

    @classmethod
    def _raw(cls, re: mpq, im: mpq) -> "Scalar":
        s = object.__new__(cls)
        s.re = re
        s.im = im
        return s

    # -- arithmetic -----------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, Scalar):
            if isinstance(other, (int, _MPQ, Fraction)):
                return Scalar._raw(self.re + _rational(other), self.im)
            return NotImplemented
        return Scalar._raw(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, Scalar):
            if isinstance(other, (int, _MPQ, Fraction)):
                return Scalar._raw(self.re - _rational(other), self.im)
            return NotImplemented
        return Scalar._raw(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return Scalar._raw(-self.re, -self.im)

    def __pos__(self):
        return self

    def __mul__(self, other):
        if not isinstance(other, Scalar):
            if isinstance(other, (int, _MPQ, Fraction)):
                r = _rational(other)
                return Scalar._raw(self.re * r, self.im * r)
            return NotImplemented
        a, b, c, d = self.re, self.im, other.re, other.im
        if b == 0:
            if d == 0:
                return Scalar._raw(a * c, _ZERO_Q)
            return Scalar._raw(a * c, a * d)
        if d == 0:
            return Scalar._raw(a * c, b * c)
        return Scalar._raw(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def inverse(self) -> "Scalar":
        a, b = self.re, self.im
        if b == 0:
            if a == 0:
                raise ZeroDivisionError("division by the zero scalar")
            return Scalar._raw(1 / a, _ZERO_Q)
        n = a * a + b * b
        return Scalar._raw(a / n, -b / n)

    def __truediv__(self, other):
        if not isinstance(other, Scalar):
            if isinstance(other, (int, _MPQ, Fraction)):
                r = _rational(other)
                if r == 0:
                    raise ZeroDivisionError("division by the zero scalar")
                return Scalar._raw(self.re / r, self.im / r)
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return as_scalar(other) * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        result, base = ONE, self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def conjugate(self) -> "Scalar":
        return Scalar._raw(self.re, -self.im)

    # -- predicates and comparisons -------------------------------------
    def __bool__(self):
        return self.re != 0 or self.im != 0

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def is_real(self) -> bool:
        return self.im == 0

    def __eq__(self, other):
        if isinstance(other, Scalar):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, _MPQ, Fraction)):
            return self.im == 0 and self.re == other
        return NotImplemented

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __lt__(self, other):
        other = as_scalar(other)
        return (self.re, self.im) < (other.re, other.im)

    def __le__(self, other):
        other = as_scalar(other)
        return (self.re, self.im) <= (other.re, other.im)

    def __gt__(self, other):
        return as_scalar(other) < self

    def __ge__(self, other):
        return as_scalar(other) <= self

    # -- text form ------------------------------------------------------
    def __str__(self):
        if self.im == 0:
            return str(self.re)
        sign = "+" if self.im > 0 else "-"
        return f"{self.re}{sign}{abs(self.im)}*i"

    def __repr__(self):
        return f"Scalar('{self}')"

    @classmethod
    def parse(cls, text: str) -> "Scalar":
        """Parse ``"p/q"``, ``"p/q+r/s*i"``, ``"r/s*i"``, ``"i"`` and similar forms."""
        body = text.replace(" ", "")
        if not body:
            raise ValueError("empty scalar string")
        try:
            if not body.endswith("i"):
                return Scalar._raw(mpq(body), _ZERO_Q)
            body = body[:-1].rstrip("*")
            cut = max(body.rfind("+"), body.rfind("-"))
            if cut > 0:
                real, imag = body[:cut], body[cut:]
            else:
                real, imag = "0", body
            if imag in ("", "+"):
                imag = "1"
            elif imag == "-":
                imag = "-1"
            return Scalar._raw(mpq(real), mpq(imag.lstrip("+")))
        except ValueError:
            raise ValueError(f"not a Gaussian rational: {text!r}") from None


ZERO = Scalar(0)
ONE = Scalar(1)
I = Scalar(0, 1)


def as_scalar(x) -> Scalar:
    """Coerce ints, rationals, complex-free strings and Scalars to Scalar."""
    if isinstance(x, Scalar):
        return x
    if isinstance(x, str):
        return Scalar.parse(x)
    return Scalar._raw(_rational(x), _ZERO_Q)


# ---------------------------------------------------------------------------
# Eigenvalue maps
# ---------------------------------------------------------------------------


def matrix_rank(rows: Sequence[Sequence[int]]) -> int:
    """Exact rank of an integer matrix by fraction-free elimination."""
    m = [[mpq(v) for v in row] for row in rows]
    rank = 0
    ncols = len(m[0]) if m else 0
    for col in range(ncols):
        pivot = next((r for r in range(rank, len(m)) if m[r][col] != 0), None)
        if pivot is None:
            continue
        m[rank], m[pivot] = m[pivot], m[rank]
        for r in range(len(m)):
            if r != rank and m[r][col] != 0:
                f = m[r][col] / m[rank][col]
                m[r] = [a - f * b for a, b in zip(m[r], m[rank])]
        rank += 1
    return rank


@dataclass(frozen=True)
class FrequencyModel:
    """Eigenvalue map ``lambda(n) = i <q n, omega>`` on the lattice Z^d.

    Attributes
    ----------
    d : int
        Dimension of the mode lattice.
    q : tuple of tuple of int
        Integer quotient matrix of shape ``(e, d)``; ``lambda(n) = 0`` exactly
        when ``q n = 0``.
    R : int
        Largest absolute coordinate of ``q (n_1 + ... + n_r)`` for which the
        surrogate is guaranteed faithful.
    omega : tuple of int
        Surrogate frequencies ``(2R+1)**(j-1)``.
    """

    d: int
    q: tuple
    R: int
    omega: tuple

    @property
    def e(self) -> int:
        return len(self.q)

    def project(self, n: Sequence[int]) -> tuple:
        return tuple(sum(a * b for a, b in zip(row, n)) for row in self.q)

    def effective_frequencies(self) -> tuple:
        """Integer vector ``q^T omega``; ``lambda(n) = i <n, q^T omega>``."""
        return tuple(
            sum(self.q[r][j] * self.omega[r] for r in range(self.e))
            for j in range(self.d)
        )

    def in_range(self, n: Sequence[int]) -> bool:
        return all(abs(c) <= self.R for c in self.project(n))

    def letter_bound(self, letters: Iterable[Sequence[int]]) -> int:
        return max((max((abs(c) for c in self.project(n)), default=0)
                    for n in letters), default=0)

    def check_words(self, letters: Iterable[Sequence[int]], max_len: int) -> None:
        """Raise RangeExceeded unless every word sum up to ``max_len`` is safe."""
        need = max_len * self.letter_bound(letters)
        if need > self.R:
            raise RangeExceeded(
                f"word sums reach {need} but the surrogate is faithful only up to R={self.R}")

    def eigenvalues(self, letters: Iterable[Sequence[int]], max_len: int) -> dict:
        """Letter to eigenvalue map, after checking the range for ``max_len``."""
        letters = [tuple(n) for n in letters]
        self.check_words(letters, max_len)
        return {n: Scalar(0, sum(a * b for a, b in zip(self.project(n), self.omega)))
                for n in letters}

    def to_json(self) -> dict:
        return {"d": self.d, "q": [list(r) for r in self.q], "R": self.R}


def build_frequency_model(q: Sequence[Sequence[int]], R: int) -> FrequencyModel:
    """Build the surrogate model for quotient matrix ``q`` and range ``R``."""
    rows = tuple(tuple(int(v) for v in row) for row in q)
    if not rows or not rows[0]:
        raise RankDeficient("quotient matrix must be non-empty")
    d = len(rows[0])
    if any(len(r) != d for r in rows):
        raise RankDeficient("quotient matrix rows have unequal lengths")
    if R < 1:
        raise ValueError("range bound R must be a positive integer")
    if matrix_rank(rows) != len(rows):
        raise RankDeficient(f"quotient matrix of shape {len(rows)}x{d} is not full row rank")
    base = 2 * R + 1
    omega = tuple(base ** j for j in range(len(rows)))
    return FrequencyModel(d=d, q=rows, R=R, omega=omega)


def auto_frequency_model(q: Sequence[Sequence[int]],
                         letters: Iterable[Sequence[int]],
                         max_len: int) -> FrequencyModel:
    """Model whose range bound covers all words of length ``max_len``."""
    rows = tuple(tuple(int(v) for v in row) for row in q)
    probe = FrequencyModel(d=len(rows[0]), q=rows, R=1, omega=(1,) * len(rows))
    R = max(1, max_len * probe.letter_bound([tuple(n) for n in letters]))
    return build_frequency_model(rows, R)


def eigenvalue_of(model: FrequencyModel, n: Sequence[int]) -> Scalar:
    """Return ``i <q n, omega>`` for a single mode ``n``."""
    qn = model.project(n)
    if any(abs(c) > model.R for c in qn):
        raise RangeExceeded(f"mode {tuple(n)} projects outside the range R={model.R}")
    return Scalar(0, sum(a * b for a, b in zip(qn, model.omega)))
