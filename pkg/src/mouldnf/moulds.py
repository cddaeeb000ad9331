"""Words, moulds and the shuffle machinery.

A *word* is a tuple of letters.  A :class:`Mould` is a sparse map from words
to :class:`~mouldnf.scalars.Scalar` values, known only on words of length at
most ``max_len``.  Moulds form an associative algebra under
:func:`mould_mul`, whose product is induced by concatenation of words.

Letters may be integers, tuples of integers (lattice modes) or Scalars
(eigenvalues).  One alphabet must use a single kind of letter so that the
letters are totally ordered.  Words are ordered by length, then
lexicographically.
"""

from __future__ import annotations

import itertools
import operator
from functools import lru_cache
from math import factorial
from typing import Callable, Dict, Iterable, Iterator, Mapping, Sequence, Tuple, Union

import numpy as np
from gmpy2 import mpq

from .errors import (AlphabetMismatch, BadConstantTerm, NotAlternal,
                     NotInvertible, UnknownLetter)
from .scalars import ONE, ZERO, FrequencyModel, Scalar, as_scalar

Word = Tuple
Letter = object
LetterMap = Union[Mapping, Callable, FrequencyModel]

__all__ = [
    "Word", "Mould", "mould_mul", "mould_bracket", "mould_inverse", "mould_exp",
    "mould_log", "shuffle_coefficient", "shuffle_product", "is_alternal",
    "is_symmetral", "nabla", "nabla_length", "resonant_part", "gauge_generator",
    "pullback", "truncate_below", "restrict_letters", "delta_coproduct",
    "words_up_to", "word_eigenvalue", "eigen_map", "canonical_alphabet",
    "letter_to_json", "letter_from_json",
]


def _letter_key(letter):
    if isinstance(letter, Scalar):
        return (letter.re, letter.im)
    return letter


def canonical_alphabet(letters: Iterable) -> tuple:
    """Deduplicate and sort letters into the canonical alphabet order."""
    return tuple(sorted(set(letters), key=_letter_key))


def words_up_to(alphabet: Sequence, max_len: int, min_len: int = 0) -> Iterator[Word]:
    """All words with ``min_len <= length <= max_len`` in canonical order."""
    for r in range(min_len, max_len + 1):
        yield from itertools.product(alphabet, repeat=r)


class Mould:
    """Sparse, length-truncated mould.

    Parameters
    ----------
    alphabet : sequence of letters
        Letters the mould may be evaluated on.  Stored sorted.
    max_len : int
        Truncation length ``L``.  Words longer than ``L`` are dropped.
    entries : mapping, optional
        Word to value.  Zero values are pruned.

    Examples
    --------
    >>> I = Mould.letters(["a", "b"], 3)
    >>> (I * I)[("a", "b")]
    Scalar('1')
    """

    __slots__ = ("alphabet", "max_len", "entries", "_index")

    def __init__(self, alphabet: Sequence, max_len: int, entries: Mapping | None = None):
        self.alphabet = canonical_alphabet(alphabet)
        self.max_len = int(max_len)
        self._index = {a: i for i, a in enumerate(self.alphabet)}
        clean: Dict[Word, Scalar] = {}
        for word, value in (entries or {}).items():
            word = tuple(word)
            if len(word) > self.max_len:
                continue
            for letter in word:
                if letter not in self._index:
                    raise UnknownLetter(f"letter {letter!r} is not in the alphabet")
            value = as_scalar(value)
            if value:
                clean[word] = value
        self.entries = clean

    @classmethod
    def _make(cls, like: "Mould", entries: dict, max_len: int | None = None) -> "Mould":
        m = object.__new__(cls)
        m.alphabet = like.alphabet
        m._index = like._index
        m.max_len = like.max_len if max_len is None else max_len
        m.entries = {w: v for w, v in entries.items() if v}
        return m

    # -- constructors ---------------------------------------------------
    @classmethod
    def zero(cls, alphabet: Sequence, max_len: int) -> "Mould":
        return cls(alphabet, max_len)

    @classmethod
    def unit(cls, alphabet: Sequence, max_len: int) -> "Mould":
        """The unit mould, 1 on the empty word and 0 elsewhere."""
        return cls(alphabet, max_len, {(): ONE})

    @classmethod
    def letters(cls, alphabet: Sequence, max_len: int) -> "Mould":
        """The elementary mould, 1 on every one-letter word."""
        return cls(alphabet, max_len, {(a,): ONE for a in alphabet})

    # -- access ---------------------------------------------------------
    def __getitem__(self, word) -> Scalar:
        return self.entries.get(tuple(word), ZERO)

    def __iter__(self):
        return iter(self.sorted_items())

    def __len__(self):
        return len(self.entries)

    def word_key(self, word: Word):
        return (len(word), tuple(self._index[a] for a in word))

    def sorted_items(self):
        return sorted(self.entries.items(), key=lambda kv: self.word_key(kv[0]))

    def order(self) -> float:
        """Smallest length of a word with nonzero value, ``inf`` for zero."""
        return min((len(w) for w in self.entries), default=float("inf"))

    def is_zero(self) -> bool:
        return not self.entries

    def counts_by_length(self) -> list:
        counts = [0] * (self.max_len + 1)
        for w in self.entries:
            counts[len(w)] += 1
        return counts

    def with_max_len(self, max_len: int) -> "Mould":
        return Mould._make(self, {w: v for w, v in self.entries.items() if len(w) <= max_len},
                           max_len)

    # -- linear structure -----------------------------------------------
    def _check(self, other: "Mould"):
        if not isinstance(other, Mould):
            raise TypeError("expected a Mould")
        if other.alphabet != self.alphabet:
            raise AlphabetMismatch("moulds are defined over different alphabets")

    def __add__(self, other: "Mould") -> "Mould":
        self._check(other)
        L = min(self.max_len, other.max_len)
        out = {w: v for w, v in self.entries.items() if len(w) <= L}
        for w, v in other.entries.items():
            if len(w) <= L:
                out[w] = out.get(w, ZERO) + v
        return Mould._make(self, out, L)

    def __neg__(self) -> "Mould":
        return Mould._make(self, {w: -v for w, v in self.entries.items()})

    def __sub__(self, other: "Mould") -> "Mould":
        return self + (-other)

    def scale(self, c) -> "Mould":
        c = as_scalar(c)
        return Mould._make(self, {w: c * v for w, v in self.entries.items()})

    def __mul__(self, other):
        if isinstance(other, Mould):
            return mould_mul(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def __eq__(self, other):
        if not isinstance(other, Mould):
            return NotImplemented
        return (self.alphabet == other.alphabet and self.max_len == other.max_len
                and self.entries == other.entries)

    def __repr__(self):
        body = ", ".join(f"{_fmt_word(w)}: {v}" for w, v in self.sorted_items()[:6])
        more = ", ..." if len(self.entries) > 6 else ""
        return f"Mould(L={self.max_len}, {{{body}{more}}})"

    # -- serialization --------------------------------------------------
    def to_json(self) -> dict:
        return {
            "alphabet": [letter_to_json(a) for a in self.alphabet],
            "max_len": self.max_len,
            "entries": [{"word": [letter_to_json(a) for a in w], "value": str(v)}
                        for w, v in self.sorted_items()],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "Mould":
        alphabet = [letter_from_json(a) for a in data["alphabet"]]
        entries: Dict[Word, Scalar] = {}
        for e in data["entries"]:
            w = tuple(letter_from_json(a) for a in e["word"])
            entries[w] = entries.get(w, ZERO) + Scalar.parse(str(e["value"]))
        return cls(alphabet, data["max_len"], entries)


def _fmt_word(w: Word) -> str:
    return "(" + " ".join(str(a) for a in w) + ")" if w else "()"


def letter_to_json(letter):
    if isinstance(letter, Scalar):
        return str(letter)
    if isinstance(letter, tuple):
        return list(letter)
    return letter


def letter_from_json(data):
    """Lists become lattice vectors; strings are scalars when they parse, names otherwise."""
    if isinstance(data, list):
        return tuple(data)
    if isinstance(data, str):
        try:
            return Scalar.parse(data)
        except ValueError:
            return data
    return data


# ---------------------------------------------------------------------------
# Products and series
# ---------------------------------------------------------------------------


def _by_length(entries: Mapping, max_len: int) -> list:
    buckets = [[] for _ in range(max_len + 1)]
    for w, v in entries.items():
        if len(w) <= max_len:
            buckets[len(w)].append((w, v))
    return buckets


def _product(left: Mapping, right: Mapping, max_len: int) -> dict:
    buckets = _by_length(right, max_len)
    out: Dict[Word, Scalar] = {}
    get = out.get
    for a, x in left.items():
        room = max_len - len(a)
        if room < 0:
            continue
        for r in range(room + 1):
            for b, y in buckets[r]:
                w = a + b
                out[w] = get(w, ZERO) + x * y
    return out


def mould_mul(M: Mould, N: Mould) -> Mould:
    """Concatenation product ``(M x N)^w = sum over w = ab of M^a N^b``."""
    M._check(N)
    L = min(M.max_len, N.max_len)
    return Mould._make(M, _product(M.entries, N.entries, L), L)


def mould_bracket(M: Mould, N: Mould) -> Mould:
    return mould_mul(M, N) - mould_mul(N, M)


def _series(X: Mould, coeffs: Sequence[Scalar]) -> Mould:
    """``sum_k coeffs[k] X^k`` for ``X`` with no empty-word term.

    Horner evaluation; the partial result at depth ``k`` is later multiplied
    by ``X`` another ``k`` times, so it only needs words of length
    ``L - k``.
    """
    L = X.max_len
    depth = min(len(coeffs) - 1, L)
    h = {(): as_scalar(coeffs[depth])} if coeffs[depth] else {}
    for k in range(depth - 1, -1, -1):
        h = _product(X.entries, h, L - k)
        if coeffs[k]:
            h[()] = h.get((), ZERO) + as_scalar(coeffs[k])
    return Mould._make(X, h)


def mould_exp(M: Mould) -> Mould:
    """Exponential of a mould with zero empty-word value."""
    if M[()]:
        raise BadConstantTerm("exp requires a vanishing value on the empty word")
    coeffs = [Scalar(1) / factorial(k) for k in range(M.max_len + 1)]
    return _series(M, coeffs)


def mould_log(S: Mould) -> Mould:
    """Logarithm of a mould whose empty-word value is 1."""
    if S[()] != 1:
        raise BadConstantTerm("log requires the value 1 on the empty word")
    X = S - Mould.unit(S.alphabet, S.max_len)
    coeffs = [ZERO] + [Scalar((-1) ** (k - 1)) / k for k in range(1, S.max_len + 1)]
    return _series(X, coeffs)


def mould_inverse(M: Mould) -> Mould:
    """Multiplicative inverse, built by induction on word length."""
    c = M[()]
    if not c:
        raise NotInvertible("a mould is invertible only if its empty-word value is nonzero")
    ci = c.inverse()
    L = M.max_len
    heads = [(a, v) for a, v in M.entries.items() if a]
    inv: Dict[Word, Scalar] = {(): ci}
    # words of the inverse's support are concatenations of nonempty support words of M
    candidates = [set() for _ in range(L + 1)]
    candidates[0].add(())
    for r in range(1, L + 1):
        for a, _ in heads:
            if len(a) <= r:
                for b in candidates[r - len(a)]:
                    candidates[r].add(a + b)
    for r in range(1, L + 1):
        for w in candidates[r]:
            total = ZERO
            for k in range(1, r + 1):
                x = M.entries.get(w[:k])
                if x is not None:
                    y = inv.get(w[k:])
                    if y is not None:
                        total = total + x * y
            if total:
                inv[w] = -ci * total
    return Mould._make(M, inv)


# ---------------------------------------------------------------------------
# Shuffles
# ---------------------------------------------------------------------------


def shuffle_coefficient(a: Sequence, b: Sequence, n: Sequence) -> int:
    """Number of ways to interleave ``a`` and ``b`` into ``n``.

    Dynamic programming over prefixes: ``ways[i][j]`` counts interleavings of
    ``a[:i]`` and ``b[:j]`` that spell ``n[:i+j]``.
    """
    a, b, n = tuple(a), tuple(b), tuple(n)
    la, lb = len(a), len(b)
    if la + lb != len(n):
        return 0
    ways = [[0] * (lb + 1) for _ in range(la + 1)]
    ways[0][0] = 1
    for i in range(la + 1):
        for j in range(lb + 1):
            if i == j == 0:
                continue
            c = n[i + j - 1]
            total = 0
            if i and a[i - 1] == c:
                total += ways[i - 1][j]
            if j and b[j - 1] == c:
                total += ways[i][j - 1]
            ways[i][j] = total
    return ways[la][lb]


@lru_cache(maxsize=200_000)
def shuffle_product(a: Word, b: Word) -> Tuple[Tuple[Word, int], ...]:
    """The shuffle product of two words as ``((word, multiplicity), ...)``."""
    if not a:
        return ((b, 1),)
    if not b:
        return ((a, 1),)
    out: Dict[Word, int] = {}
    for w, c in shuffle_product(a[:-1], b):
        key = w + a[-1:]
        out[key] = out.get(key, 0) + c
    for w, c in shuffle_product(a, b[:-1]):
        key = w + b[-1:]
        out[key] = out.get(key, 0) + c
    return tuple(out.items())


def _shuffle_sum(M: Mould, a: Word, b: Word) -> Scalar:
    total = ZERO
    get = M.entries.get
    for w, c in shuffle_product(a, b):
        v = get(w)
        if v is not None:
            total = total + v * c
    return total


def _split_pairs(M: Mould, upto: int) -> set:
    """Pairs (a, b), both nonempty, obtained by unshuffling stored words."""
    pairs = set()
    for w in M.entries:
        r = len(w)
        if r < 2 or r > upto:
            continue
        for mask in range(1, (1 << r) - 1):
            a = tuple(w[i] for i in range(r) if mask >> i & 1)
            b = tuple(w[i] for i in range(r) if not mask >> i & 1)
            pairs.add((a, b))
    return pairs


def _pair_key(M: Mould, pair):
    a, b = pair
    return (len(a) + len(b), M.word_key(a), M.word_key(b))


# Dense evaluation of all shuffle sums.  Words of length r over an alphabet
# of size k are indexed in base k; the interleaving of a and b along a
# position set P has index  sum_j a_j k^(r-1-P_j) + sum_j b_j k^(r-1-Q_j),
# so each position set contributes one gathered block.

_DENSE_LIMIT = 300_000
_Q0 = mpq(0)


@lru_cache(maxsize=64)
def _digits(k: int, r: int) -> np.ndarray:
    if r == 0:
        return np.zeros((1, 0), dtype=np.int64)
    return np.array(list(itertools.product(range(k), repeat=r)), dtype=np.int64)


def _dense_layers(M: Mould, upto: int) -> list:
    k = len(M.alphabet)
    layers = [(np.full(k ** r, _Q0, dtype=object), np.full(k ** r, _Q0, dtype=object))
              for r in range(upto + 1)]
    index = M._index
    for w, v in M.entries.items():
        r = len(w)
        if r > upto:
            continue
        pos = 0
        for a in w:
            pos = pos * k + index[a]
        layers[r][0][pos] = v.re
        layers[r][1][pos] = v.im
    return layers


def _dense_shuffle_blocks(M: Mould, upto: int):
    """Yield ``(ra, rb, re, im)``: all shuffle sums with ``len(a)=ra, len(b)=rb``."""
    k = len(M.alphabet)
    layers = _dense_layers(M, upto)
    for s in range(2, upto + 1):
        re_s, im_s = layers[s]
        for ra in range(1, s):
            rb = s - ra
            acc_re = np.full((k ** ra, k ** rb), _Q0, dtype=object)
            acc_im = np.full((k ** ra, k ** rb), _Q0, dtype=object)
            da, db = _digits(k, ra), _digits(k, rb)
            for P in itertools.combinations(range(s), ra):
                Q = [j for j in range(s) if j not in P]
                ia = da @ np.array([k ** (s - 1 - j) for j in P], dtype=np.int64)
                ib = db @ np.array([k ** (s - 1 - j) for j in Q], dtype=np.int64)
                idx = ia[:, None] + ib[None, :]
                acc_re = acc_re + re_s[idx]
                acc_im = acc_im + im_s[idx]
            yield ra, rb, acc_re, acc_im, layers


def _first_violation(M: Mould, ra: int, rb: int, bad: np.ndarray):
    hits = np.argwhere(bad)
    if not len(hits):
        return None
    i, j = hits[0]
    k = len(M.alphabet)
    a = tuple(M.alphabet[d] for d in _digits(k, ra)[i])
    b = tuple(M.alphabet[d] for d in _digits(k, rb)[j])
    return (a, b)


def _use_dense(M: Mould, upto: int) -> bool:
    k = len(M.alphabet)
    return k > 0 and upto >= 2 and k ** upto <= _DENSE_LIMIT


def is_alternal(M: Mould, upto: int | None = None):
    """Check alternality on all pairs of total length ``<= upto``.

    Returns
    -------
    (bool, pair or None)
        The flag and, on failure, the first violating pair ``(a, b)`` in
        canonical order.  A nonzero empty-word value is reported as
        ``((), ())``.
    """
    upto = M.max_len if upto is None else min(upto, M.max_len)
    if M[()]:
        return False, ((), ())
    if _use_dense(M, upto):
        for ra, rb, re, im, _ in _dense_shuffle_blocks(M, upto):
            pair = _first_violation(M, ra, rb, (re != 0) | (im != 0))
            if pair is not None:
                return False, pair
        return True, None
    for a, b in sorted(_split_pairs(M, upto), key=lambda p: _pair_key(M, p)):
        if _shuffle_sum(M, a, b):
            return False, (a, b)
    return True, None


def is_symmetral(S: Mould, upto: int | None = None):
    """Check symmetrality; same return convention as :func:`is_alternal`."""
    upto = S.max_len if upto is None else min(upto, S.max_len)
    if S[()] != 1:
        return False, ((), ())
    if _use_dense(S, upto):
        for ra, rb, re, im, layers in _dense_shuffle_blocks(S, upto):
            (ar, ai), (br, bi) = layers[ra], layers[rb]
            want_re = np.multiply.outer(ar, br) - np.multiply.outer(ai, bi)
            want_im = np.multiply.outer(ar, bi) + np.multiply.outer(ai, br)
            pair = _first_violation(S, ra, rb, (re != want_re) | (im != want_im))
            if pair is not None:
                return False, pair
        return True, None
    pairs = _split_pairs(S, upto)
    buckets = _by_length({w: v for w, v in S.entries.items() if w}, upto)
    for ra in range(1, upto):
        for a, _ in buckets[ra]:
            for rb in range(1, upto - ra + 1):
                for b, _ in buckets[rb]:
                    pairs.add((a, b))
    get = S.entries.get
    for a, b in sorted(pairs, key=lambda p: _pair_key(S, p)):
        rhs = get(a, ZERO) * get(b, ZERO)
        if _shuffle_sum(S, a, b) != rhs:
            return False, (a, b)
    return True, None


def _projector(positions: tuple):
    if not positions:
        return lambda w: ()
    if len(positions) == 1:
        i = positions[0]
        return lambda w: (w[i],)
    return operator.itemgetter(*positions)


@lru_cache(maxsize=32)
def _unshuffle_maps(r: int) -> tuple:
    maps = []
    for mask in range(1 << r):
        P = tuple(i for i in range(r) if mask >> i & 1)
        Q = tuple(i for i in range(r) if not mask >> i & 1)
        maps.append((_projector(P), _projector(Q)))
    return tuple(maps)


def delta_coproduct(M: Mould, upto: int | None = None) -> Dict[Tuple[Word, Word], Scalar]:
    """Coproduct ``Delta(M)^{a,b} = sum_n sh(a, b; n) M^n`` as a sparse dict.

    Computed by distributing every stored word over all of its position
    subsets, independently of the shuffle-sum routines.
    """
    upto = M.max_len if upto is None else upto
    out: Dict[Tuple[Word, Word], Scalar] = {}
    get = out.get
    for w, v in M.entries.items():
        r = len(w)
        if r > upto:
            continue
        for pa, pb in _unshuffle_maps(r):
            key = (pa(w), pb(w))
            out[key] = get(key, ZERO) + v
    return {k: v for k, v in out.items() if v}


# ---------------------------------------------------------------------------
# Derivations, eigenvalues, resonance
# ---------------------------------------------------------------------------


def eigen_map(lam: LetterMap, alphabet: Sequence, max_len: int) -> Dict:
    """Normalize an eigenvalue map to a dict ``letter -> Scalar``.

    ``lam`` may be a mapping, a callable, or a :class:`FrequencyModel`
    (letters are then lattice vectors and the range bound is checked for
    words of length ``max_len``).
    """
    if isinstance(lam, FrequencyModel):
        return lam.eigenvalues(alphabet, max_len)
    if callable(lam) and not isinstance(lam, Mapping):
        return {a: as_scalar(lam(a)) for a in alphabet}
    try:
        return {a: as_scalar(lam[a]) for a in alphabet}
    except KeyError as exc:
        raise UnknownLetter(f"no eigenvalue for letter {exc.args[0]!r}") from None


def word_eigenvalue(lam: Mapping, word: Sequence) -> Scalar:
    total = ZERO
    for a in word:
        total = total + lam[a]
    return total


def nabla(M: Mould, phi: LetterMap) -> Mould:
    """Derivation ``M^w -> phi(w) M^w`` with ``phi`` additive over letters."""
    phi = eigen_map(phi, M.alphabet, M.max_len)
    return Mould._make(M, {w: word_eigenvalue(phi, w) * v for w, v in M.entries.items()})


def nabla_length(M: Mould) -> Mould:
    """The derivation multiplying every value by the word length."""
    return Mould._make(M, {w: v * len(w) for w, v in M.entries.items()})


def resonant_part(M: Mould, lam: LetterMap) -> Mould:
    """Keep the values on words whose eigenvalue sum vanishes."""
    lam = eigen_map(lam, M.alphabet, M.max_len)
    return Mould._make(M, {w: v for w, v in M.entries.items()
                           if word_eigenvalue(lam, w).is_zero()})


def gauge_generator(M: Mould, lam: LetterMap) -> Mould:
    """Resonant part of ``exp(-M) x nabla_length(exp(M))`` for alternal ``M``."""
    ok, pair = is_alternal(M)
    if not ok:
        raise NotAlternal(f"mould is not alternal, violating pair {pair}", pair)
    E = mould_exp(M)
    return resonant_part(mould_mul(mould_exp(-M), nabla_length(E)), lam)


def pullback(M: Mould, phi: Mapping, alphabet: Sequence | None = None) -> Mould:
    """Pull a mould back along a letter map ``phi: new alphabet -> M.alphabet``."""
    alphabet = canonical_alphabet(phi.keys() if alphabet is None else alphabet)
    fibres: Dict = {}
    for a in alphabet:
        fibres.setdefault(phi[a], []).append(a)
    out: Dict[Word, Scalar] = {}
    for w, v in M.entries.items():
        choices = [fibres.get(a, []) for a in w]
        for pre in itertools.product(*choices):
            out[pre] = v
    return Mould(alphabet, M.max_len, out)


def truncate_below(M: Mould, m: int) -> Mould:
    """Zero out the values on words of length ``>= m``."""
    return Mould._make(M, {w: v for w, v in M.entries.items() if len(w) < m})


def restrict_letters(M: Mould, letters: Iterable) -> Mould:
    """Zero out values on words using a letter outside ``letters``.

    The result lives on the smaller alphabet.
    """
    keep = set(letters)
    alphabet = [a for a in M.alphabet if a in keep]
    return Mould(alphabet, M.max_len,
                 {w: v for w, v in M.entries.items() if all(a in keep for a in w)})
