"""Slow, independent reference computations for cross-checking.

Nothing here reuses the mould solver or the contraction machinery.  Each
routine recomputes its answer from definitions: permutation enumeration for
shuffles, successive Lie transforms for Birkhoff normal forms, textbook
Rayleigh-Schrodinger sums for matrices, and raw ``ad`` iteration for the
conjugacy.  Size gates keep them fast enough for tests.
"""

from __future__ import annotations

import itertools
from typing import Callable, Dict, Sequence

from .errors import DegenerateSpectrum, OrderViolation, ResonantAmbiguity, TooLong
from .liecore import FilteredElement, HomogeneousProblem
from .moulds import Mould, delta_coproduct
from .scalars import I, ONE, ZERO, Scalar, as_scalar

__all__ = [
    "shuffle_by_permutations", "alternal_by_coproduct", "symmetral_by_coproduct",
    "dimould_product", "deprit_birkhoff", "DepritResult", "rayleigh_schrodinger",
    "direct_conjugacy", "lie_from_associative", "matrix_product",
]

MAX_SHUFFLE_LEN = 8


# ---------------------------------------------------------------------------
# Shuffles and the coproduct
# ---------------------------------------------------------------------------


def shuffle_by_permutations(a: Sequence, b: Sequence, n: Sequence) -> int:
    """Count the interleavings of ``a`` and ``b`` that spell ``n``.

    Each interleaving is a choice of the positions of ``n`` that carry ``a``;
    this enumerates the permutations of ``{1..r}`` increasing on the first
    ``len(a)`` and on the last ``len(b)`` entries, one per position set.
    """
    a, b, n = tuple(a), tuple(b), tuple(n)
    r = len(n)
    if len(a) + len(b) != r:
        return 0
    if r > MAX_SHUFFLE_LEN:
        raise TooLong(f"word of length {r} exceeds the oracle limit {MAX_SHUFFLE_LEN}")
    count = 0
    for perm in itertools.permutations(range(r)):
        first, second = perm[:len(a)], perm[len(a):]
        if list(first) != sorted(first) or list(second) != sorted(second):
            continue
        word = [None] * r
        for letter, pos in zip(a, first):
            word[pos] = letter
        for letter, pos in zip(b, second):
            word[pos] = letter
        if tuple(word) == n:
            count += 1
    return count


def alternal_by_coproduct(M: Mould, upto: int | None = None) -> bool:
    """``Delta(M) = M (x) 1 + 1 (x) M``."""
    upto = M.max_len if upto is None else upto
    if M[()]:
        return False
    D = delta_coproduct(M, upto)
    for (a, b), v in D.items():
        if a and b:
            if v:
                return False
        elif v != M[a + b]:
            return False
    # every stored word w must appear as both (w, ()) and ((), w)
    support = sum(1 for w in M.entries if w and len(w) <= upto)
    edge = sum(1 for a, b in D if not (a and b))
    return edge == 2 * support


def symmetral_by_coproduct(M: Mould, upto: int | None = None) -> bool:
    """``Delta(M) = M (x) M`` and ``M^() = 1``."""
    upto = M.max_len if upto is None else upto
    if M[()] != ONE:
        return False
    D = delta_coproduct(M, upto)
    for (a, b), v in D.items():
        if v != M[a] * M[b]:
            return False
    # each pair of stored words with total length <= upto has a nonzero
    # product, so all of them must be present in the sparse coproduct
    counts = [0] * (upto + 1)
    for w in M.entries:
        if len(w) <= upto:
            counts[len(w)] += 1
    expected = sum(counts[i] * counts[j] for i in range(upto + 1) for j in range(upto + 1 - i))
    return len(D) == expected


def dimould_product(P: Dict, Q: Dict) -> Dict:
    """Product of dimoulds: ``(P x Q)^{a,b} = sum P^{a1,b1} Q^{a2,b2}``."""
    out: Dict = {}
    for (a1, b1), x in P.items():
        for (a2, b2), y in Q.items():
            key = (a1 + a2, b1 + b2)
            out[key] = out.get(key, ZERO) + x * y
    return {k: v for k, v in out.items() if v}


# ---------------------------------------------------------------------------
# Conjugacy by raw ad iteration
# ---------------------------------------------------------------------------


def _ad_power(Y: FilteredElement, X: FilteredElement, k: int, m: int) -> FilteredElement:
    out = X
    for _ in range(k):
        out = Y.bracket(out).truncate(m)
    return out


def direct_conjugacy(problem: HomogeneousProblem, Y: FilteredElement, m: int | None = None):
    """``exp(ad Y)(X0 + B)`` modulo order ``m``, each ``ad_Y^k`` computed afresh.

    Terms are summed from the highest power down.
    """
    m = problem.m if m is None else m
    if not Y.is_zero() and Y.order() < 1:
        raise OrderViolation("Y must have order at least 1")
    X = (problem.X0 + problem.perturbation).truncate(m)
    terms = []
    factorial = 1
    for k in range(m):
        if k:
            factorial *= k
        terms.append(_ad_power(Y, X, k, m).scale(Scalar(1) / factorial))
    acc = X.zero()
    for t in reversed(terms):
        acc = acc + t
    return acc.truncate(m)


# ---------------------------------------------------------------------------
# Lie comould from associative words
# ---------------------------------------------------------------------------


def matrix_product(A, B):
    """Associative product ``A B / (i hbar)`` whose commutator is the quantum bracket."""
    return A.matmul(B).scale(ONE / (I * A.ctx.hbar))


def lie_from_associative(components: Dict, word: Sequence, product: Callable):
    """Signed shuffle/reversal expansion of the Lie comould.

    ``sum over subsets P of positions (-1)^{|Q|} |P| B_{rev(n|Q) n|P}``
    with ``Q`` the complement of ``P`` and ``B_{c_1..c_s} = B_{c_s} ... B_{c_1}``.
    """
    word = tuple(word)
    r = len(word)
    acc = None
    for size in range(1, r + 1):
        for P in itertools.combinations(range(r), size):
            Q = [i for i in range(r) if i not in P]
            assoc = tuple(word[i] for i in reversed(Q)) + tuple(word[i] for i in P)
            prod = components[assoc[0]]
            for n in assoc[1:]:
                prod = product(components[n], prod)
            term = prod.scale((-1) ** len(Q) * size)
            acc = term if acc is None else acc + term
    return acc


# ---------------------------------------------------------------------------
# Birkhoff normal form by successive Lie transforms
# ---------------------------------------------------------------------------


class DepritResult:
    """Normal form, generators and the ambiguity flag of :func:`deprit_birkhoff`."""

    def __init__(self, normal_form, generators, ambiguous):
        self.normal_form = normal_form
        self.generators = generators
        self.ambiguous = ambiguous

    def resonant_part(self):
        """The perturbation part of the normal form (``X0`` removed)."""
        return self.normal_form


def _lie_series(chi, H, m):
    acc = H
    term = H
    k = 1
    while True:
        term = chi.bracket(term).truncate(m).scale(Scalar(1) / k)
        if term.is_zero():
            return acc.truncate(m)
        acc = acc + term
        k += 1


def deprit_birkhoff(omega: Sequence, B, m: int, strict: bool = True) -> DepritResult:
    """Birkhoff normal form of ``H0 + B`` by one Lie transform per order.

    At order ``k`` the part of the current Hamiltonian is split by mode
    ``n = k - l`` of its ``zw`` monomials, and ``chi_k = sum_n H_{k,n} / (i<n,omega>)``
    over the non-resonant modes removes them.  ``omega`` must be a list of
    rationals; ``d <= 2`` and ``m <= 4``.  A resonant mode ``n != 0`` makes the
    normal form non-unique: with ``strict`` this raises ResonantAmbiguity,
    otherwise the result is flagged.
    """
    from .engines.hamiltonian import quadratic_part, to_zw

    d = B.ctx.d
    if d > 2 or m > 4:
        raise TooLong("oracle limited to d <= 2 and m <= 4")
    freqs = [as_scalar(w) for w in omega]
    Bz = to_zw(B)
    H0 = quadratic_part(Bz.ctx, freqs, type(Bz))
    H = Bz.truncate(m)
    ambiguous = False
    generators = []
    for k in range(1, m):
        part = {}
        for key, c in H.terms.items():
            if H.key_order(key) == k:
                part[key] = c
        chi_terms = {}
        for key, c in part.items():
            n = [a - b for a, b in zip(key[2], key[3])]
            lam = I * sum((freqs[j] * n[j] for j in range(d)), ZERO)
            if lam:
                chi_terms[key] = c / lam
            elif any(n):
                ambiguous = True
        chi = Bz._new(chi_terms)
        generators.append(chi)
        if not chi.is_zero():
            # H0 is kept separate so the truncation at order m stays exact
            full = _lie_series(chi, H0 + H, m)
            H = (full - H0).truncate(m)
    if ambiguous and strict:
        raise ResonantAmbiguity("resonant non-action modes make the normal form non-unique")
    return DepritResult(H, generators, ambiguous)


# ---------------------------------------------------------------------------
# Rayleigh-Schrodinger perturbation theory
# ---------------------------------------------------------------------------


def rayleigh_schrodinger(energies: Sequence, B, m: int) -> list:
    """Eigenvalue corrections ``[E_k^(1), ..., E_k^(m-1)]`` for each level ``k``.

    ``B`` is a MatrixOperator ``sum eps^e V_e``; energies must be distinct,
    ``D <= 6`` and ``m <= 4`` (corrections through ``eps^3``).
    """
    E = [as_scalar(x) for x in energies]
    D = len(E)
    if D > 6 or m > 4:
        raise TooLong("oracle limited to D <= 6 and m <= 4")
    if len(set(E)) != D:
        raise DegenerateSpectrum("energies must be distinct")
    V = {e: [[ZERO] * D for _ in range(D)] for e in range(1, 4)}
    for (e, r, c), v in B.terms.items():
        if e < 1:
            raise OrderViolation("perturbation must start at eps^1")
        if e <= 3:
            V[e][r][c] = v
    V1, V2, V3 = V[1], V[2], V[3]
    out = []
    for k in range(D):
        others = [l for l in range(D) if l != k]
        gap = {l: E[k] - E[l] for l in others}
        e1 = V1[k][k]
        e2 = V2[k][k] + sum((V1[k][l] * V1[l][k] / gap[l] for l in others), ZERO)
        e3 = V3[k][k]
        e3 += sum(((V1[k][l] * V2[l][k] + V2[k][l] * V1[l][k]) / gap[l] for l in others), ZERO)
        e3 += sum((V1[k][l] * V1[l][j] * V1[j][k] / (gap[l] * gap[j])
                   for l in others for j in others), ZERO)
        e3 -= e1 * sum((V1[k][l] * V1[l][k] / (gap[l] * gap[l]) for l in others), ZERO)
        out.append([e1, e2, e3][:m - 1])
    return out
