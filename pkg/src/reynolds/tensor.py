"""The free object ``Ш(A) = prod_{k>=1} A^{⊗k}`` truncated at tensor length ``N``.

Words are tuples of basis indices of the base algebra; a
:class:`TensorSeries` is a sparse ``{word: Fraction}`` map holding every
word of length ``<= N``. The ideals ``Ш(A)_n`` (words of length ``> n``) are
stable under every operation here, so the truncated quotient is an honest
algebra and all identities hold exactly in it. The one exception is
:func:`deriv_D`, which maps length ``N+1`` words (never stored) to length
``N``; its results are therefore trusted only to ``N - 1``.

Multiplication: ``a * b`` on two tensor series is the diamond product
``a_0 b_0 ⊗ (a' ш̂ b')``.
"""

from __future__ import annotations

import json
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, product
from numbers import Rational
from typing import Iterable, Mapping

from .algebra import BaseAlgebra, parse_algebra
from .errors import AlgebraMismatch

__all__ = [
    "TensorSeries",
    "classic_shuffle",
    "complete_shuffle",
    "complete_shuffle_direct",
    "diamond",
    "reynolds_P",
    "deriv_D",
    "star",
    "q_lambda",
    "q_lambda_inv",
    "nested_form",
    "shuffle_words",
    "complete_shuffle_words",
    "complete_shuffle_words_direct",
]

Word = tuple


def _accumulate(out: dict, word: Word, c: Fraction):
    v = out.get(word, 0) + c
    if v:
        out[word] = v
    else:
        out.pop(word, None)


class TensorSeries:
    """Element of ``Ш(A)`` modulo words longer than ``N``."""

    __slots__ = ("_terms", "_N", "_A")

    def __init__(self, terms: Mapping[Word, object] | Iterable, N: int, algebra: BaseAlgebra):
        if N < 1:
            raise ValueError("truncation order N must be at least 1")
        items = terms.items() if isinstance(terms, Mapping) else terms
        clean: dict = {}
        for w, c in items:
            w = tuple(int(i) for i in w)
            if not w:
                raise ValueError("tensor words must be nonempty")
            if len(w) > N:
                continue
            for i in w:
                algebra.check_index(i)
            _accumulate(clean, w, Fraction(c))
        self._terms = clean
        self._N = N
        self._A = algebra

    # constructors ---------------------------------------------------

    @classmethod
    def zero(cls, N, algebra):
        return cls({}, N, algebra)

    @classmethod
    def word(cls, w, N, algebra, coeff=1):
        return cls({tuple(w): coeff}, N, algebra)

    @classmethod
    def from_element(cls, u: Mapping[int, Fraction], N, algebra):
        """Embed an algebra element as a combination of length-1 words."""
        return cls({(i,): c for i, c in u.items()}, N, algebra)

    @classmethod
    def unit(cls, N, algebra):
        return cls.from_element(algebra.unit(), N, algebra)

    @classmethod
    def _raw(cls, terms: dict, N: int, algebra: BaseAlgebra) -> "TensorSeries":
        # terms already clean, words already within length N
        obj = cls.__new__(cls)
        obj._terms = terms
        obj._N = N
        obj._A = algebra
        return obj

    # accessors ------------------------------------------------------

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    @property
    def N(self) -> int:
        return self._N

    @property
    def algebra(self) -> BaseAlgebra:
        return self._A

    def items(self):
        return self._terms.items()

    def __len__(self):
        return len(self._terms)

    def __getitem__(self, w) -> Fraction:
        return self._terms.get(tuple(w), Fraction(0))

    def is_zero(self) -> bool:
        return not self._terms

    def valuation(self) -> int:
        """Minimal stored word length; ``N + 1`` for zero."""
        return min((len(w) for w in self._terms), default=self._N + 1)

    def truncate(self, n: int) -> "TensorSeries":
        if n > self._N:
            raise ValueError(f"cannot extend truncation order {self._N} to {n}")
        return TensorSeries._raw({w: c for w, c in self._terms.items() if len(w) <= n}, n, self._A)

    def reduced(self) -> "TensorSeries":
        """Apply the base algebra's :meth:`~BaseAlgebra.reduce` in the first slot.

        Only :class:`~reynolds.algebra.SeriesAlg` drops anything.
        """
        out: dict = {}
        for w, c in self._terms.items():
            for i, a in self._A.reduce({w[0]: Fraction(1)}).items():
                _accumulate(out, (i,) + w[1:], a * c)
        return TensorSeries._raw(out, self._N, self._A)

    # linear structure -------------------------------------------------

    def _compatible(self, other: "TensorSeries") -> int:
        if not isinstance(other, TensorSeries):
            raise TypeError("tensor series expected")
        if other._A != self._A:
            raise AlgebraMismatch(f"{self._A.describe()} vs {other._A.describe()}")
        return min(self._N, other._N)

    def __add__(self, other):
        if not isinstance(other, TensorSeries):
            return NotImplemented
        N = self._compatible(other)
        out = {w: c for w, c in self._terms.items() if len(w) <= N}
        for w, c in other._terms.items():
            if len(w) <= N:
                _accumulate(out, w, c)
        return TensorSeries._raw(out, N, self._A)

    def __neg__(self):
        return TensorSeries._raw({w: -c for w, c in self._terms.items()}, self._N, self._A)

    def __sub__(self, other):
        if not isinstance(other, TensorSeries):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, TensorSeries):
            return diamond(self, other)
        if isinstance(other, (int, Rational)):
            s = Fraction(other)
            if not s:
                return TensorSeries.zero(self._N, self._A)
            return TensorSeries._raw({w: s * c for w, c in self._terms.items()}, self._N, self._A)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, Rational)):
            return self * other
        return NotImplemented

    def __eq__(self, other):
        if not isinstance(other, TensorSeries):
            return NotImplemented
        return self._N == other._N and self._A == other._A and self._terms == other._terms

    def __hash__(self):
        return hash((self._N, frozenset(self._terms.items())))

    # serialization ----------------------------------------------------

    def sorted_terms(self):
        return sorted(self._terms.items(), key=lambda wc: (len(wc[0]), wc[0]))

    def to_dict(self) -> dict:
        return {
            "header": {"N": self._N, "algebra": self._A.describe()},
            "terms": [{"word": list(w), "coeff": str(c)} for w, c in self.sorted_terms()],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str, algebra: BaseAlgebra | None = None) -> "TensorSeries":
        data = json.loads(text)
        header = data["header"]
        A = algebra if algebra is not None else parse_algebra(header["algebra"])
        return cls({tuple(t["word"]): Fraction(t["coeff"]) for t in data["terms"]}, int(header["N"]), A)

    def __repr__(self):
        body = " + ".join(f"{c}*{'⊗'.join(map(str, w))}" for w, c in self.sorted_terms()) or "0"
        return f"TensorSeries({body}; N={self._N}, {self._A.describe()})"


# word-level kernels ------------------------------------------------------


def _cache(A: BaseAlgebra, name: str) -> dict:
    # memo tables live on the algebra instance; the algebra is immutable
    store = A.__dict__.setdefault("_tensor_caches", {})
    return store.setdefault(name, {})


def shuffle_words(u: Word, v: Word, L: int) -> dict:
    """Classic shuffle ``u ш v`` of two (possibly empty) words, lengths ``<= L``."""
    if len(u) + len(v) > L:
        return {}
    out: dict = {}
    for pos in combinations(range(len(u) + len(v)), len(u)):
        w, iu, iv, ps = [], 0, 0, set(pos)
        for p in range(len(u) + len(v)):
            if p in ps:
                w.append(u[iu])
                iu += 1
            else:
                w.append(v[iv])
                iv += 1
        _accumulate(out, tuple(w), Fraction(1))
    return out


def complete_shuffle_words(A: BaseAlgebra, u: Word, v: Word, L: int) -> dict:
    """``u ш̂ v`` by the recursion ``a_1⊗(u'ш̂v) + b_1⊗(uш̂v') - λ⊗(uш̂v)``.

    The self-referential ``-λ`` branch always lengthens words by one, so
    recursing on the length budget ``L`` terminates. Words may be empty
    (the unit of the shuffle algebra).
    """
    memo = _cache(A, "complete")
    key = (u, v, L)
    if key in memo:
        return memo[key]
    if len(u) + len(v) > L:
        res: dict = {}
    elif not u or not v:
        res = {u or v: Fraction(1)}
    else:
        res = {}
        for w, c in complete_shuffle_words(A, u[1:], v, L - 1).items():
            _accumulate(res, (u[0],) + w, c)
        for w, c in complete_shuffle_words(A, u, v[1:], L - 1).items():
            _accumulate(res, (v[0],) + w, c)
        lam = _lam(A)
        if lam:
            for w, c in complete_shuffle_words(A, u, v, L - 1).items():
                for i, a in lam.items():
                    _accumulate(res, (i,) + w, -a * c)
    memo[key] = res
    return res


def _lam(A: BaseAlgebra) -> dict:
    memo = _cache(A, "lam")
    if "lam" not in memo:
        memo["lam"] = A.lam()
    return memo["lam"]


def _tensor_powers(elem: dict, kmax: int) -> list:
    """``powers[k]`` lists ``(word, coeff)`` for the expansion of ``elem^{⊗k}``."""
    powers = [[((), Fraction(1))]]
    for _ in range(kmax):
        powers.append([(w + (i,), c * a) for w, c in powers[-1] for i, a in elem.items()])
    return powers


@lru_cache(maxsize=None)
def _weak_compositions(parts: int, max_total: int) -> tuple:
    """All tuples of ``parts`` nonnegative ints with sum ``<= max_total``."""
    if parts == 0:
        return ((),)
    return tuple((first,) + rest
                 for first in range(max_total + 1)
                 for rest in _weak_compositions(parts - 1, max_total - first))


def complete_shuffle_words_direct(A: BaseAlgebra, u: Word, v: Word, L: int) -> dict:
    """``u ш̂ v`` by direct enumeration of extended shuffles.

    For each shuffle of ``u`` and ``v``, insert ``(-λ)^{⊗i_j}`` before the
    ``j``-th letter for every ``j`` up to the first position holding the last
    letter of ``u`` or of ``v``; no insertion after that. Independent of
    :func:`complete_shuffle_words`.
    """
    m, n = len(u), len(v)
    if m + n > L:
        return {}
    if not u or not v:
        return {u or v: Fraction(1)}
    neg_lam = {i: -a for i, a in _lam(A).items()}
    slack = L - m - n if neg_lam else 0
    powers = _tensor_powers(neg_lam, slack)
    out: dict = {}
    for pos in combinations(range(m + n), m):
        ps = set(pos)
        letters, iu, iv = [], 0, 0
        for p in range(m + n):
            if p in ps:
                letters.append(u[iu])
                iu += 1
            else:
                letters.append(v[iv])
                iv += 1
        last_u = pos[-1]
        last_v = max(p for p in range(m + n) if p not in ps)
        stop = min(last_u, last_v) + 1  # number of slots that admit insertions
        fixed_tail = tuple(letters[stop:])
        for ins in _weak_compositions(stop, slack):
            # the coefficient only depends on the whole inserted λ-word
            for lam_word, coeff in powers[sum(ins)]:
                word, t = [], 0
                for j, i in enumerate(ins):
                    word.extend(lam_word[t:t + i])
                    word.append(letters[j])
                    t += i
                _accumulate(out, tuple(word) + fixed_tail, coeff)
    return out


# bilinear extensions -------------------------------------------------------


def _bilinear(a: TensorSeries, b: TensorSeries, kernel) -> TensorSeries:
    N = a._compatible(b)
    out: dict = {}
    for wa, ca in a.items():
        for wb, cb in b.items():
            for w, c in kernel(wa, wb, N).items():
                _accumulate(out, w, ca * cb * c)
    return TensorSeries._raw(out, N, a.algebra)


def classic_shuffle(a: TensorSeries, b: TensorSeries) -> TensorSeries:
    return _bilinear(a, b, shuffle_words)


def complete_shuffle(a: TensorSeries, b: TensorSeries) -> TensorSeries:
    A = a.algebra
    return _bilinear(a, b, lambda u, v, L: complete_shuffle_words(A, u, v, L))


def complete_shuffle_direct(a: TensorSeries, b: TensorSeries) -> TensorSeries:
    A = a.algebra
    return _bilinear(a, b, lambda u, v, L: complete_shuffle_words_direct(A, u, v, L))


def diamond(a: TensorSeries, b: TensorSeries) -> TensorSeries:
    """``a ⋄ b = a_0 b_0 ⊗ (a' ш̂ b')`` extended bilinearly."""
    A = a.algebra

    def kernel(u, v, L):
        out: dict = {}
        tail = complete_shuffle_words(A, u[1:], v[1:], L - 1)
        for k, ck in A.basis_product(u[0], v[0]).items():
            for w, c in tail.items():
                _accumulate(out, (k,) + w, ck * c)
        return out

    return _bilinear(a, b, kernel)


def reynolds_P(a: TensorSeries) -> TensorSeries:
    """Prepend the unit slot: ``w -> 1_A ⊗ w``."""
    N = a.N
    return TensorSeries._raw({(0,) + w: c for w, c in a.items() if len(w) < N}, N, a.algebra)


def deriv_D(a: TensorSeries) -> TensorSeries:
    """``D(a_0⊗…⊗a_k) = d(a_0)⊗a_1… + a_0a_1⊗a_2… - d(1)a_0⊗a_1…``; ``D(a_0) = d(a_0)``.

    Result truncated at ``N - 1``.
    """
    A, N = a.algebra, a.N - 1
    if N < 1:
        raise ValueError("deriv_D needs N >= 2")
    lam = A.lam()
    out: dict = {}
    for w, c in a.items():
        head, rest = w[0], w[1:]
        if len(w) <= N:
            for k, ck in A.d_on_basis(head).items():
                _accumulate(out, (k,) + rest, c * ck)
            if rest:
                for k, ck in A.mul(lam, {head: Fraction(1)}).items():
                    _accumulate(out, (k,) + rest, -c * ck)
        if rest and len(w) - 1 <= N:
            for k, ck in A.basis_product(head, rest[0]).items():
                _accumulate(out, (k,) + rest[1:], c * ck)
    return TensorSeries._raw(out, N, A)


def star(x: TensorSeries, y: TensorSeries) -> TensorSeries:
    """``x ⋆ y = P(x)y + xP(y) - P(x)λP(y)``, so that ``P(x)P(y) = P(x ⋆ y)``."""
    x.truncate(min(x.N, y.N))  # validates compatibility early
    lam = TensorSeries.from_element(x.algebra.lam(), x.N, x.algebra)
    Px, Py = reynolds_P(x), reynolds_P(y)
    return Px * y + x * Py - Px * lam * Py


def _prepend_power(a: TensorSeries, scale_elem: dict, r: int) -> dict:
    """Terms of ``(scale_elem)^{⊗r} ⊗ a`` (words kept within ``a.N``)."""
    out: dict = {}
    support = list(scale_elem.items())
    for w, c in a.items():
        if len(w) + r > a.N:
            continue
        for choice in product(support, repeat=r):
            coeff = c
            for _, s in choice:
                coeff *= s
            _accumulate(out, tuple(i for i, _ in choice) + w, coeff)
    return out


def q_lambda(a: TensorSeries) -> TensorSeries:
    """``a -> a + 2λ ⊗ a``."""
    lam2 = {i: 2 * c for i, c in a.algebra.lam().items()}
    return a + TensorSeries._raw(_prepend_power(a, lam2, 1), a.N, a.algebra)


def q_lambda_inv(a: TensorSeries) -> TensorSeries:
    """``a -> a + sum_{r>=1} (-2λ)^{⊗r} ⊗ a``, the inverse of :func:`q_lambda`."""
    m2lam = {i: -2 * c for i, c in a.algebra.lam().items()}
    total = a
    if not m2lam:
        return total
    for r in range(1, a.N):
        total = total + TensorSeries._raw(_prepend_power(a, m2lam, r), a.N, a.algebra)
    return total


def nested_form(word: Word, N: int, A: BaseAlgebra) -> TensorSeries:
    """Rebuild ``a_0⊗…⊗a_n`` as ``a_0 ⋄ P(a_1 ⋄ P(⋯ P(a_n)⋯))``."""
    if not word:
        raise ValueError("word must be nonempty")
    acc = TensorSeries.word((word[-1],), N, A)
    for i in reversed(word[:-1]):
        acc = TensorSeries.word((i,), N, A) * reynolds_P(acc)
    return acc
