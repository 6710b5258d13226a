"""The universal map from the free object into a Volterra model.

A word ``a0 ⊗ a1 ⊗ ... ⊗ an`` goes to the iterated integral
``i(a0) P_K(i(a1) P_K(... P_K(i(an))))``, where ``i`` embeds base-algebra
basis elements as series.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .algebra import BaseAlgebra, PolyAlg, ScalarAlg, SeriesAlg
from .errors import EmbeddingUndefined, PreconditionViolated
from .series import Series
from .tensor import TensorSeries, diamond
from .volterra import SeparableKernel, apply_D, apply_P, weight

__all__ = [
    "StructureMap",
    "default_embedding",
    "evaluate",
    "check_homomorphism",
    "reynolds_square_expansion",
]


def default_embedding(algebra: BaseAlgebra, order: int) -> Callable[[int], Series]:
    """Scalars map to constants; polynomial and series bases map to ``x^i``."""
    if isinstance(algebra, ScalarAlg):
        def embed(i):
            if i != 0:
                raise EmbeddingUndefined(i)
            return Series.one(order)
    elif isinstance(algebra, (PolyAlg, SeriesAlg)):
        def embed(i):
            algebra.check_index(i)
            return Series.monomial(i, order)
    else:
        raise EmbeddingUndefined(f"no default embedding for {algebra.describe()}")
    return embed


@dataclass
class StructureMap:
    """Kernel, base algebra and an embedding ``i`` with ``i d = D_K i``.

    ``order`` is the series truncation of the target. ``check_bound`` basis
    elements are tested for the intertwining relation at construction;
    pass ``check_bound=0`` to skip it (e.g. for kernels without ``D_K``).
    """

    kernel: SeparableKernel
    algebra: BaseAlgebra
    order: int
    embedding: Callable[[int], Series] | None = None
    check_bound: int = 6
    _memo: dict = field(default_factory=dict, init=False, repr=False)

    def __post_init__(self):
        if self.kernel.ord < self.order:
            raise PreconditionViolated(f"kernel trusted to {self.kernel.ord} < order {self.order}")
        if self.embedding is None:
            self.embedding = default_embedding(self.algebra, self.order)
        if self.check_bound and self.kernel.k_invertible and self.kernel.h_invertible:
            self.check_intertwining(self.check_bound)

    def embed(self, i: int) -> Series:
        if i not in self._memo:
            try:
                self._memo[i] = self.embedding(i)
            except (KeyError, IndexError) as exc:
                raise EmbeddingUndefined(f"embedding undefined on basis index {i}") from exc
        return self._memo[i]

    def embed_element(self, u) -> Series:
        total = Series.zero(self.order)
        for i, c in u.items():
            total = total + self.embed(i) * c
        return total

    def check_intertwining(self, bound: int):
        """Raise unless ``i(d e) = D_K(i(e))`` below the working order for basis ``e``."""
        for i in self.algebra.basis(bound):
            lhs = apply_D(self.kernel, self.embed(i))
            rhs = self.embed_element(self.algebra.d({i: Fraction(1)}))
            # the algebra may be truncated (SeriesAlg) below the target order
            n = min(lhs.ord, rhs.ord, getattr(self.algebra, "N", lhs.ord + 1) - 1)
            if n >= 0 and not lhs.equal_mod(rhs, n):
                raise PreconditionViolated(f"embedding does not intertwine d with D_K on basis {i}")


def evaluate(sm: StructureMap, u: TensorSeries) -> Series:
    """Linear extension of the iterated-integral formula, trusted to ``sm.order``.

    A word of length ``L`` has valuation at least ``L - 1``, so words longer
    than ``order + 1`` are skipped.
    """
    suffix: dict = {}

    def value(word):
        if word not in suffix:
            head = sm.embed(word[0])
            if len(word) == 1:
                suffix[word] = head
            else:
                suffix[word] = head * apply_P(sm.kernel, value(word[1:]))
        return suffix[word]

    total = Series.zero(sm.order)
    for word, c in u.sorted_terms():
        if len(word) - 1 > sm.order:
            continue
        total = total + value(word) * c
    return total.truncate(min(total.ord, sm.order))


def check_homomorphism(sm: StructureMap, u: TensorSeries, v: TensorSeries, order: int) -> Series:
    """``evaluate(u ⋄ v) - evaluate(u) evaluate(v)`` truncated at ``order``.

    Both truncated tensors must carry words up to length ``order + 1``.
    """
    if order > min(u.N, v.N) - 1:
        raise PreconditionViolated(f"order {order} needs tensor truncation N >= {order + 1}")
    if order > sm.order:
        raise PreconditionViolated(f"order {order} exceeds the structure map order {sm.order}")
    lhs = evaluate(sm, diamond(u, v))
    rhs = evaluate(sm, u) * evaluate(sm, v)
    return (lhs - rhs).truncate(order)


def reynolds_square_expansion(K: SeparableKernel, f: Series, M: int) -> Series:
    """Partial sum ``2 sum_{n=1}^{M} (-1)^(n-1) P_K^n(f P_K(f))``; needs weight 1."""
    w = weight(K)
    if not w.equal_mod(Series.one(w.ord), w.ord):
        raise PreconditionViolated("the square expansion needs a kernel of weight 1")
    seed = f * apply_P(K, f)
    total = Series.zero(min(K.ord, seed.ord + 1))
    term = seed
    for n in range(1, M + 1):
        term = apply_P(K, term)
        total = total + term * (2 if n % 2 else -2)
    return total
