"""Residual checks for the operator identities, on either carrier.

An :class:`OperatedModel` bundles a carrier (truncated series or truncated
tensor series) with P, an optional D and the weight. :func:`residual`
returns left side minus right side; an exact zero means the identity holds
to the trusted order of the result.
"""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from .errors import MissingOperator, NonInvertible, PreconditionViolated, UnsupportedNode
from .series import Series
from .tensor import TensorSeries, deriv_D, reynolds_P
from .volterra import SeparableKernel, apply_D, apply_P, weight

__all__ = [
    "OperatedModel",
    "Identity",
    "residual",
    "is_zero",
    "compose_mdiff",
    "compose_intdiff",
    "twist_check",
    "evaluation_map_residual",
    "neumann_reynolds",
    "random_series",
    "random_tensor",
]


@dataclass(frozen=True)
class OperatedModel:
    """A carrier with operators.

    ``kind`` is ``"series"`` or ``"tensor"``. ``order`` is the working
    truncation (series ``ord`` or tensor ``N``). ``algebra`` is set for
    tensor models.
    """

    kind: str
    order: int
    P: Callable
    D: Callable | None = None
    weight: object = None
    algebra: object = None
    name: str = ""

    def const(self, c):
        c = Fraction(c)
        if self.kind == "series":
            return Series.constant(c, self.order)
        return TensorSeries.unit(self.order, self.algebra) * c

    def one(self):
        return self.const(1)

    def var(self):
        if self.kind == "series":
            return Series.monomial(1, self.order)
        from .algebra import PolyAlg, SeriesAlg

        if isinstance(self.algebra, (PolyAlg, SeriesAlg)):
            return TensorSeries.word((1,), self.order, self.algebra)
        raise UnsupportedNode(f"x has no meaning over {self.algebra.describe()}")

    def divide(self, a, b):
        if self.kind == "series":
            return a * b.inverse()
        raise UnsupportedNode("division by a tensor series")

    def exp(self, a):
        if self.kind == "series":
            return a.exp()
        raise UnsupportedNode("exp of a tensor series")

    # constructors -------------------------------------------------------

    @classmethod
    def volterra(cls, K: SeparableKernel, order: int | None = None, name: str = "") -> "OperatedModel":
        """``(Q[[x]], P_K, D_K, D_K(1))``; D is omitted for non-invertible kernels."""
        order = K.ord if order is None else order
        invertible = K.k_invertible and K.h_invertible
        return cls(
            kind="series",
            order=order,
            P=lambda f: apply_P(K, f),
            D=(lambda f: apply_D(K, f)) if invertible else None,
            weight=weight(K) if invertible else None,
            name=name or "volterra",
        )

    @classmethod
    def free(cls, algebra, N: int) -> "OperatedModel":
        """The truncated free object over ``algebra`` at length ``N``."""
        one = TensorSeries.unit(N, algebra)
        return cls(
            kind="tensor",
            order=N,
            P=reynolds_P,
            D=deriv_D,
            weight=deriv_D(one),
            algebra=algebra,
            name=f"free[{algebra.describe()}]",
        )

    @classmethod
    def from_operators(cls, P, D=None, order: int = 16, weight=None, name: str = "") -> "OperatedModel":
        """Series model from arbitrary operators; the weight defaults to ``D(1)``."""
        if weight is None and D is not None:
            weight = D(Series.one(order))
        return cls(kind="series", order=order, P=P, D=D, weight=weight, name=name)


class Identity(enum.Enum):
    ROTA_BAXTER = "rota-baxter"
    REYNOLDS = "reynolds"
    DIFFERENTIAL = "differential"
    INTDIFF = "intdiff"
    MODIFIED_LEIBNIZ = "modified-leibniz"
    WEIGHTED_REYNOLDS = "weighted-reynolds"
    DP_IDENTITY = "dp-identity"
    MODIFIED_INTDIFF = "modified-intdiff"

    @property
    def needs_D(self) -> bool:
        return self in _NEEDS_D

    @property
    def needs_weight(self) -> bool:
        return self in (Identity.MODIFIED_LEIBNIZ, Identity.WEIGHTED_REYNOLDS)

    @property
    def arity(self) -> int:
        return 1 if self is Identity.DP_IDENTITY else 2

    @classmethod
    def parse(cls, name) -> "Identity":
        if isinstance(name, cls):
            return name
        try:
            return cls(str(name).lower().replace("_", "-"))
        except ValueError:
            raise ValueError(f"unknown identity {name!r}; choose from {[i.value for i in cls]}") from None


_NEEDS_D = {
    Identity.DIFFERENTIAL,
    Identity.INTDIFF,
    Identity.MODIFIED_LEIBNIZ,
    Identity.DP_IDENTITY,
    Identity.MODIFIED_INTDIFF,
}


def residual(model: OperatedModel, identity, inputs: Sequence, scalar_weight=0):
    """Left side minus right side of ``identity`` at ``inputs``.

    ``scalar_weight`` is the scalar ``lambda`` of the Rota-Baxter and
    differential identities; the modified identities use ``model.weight``.
    """
    ident = Identity.parse(identity)
    if ident.needs_D and model.D is None:
        raise MissingOperator(f"{ident.value} needs D, which {model.name or 'the model'} lacks")
    if ident.needs_weight and model.weight is None:
        raise MissingOperator(f"{ident.value} needs a weight element")
    if len(inputs) < ident.arity:
        raise ValueError(f"{ident.value} needs {ident.arity} inputs")
    P, D, lam = model.P, model.D, model.weight
    s = Fraction(scalar_weight)
    x = inputs[0]
    if ident is Identity.DP_IDENTITY:
        return D(P(x)) - x
    y = inputs[1]

    if ident is Identity.ROTA_BAXTER:
        Px, Py = P(x), P(y)
        return Px * Py - P(x * Py) - P(Px * y) - P(x * y) * s
    if ident is Identity.REYNOLDS:
        Px, Py = P(x), P(y)
        return Px * Py - P(x * Py) - P(Px * y) + P(Px * Py)
    if ident is Identity.WEIGHTED_REYNOLDS:
        Px, Py = P(x), P(y)
        return Px * Py - P(Px * y) - P(x * Py) + P(Px * lam * Py)
    if ident is Identity.DIFFERENTIAL:
        return D(x * y) - D(x) * y - x * D(y) - D(x) * D(y) * s
    if ident is Identity.MODIFIED_LEIBNIZ:
        return D(x * y) - D(x) * y - x * D(y) + x * lam * y
    if ident is Identity.INTDIFF:
        PDx, PDy = P(D(x)), P(D(y))
        return PDx * PDy - PDx * y - x * PDy + P(D(x * y))
    if ident is Identity.MODIFIED_INTDIFF:
        PDx, PDy = P(D(x)), P(D(y))
        xy = x * y
        PDxy = P(D(xy))
        PD1 = P(D(model.one()))
        return PDx * PDy - PDx * y - x * PDy + PDxy + PD1 * (xy - PDxy)
    raise AssertionError(ident)


def is_zero(value) -> bool:
    if isinstance(value, TensorSeries):
        return value.reduced().is_zero()
    return value.is_zero()


def first_nonzero(value):
    """``(exponent, coefficient)`` of the lowest nonzero series term, else ``None``."""
    if isinstance(value, Series):
        return value.leading_term()
    v = value.reduced()
    if v.is_zero():
        return None
    word, c = v.sorted_terms()[0]
    return word, c


# --------------------------------------------------------------------------
# composing constructions


@dataclass(frozen=True)
class ModifiedDifferential:
    D: Callable
    weight: Series


def compose_mdiff(d: Callable, lam: Series) -> ModifiedDifferential:
    """``x -> d(lam x)``, a modified differential of weight ``d(lam)``."""

    def D(x):
        return d(lam * x)

    return ModifiedDifferential(D, d(lam))


@dataclass(frozen=True)
class IntDiffPair:
    D: Callable
    Pi: Callable
    weight: Series


def compose_intdiff(d: Callable, p: Callable, lam: Series) -> IntDiffPair:
    """``D = x -> d(x / lam)`` and ``Pi = x -> lam p(x)``.

    ``(D, Pi)`` is a modified integro-differential pair and a differential
    Reynolds pair of weight ``d(1/lam)``.
    """
    if not lam.constant_term:
        raise NonInvertible("lambda must be invertible (nonzero constant term)")
    inv = lam.inverse()

    def D(x):
        return d(inv * x)

    def Pi(x):
        return lam * p(x)

    return IntDiffPair(D, Pi, d(inv))


def evaluation_map_residual(pair: IntDiffPair, x: Series, y: Series) -> Series:
    """``E(1) E(xy) - E(x) E(y)`` for ``E = id - Pi D``; zero when E is twisted-multiplicative."""

    def E(f):
        return f - pair.Pi(pair.D(f))

    one = Series.one(min(x.ord, y.ord))
    return E(one) * E(x * y) - E(x) * E(y)


def _leibniz_holds(op, weight_term, samples) -> bool:
    for a in samples:
        for b in samples:
            r = op(a * b) - op(a) * b - a * op(b)
            if weight_term is not None:
                r = r + weight_term(a, b)
            if not r.is_zero():
                return False
    return True


def twist_check(D: Callable, lam, samples: Sequence[Series]) -> bool:
    """Whether "D is modified differential of weight lam" and "D - lam id is a
    derivation" agree on ``samples``. ``lam`` is a rational scalar.
    """
    lam = Fraction(lam)
    modified = _leibniz_holds(D, lambda a, b: a * b * lam, samples)
    twisted = _leibniz_holds(lambda f: D(f) - f * lam, None, samples)
    return modified == twisted


def twist_report(D: Callable, lam, samples: Sequence[Series]) -> tuple[bool, bool]:
    """``(modified Leibniz holds, D - lam id is a derivation)`` on ``samples``."""
    lam = Fraction(lam)
    return (_leibniz_holds(D, lambda a, b: a * b * lam, samples),
            _leibniz_holds(lambda f: D(f) - f * lam, None, samples))


# --------------------------------------------------------------------------
# Neumann inverse


def neumann_P(d: Callable, N: int) -> Callable:
    """``(id + d)^-1 = sum (-d)^r`` at order ``N``; needs ``d`` to raise valuation."""
    for i in range(N + 1):
        m = Series.monomial(i, N)
        img = d(m)
        if not img.is_zero() and img.valuation() <= i:
            raise PreconditionViolated(f"d does not raise the valuation of x^{i}")

    def P(f):
        f = f.truncate(min(f.ord, N))
        total = f
        term = f
        for _ in range(N + 1):
            term = -d(term)
            term = term.truncate(min(term.ord, N))
            if term.is_zero():
                break
            total = total + term
        return total

    return P


def neumann_reynolds(d: Callable, f: Series, g: Series, N: int) -> Series:
    """Classical Reynolds residual of ``P = (id + d)^-1`` at order ``N``."""
    P = neumann_P(d, N)
    model = OperatedModel.from_operators(P, order=N, name="neumann")
    return residual(model, Identity.REYNOLDS, [f.truncate(N), g.truncate(N)])


# --------------------------------------------------------------------------
# random inputs


def random_rational(rng: random.Random, num: int = 5, den: int = 4) -> Fraction:
    return Fraction(rng.randint(-num, num), rng.randint(1, den))


def random_series(rng: random.Random, order: int, max_valuation: int = 2, terms: int | None = None) -> Series:
    """Small-rational series with valuation at most ``max_valuation``."""
    v = rng.randint(0, min(max_valuation, order))
    c = [Fraction(0)] * (order + 1)
    c[v] = Fraction(rng.choice([-3, -2, -1, 1, 2, 3]), rng.randint(1, 3))
    top = order if terms is None else min(order, v + terms)
    for i in range(v + 1, top + 1):
        c[i] = random_rational(rng)
    return Series(c, order)


def random_tensor(rng: random.Random, algebra, N: int, terms: int = 3, max_index: int | None = None) -> TensorSeries:
    """A few random words of length ``<= N`` with small rational coefficients."""
    bound = algebra.dim if max_index is None else min(algebra.dim, max_index + 1)
    out = {}
    for _ in range(terms):
        length = rng.randint(1, N)
        word = tuple(rng.randrange(bound) for _ in range(length))
        out[word] = out.get(word, 0) + Fraction(rng.choice([-3, -2, -1, 1, 2, 3]), rng.randint(1, 3))
    return TensorSeries(out, N, algebra)
