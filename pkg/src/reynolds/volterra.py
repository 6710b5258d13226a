"""Separable Volterra operators ``P_K`` and their modified derivations ``D_K``.

A separable kernel ``K(x, t) = k(x) h(t)`` is given by the pair of series
``(k, h)``; the lower integration limit is always 0, so

    P_K(f) = k(x) * integral_0^x h(t) f(t) dt
    D_K(f) = (1/h) * (f/k)'

``P_K`` never needs ``k`` or ``h`` to be invertible; ``D_K`` and the weight
``D_K(1)`` do.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial

from .errors import NonInvertible, PreconditionViolated
from .series import Series

__all__ = [
    "SeparableKernel",
    "apply_P",
    "apply_D",
    "weight",
    "iterate_P",
    "closed_form_Pn1",
    "rota_baxter_residual",
    "named_kernel",
    "parse_kernel",
    "parse_series",
    "KERNEL_NAMES",
]


@dataclass(frozen=True)
class SeparableKernel:
    k: Series
    h: Series

    @property
    def k_invertible(self) -> bool:
        return self.k.constant_term != 0

    @property
    def h_invertible(self) -> bool:
        return self.h.constant_term != 0

    @property
    def ord(self) -> int:
        return min(self.k.ord, self.h.ord)

    def require_invertible(self):
        if not self.k_invertible:
            raise NonInvertible("k(0) = 0: D_K is undefined for this kernel")
        if not self.h_invertible:
            raise NonInvertible("h(0) = 0: D_K is undefined for this kernel")

    # named kernels ----------------------------------------------------

    @classmethod
    def exp(cls, ord: int) -> "SeparableKernel":
        """``K = e^(t - x)``: the classical Reynolds kernel, weight 1."""
        return cls(Series.exp_linear(-1, ord), Series.exp_linear(1, ord))

    @classmethod
    def unit(cls, ord: int) -> "SeparableKernel":
        """``K = 1``: plain integration, weight 0."""
        return cls(Series.one(ord), Series.one(ord))

    @classmethod
    def cauchy(cls, ord: int) -> "SeparableKernel":
        """``K = 1/(x^2 + 1)``, weight ``2x``."""
        return cls(Series([1, 0, 1], ord).inverse(), Series.one(ord))


KERNEL_NAMES = {
    "exp": SeparableKernel.exp,
    "unit": SeparableKernel.unit,
    "cauchy": SeparableKernel.cauchy,
}


def named_kernel(name: str, ord: int) -> SeparableKernel:
    try:
        return KERNEL_NAMES[name](ord)
    except KeyError:
        raise ValueError(f"unknown kernel {name!r}; choose from {sorted(KERNEL_NAMES)}") from None


def apply_P(K: SeparableKernel, f: Series) -> Series:
    """``k * integrate(h * f)``; trusted to ``min(k.ord, min(h.ord, f.ord) + 1)``."""
    return K.k * (K.h * f).integrate()


def apply_D(K: SeparableKernel, f: Series) -> Series:
    K.require_invertible()
    return K.h.inverse() * (f * K.k.inverse()).derivative()


def weight(K: SeparableKernel) -> Series:
    """The weight ``D_K(1) = -k'/(h k^2)``."""
    K.require_invertible()
    return apply_D(K, Series.one(K.k.ord))


def iterate_P(K: SeparableKernel, f: Series, n: int) -> Series:
    if n < 0:
        raise ValueError("iteration count must be nonnegative")
    for _ in range(n):
        f = apply_P(K, f)
    return f


def closed_form_Pn1(K: SeparableKernel, n: int, mu) -> Series:
    """``mu^n (k/k(0)) sum_{s>=n} L^s/s!`` with ``L = log(k(0)/k)``.

    Valid when ``k`` has a nonzero linear coefficient and ``h = mu (1/k)'``;
    both hypotheses are checked exactly to the kernel's trusted order. ``L``
    has valuation 1, so the sum is cut at ``s = k.ord`` without loss.
    """
    mu = Fraction(mu)
    if n < 0:
        raise ValueError("n must be nonnegative")
    if not mu:
        raise PreconditionViolated("mu must be nonzero")
    k, h = K.k, K.h
    if not K.k_invertible:
        raise PreconditionViolated("k(0) must be nonzero")
    if k.ord < 1 or k[1] == 0:
        raise PreconditionViolated("the coefficient of x in k must be nonzero")
    expected_h = (k.inverse().derivative()) * mu
    m = min(h.ord, expected_h.ord)
    if not h.equal_mod(expected_h, m):
        raise PreconditionViolated(f"h does not equal mu*(1/k)' to order {m}")

    k0 = k.constant_term
    L = (k.inverse() * k0).log()
    total = Series.zero(k.ord)
    power = L**n
    for s in range(n, k.ord + 1):
        total = total + power * Fraction(1, factorial(s))
        power = power * L
    return total * k * (mu**n / k0)


def rota_baxter_residual(K: SeparableKernel, f: Series, g: Series) -> Series:
    """``P(f)P(g) - P(fP(g)) - P(P(f)g)``: the weight-zero Rota-Baxter defect."""
    Pf, Pg = apply_P(K, f), apply_P(K, g)
    return Pf * Pg - apply_P(K, f * Pg) - apply_P(K, Pf * g)


def _series_only_model(ord: int):
    from .errors import UnsupportedNode
    from .identities import OperatedModel

    def no_operator(_):
        raise UnsupportedNode("P and D are not allowed in a kernel factor")

    return OperatedModel(kind="series", order=ord, P=no_operator, name="kernel factor")


def parse_series(text: str, ord: int) -> Series:
    """Evaluate a P/D-free expression in ``x`` as a series trusted to ``ord``."""
    from .expr import eval_expr, parse, symbols

    e = parse(text)
    free = symbols(e)
    if free:
        raise ValueError(f"series expression may only use x, found {sorted(free)}")
    return eval_expr(e, _series_only_model(ord))


def parse_kernel(text: str, ord: int) -> SeparableKernel:
    """``exp``, ``unit``, ``cauchy`` or ``k=<expr>,h=<expr>`` (expressions in ``x``)."""
    text = text.strip()
    if text in KERNEL_NAMES:
        return named_kernel(text, ord)
    parts: dict[str, str] = {}
    for chunk in text.split(","):
        key, sep, value = chunk.partition("=")
        key = key.strip()
        if not sep or key not in ("k", "h") or key in parts:
            raise ValueError(f"kernel must be one of {sorted(KERNEL_NAMES)} or k=<expr>,h=<expr>; got {text!r}")
        parts[key] = value
    if set(parts) != {"k", "h"}:
        raise ValueError("kernel needs both k= and h=")
    return SeparableKernel(parse_series(parts["k"], ord), parse_series(parts["h"], ord))
