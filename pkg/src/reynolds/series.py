"""Truncated formal power series over the rationals.

A :class:`Series` stores the coefficients of ``x**0 .. x**ord`` and nothing
else; ``ord`` is the highest exponent whose coefficient is known exactly.
Every operation propagates that order honestly: differentiation consumes
one order, integration (and multiplication by ``x**k``) produces orders, and
binary operations keep the smaller of the two.
"""

from __future__ import annotations

import json
from fractions import Fraction
from numbers import Rational

from .errors import NonInvertible, OrderError

__all__ = [
    "Series",
    "add",
    "mul",
    "derivative",
    "integrate",
    "inverse",
    "log",
    "exp",
    "equal_mod",
    "to_json",
    "from_json",
]


def _frac(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, (int, Rational, str)):
        return Fraction(c)
    raise TypeError(f"exact rational coefficient expected, got {type(c).__name__}")


class Series:
    """Immutable truncated power series ``sum coeffs[i] x**i`` mod ``x**(ord+1)``.

    ``Series([1, 1], ord=5)`` is ``1 + x`` known exactly to order 5 (all
    higher coefficients up to ``x**5`` are zero). Short coefficient lists are
    zero padded; long ones are cut at ``ord``.
    """

    __slots__ = ("_c", "_ord")

    def __init__(self, coeffs=(), ord: int | None = None):
        c = [_frac(a) for a in coeffs]
        if ord is None:
            ord = max(len(c) - 1, 0)
        if ord < 0:
            raise OrderError("trusted order must be nonnegative")
        if len(c) <= ord:
            c.extend([Fraction(0)] * (ord + 1 - len(c)))
        self._c = tuple(c[: ord + 1])
        self._ord = ord

    # constructors -------------------------------------------------------

    @classmethod
    def constant(cls, c, ord: int) -> "Series":
        return cls([c], ord)

    @classmethod
    def zero(cls, ord: int) -> "Series":
        return cls((), ord)

    @classmethod
    def one(cls, ord: int) -> "Series":
        return cls([1], ord)

    @classmethod
    def monomial(cls, n: int, ord: int, coeff=1) -> "Series":
        """``coeff * x**n``; zero if ``n > ord``."""
        c = [0] * (ord + 1)
        if n <= ord:
            c[n] = coeff
        return cls(c, ord)

    @classmethod
    def geometric(cls, ratio, ord: int) -> "Series":
        """``1/(1 - ratio*x)``."""
        r = _frac(ratio)
        return cls([r**i for i in range(ord + 1)], ord)

    @classmethod
    def exp_linear(cls, rate, ord: int) -> "Series":
        """``exp(rate*x)``."""
        r = _frac(rate)
        c, term = [], Fraction(1)
        for i in range(ord + 1):
            c.append(term)
            term = term * r / (i + 1)
        return cls(c, ord)

    # accessors ------------------------------------------------------------

    @property
    def coeffs(self) -> tuple[Fraction, ...]:
        return self._c

    @property
    def ord(self) -> int:
        return self._ord

    def __getitem__(self, i: int) -> Fraction:
        if i < 0:
            raise IndexError(i)
        if i > self._ord:
            raise OrderError(f"coefficient of x^{i} is beyond trusted order {self._ord}")
        return self._c[i]

    def __len__(self):
        return len(self._c)

    def __iter__(self):
        return iter(self._c)

    @property
    def constant_term(self) -> Fraction:
        return self._c[0]

    def valuation(self) -> int:
        """Lowest exponent with nonzero coefficient; ``ord + 1`` for zero."""
        for i, a in enumerate(self._c):
            if a:
                return i
        return self._ord + 1

    def is_zero(self) -> bool:
        return not any(self._c)

    def leading_term(self) -> tuple[int, Fraction] | None:
        v = self.valuation()
        return None if v > self._ord else (v, self._c[v])

    def truncate(self, n: int) -> "Series":
        if n > self._ord:
            raise OrderError(f"cannot extend trusted order {self._ord} to {n}")
        return Series(self._c[: n + 1], n)

    # ring structure ---------------------------------------------------------

    def _coerce(self, other) -> "Series | None":
        if isinstance(other, Series):
            return other
        if isinstance(other, (int, Rational)):
            return Series([other], self._ord)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        n = min(self._ord, o._ord)
        return Series([self._c[i] + o._c[i] for i in range(n + 1)], n)

    __radd__ = __add__

    def __neg__(self):
        return Series([-a for a in self._c], self._ord)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Rational)):
            s = _frac(other)
            return Series([s * a for a in self._c], self._ord)
        if not isinstance(other, Series):
            return NotImplemented
        n = min(self._ord, other._ord)
        a, b = self._c, other._c
        # skip leading zeros; products of high-valuation inputs are cheap
        va, vb = self.valuation(), other.valuation()
        out = [Fraction(0)] * (n + 1)
        for i in range(va, n + 1 - vb):
            ai = a[i]
            if not ai:
                continue
            for j in range(vb, n + 1 - i):
                bj = b[j]
                if bj:
                    out[i + j] += ai * bj
        return Series(out, n)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Rational)):
            return self * (1 / _frac(other))
        if isinstance(other, Series):
            return self * other.inverse()
        return NotImplemented

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        result = Series.one(self._ord)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def shift(self, k: int) -> "Series":
        """Multiply by ``x**k``; the trusted order rises by ``k``."""
        if k < 0:
            raise ValueError("shift amount must be nonnegative")
        return Series([0] * k + list(self._c), self._ord + k)

    # calculus -----------------------------------------------------------

    def derivative(self) -> "Series":
        if self._ord < 1:
            raise OrderError("derivative of an order-0 series has no trusted coefficient")
        return Series([i * self._c[i] for i in range(1, self._ord + 1)], self._ord - 1)

    def integrate(self) -> "Series":
        """Antiderivative with zero constant term; trusted to ``ord + 1``."""
        return Series([0] + [a / (i + 1) for i, a in enumerate(self._c)], self._ord + 1)

    def inverse(self) -> "Series":
        a0 = self._c[0]
        if not a0:
            raise NonInvertible("series with zero constant term has no inverse")
        n = self._ord
        a = self._c
        inv0 = 1 / a0
        g = [inv0]
        for k in range(1, n + 1):
            s = sum((a[i] * g[k - i] for i in range(1, k + 1) if a[i]), Fraction(0))
            g.append(-s * inv0)
        return Series(g, n)

    def log(self) -> "Series":
        if self._c[0] != 1:
            raise NonInvertible("log needs constant term 1")
        if self._ord == 0:
            return Series.zero(0)
        # f'/f is known to ord-1, so its antiderivative is known to ord
        return (self.derivative() * self.inverse()).integrate()

    def exp(self) -> "Series":
        """``exp(f)`` for ``f(0) = 0``, via ``g' = f' g``."""
        if self._c[0]:
            raise NonInvertible("exp needs zero constant term (no exact exp of a nonzero rational)")
        f = self._c
        g = [Fraction(1)]
        for n in range(1, self._ord + 1):
            s = sum((k * f[k] * g[n - k] for k in range(1, n + 1) if f[k]), Fraction(0))
            g.append(s / n)
        return Series(g, self._ord)

    # comparison / serialization ---------------------------------------

    def equal_mod(self, other: "Series", n: int) -> bool:
        if n > self._ord or n > other._ord:
            raise OrderError(f"order {n} exceeds trusted orders {self._ord}, {other._ord}")
        return self._c[: n + 1] == other._c[: n + 1]

    def __eq__(self, other):
        if isinstance(other, Series):
            return self._ord == other._ord and self._c == other._c
        return NotImplemented

    def __hash__(self):
        return hash((self._c, self._ord))

    def to_list(self) -> list[str]:
        return [str(a) for a in self._c]

    def __repr__(self):
        return f"Series({self.to_list()}, ord={self._ord})"

    def __str__(self):
        terms = []
        for i, a in enumerate(self._c):
            if not a:
                continue
            mono = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
            if mono and a == 1:
                body = mono
            elif mono and a == -1:
                body = "-" + mono
            else:
                body = f"({a})*{mono}" if mono and a.denominator != 1 else (f"{a}*{mono}" if mono else str(a))
            terms.append(body)
        head = " + ".join(terms).replace("+ -", "- ") if terms else "0"
        return f"{head} + O(x^{self._ord + 1})"


# functional spellings ------------------------------------------------------


def add(f: Series, g: Series) -> Series:
    return f + g


def mul(f: Series, g: Series) -> Series:
    return f * g


def derivative(f: Series) -> Series:
    return f.derivative()


def integrate(f: Series) -> Series:
    return f.integrate()


def inverse(f: Series) -> Series:
    return f.inverse()


def log(f: Series) -> Series:
    return f.log()


def exp(f: Series) -> Series:
    return f.exp()


def equal_mod(f: Series, g: Series, n: int) -> bool:
    return f.equal_mod(g, n)


def to_json(f: Series) -> str:
    """JSON array of ``"p/q"`` strings, index = exponent."""
    return json.dumps(f.to_list())


def from_json(text: str) -> Series:
    data = json.loads(text)
    if not isinstance(data, list) or not all(isinstance(s, str) for s in data):
        raise ValueError("series JSON must be an array of rational strings")
    return Series([Fraction(s) for s in data])
