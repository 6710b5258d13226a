"""Base algebras ``(A, d)`` for the free construction.

An algebra element is a plain ``dict`` mapping basis indices to nonzero
``Fraction`` coefficients. Basis index 0 is always the unit. Three
instances are provided:

* :class:`ScalarAlg` -- ``A = Q`` with ``d = mu^-1 id`` (or ``d = 0``),
* :class:`PolyAlg` -- ``A = Q[x]`` with a rule ``x^k -> d(x^k)``,
* :class:`SeriesAlg` -- truncated power series with ``d = D_K``.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path
from typing import Callable, Mapping

from .errors import IndexOverflow, PreconditionViolated
from .series import Series

__all__ = [
    "BaseAlgebra",
    "ScalarAlg",
    "PolyAlg",
    "SeriesAlg",
    "alg_mul",
    "alg_d",
    "alg_add",
    "alg_scale",
    "verify_modified_leibniz",
    "verify_twisted_leibniz",
    "parse_algebra",
]

Element = dict  # basis index -> Fraction


def _clean(d: Mapping[int, Fraction]) -> dict:
    return {i: Fraction(c) for i, c in d.items() if c}


def alg_add(*elements: Mapping[int, Fraction]) -> dict:
    out: dict = {}
    for u in elements:
        for i, c in u.items():
            out[i] = out.get(i, 0) + c
    return {i: c for i, c in out.items() if c}


def alg_scale(c, u: Mapping[int, Fraction]) -> dict:
    c = Fraction(c)
    if not c:
        return {}
    return {i: c * a for i, a in u.items()}


class BaseAlgebra:
    """Commutative unital algebra with a countable basis and a modified differential.

    Subclasses supply ``dim``, ``basis_product`` and ``d_on_basis``. The
    weight is always ``d(1)``.
    """

    dim: int  # number of enumerated basis elements

    def unit(self) -> dict:
        return {0: Fraction(1)}

    def basis_product(self, i: int, j: int) -> dict:
        raise NotImplementedError

    def d_on_basis(self, i: int) -> dict:
        raise NotImplementedError

    def lam(self) -> dict:
        return self.d(self.unit())

    def basis(self, bound: int | None = None) -> range:
        return range(self.dim if bound is None else min(bound, self.dim))

    def check_index(self, i: int):
        if not 0 <= i < self.dim:
            raise IndexOverflow(f"basis index {i} outside 0..{self.dim - 1} of {self.describe()}")

    def mul(self, u: Mapping[int, Fraction], v: Mapping[int, Fraction]) -> dict:
        out: dict = {}
        for i, a in u.items():
            for j, b in v.items():
                for k, c in self.basis_product(i, j).items():
                    out[k] = out.get(k, 0) + a * b * c
        return {k: c for k, c in out.items() if c}

    def d(self, u: Mapping[int, Fraction]) -> dict:
        out: dict = {}
        for i, a in u.items():
            for k, c in self.d_on_basis(i).items():
                out[k] = out.get(k, 0) + a * c
        return {k: c for k, c in out.items() if c}

    def reduce(self, u: Mapping[int, Fraction]) -> dict:
        """Drop components beyond the degree where identities are exact.

        Exact algebras return ``u`` unchanged; :class:`SeriesAlg` overrides.
        """
        return dict(u)

    def describe(self) -> str:
        raise NotImplementedError

    def __eq__(self, other):
        return type(self) is type(other) and self.describe() == other.describe()

    def __hash__(self):
        return hash(self.describe())

    def __repr__(self):
        return f"<{type(self).__name__} {self.describe()}>"


class ScalarAlg(BaseAlgebra):
    """``A = Q`` with ``d = mu^-1 id``; ``mu=None`` gives ``d = 0``."""

    dim = 1

    def __init__(self, mu=None):
        if mu is not None:
            mu = Fraction(mu)
            if not mu:
                raise PreconditionViolated("mu must be nonzero (use mu=None for d = 0)")
        self.mu = mu

    def basis_product(self, i, j):
        self.check_index(i)
        self.check_index(j)
        return {0: Fraction(1)}

    def d_on_basis(self, i):
        self.check_index(i)
        return {} if self.mu is None else {0: 1 / self.mu}

    def describe(self):
        return "scalar" if self.mu is None else f"scalar:mu={self.mu}"


def default_poly_rule(k: int) -> dict:
    """``d(x^k) = k x^(k-1) + (k+2) x^(k+1)``: ``D_K`` for ``K = 1/(x^2+1)``."""
    out = {k + 1: Fraction(k + 2)}
    if k:
        out[k - 1] = Fraction(k)
    return out


class PolyAlg(BaseAlgebra):
    """``A = Q[x]`` with basis ``x^i``, ``i <= max_degree``.

    ``rule(k)`` returns ``d(x^k)`` as a ``{degree: coeff}`` dict. Products or
    derivatives that leave the degree range raise :class:`IndexOverflow`:
    ``Q[x]`` is not complete, so nothing is silently truncated.
    """

    def __init__(self, rule: Callable[[int], Mapping[int, Fraction]] | None = None,
                 max_degree: int = 64, name: str | None = None):
        self.rule = rule or default_poly_rule
        self.max_degree = max_degree
        self.dim = max_degree + 1
        self._name = name or ("poly" if rule is None else f"poly:rule={getattr(rule, '__name__', 'custom')}")
        self._cache: dict[int, dict] = {}

    @classmethod
    def from_rule_table(cls, table, max_degree: int = 64) -> "PolyAlg":
        """Build from ``{k: {degree: "p/q"}}`` (a mapping, or a JSON file path).

        Degrees missing from the table fall back to the default rule.
        """
        source = None
        if isinstance(table, (str, Path)):
            source = str(table)
            table = json.loads(Path(table).read_text())
        parsed = {int(k): {int(e): Fraction(c) for e, c in v.items()} for k, v in table.items()}

        def table_rule(k):
            return parsed[k] if k in parsed else default_poly_rule(k)

        name = f"poly:rules={source}" if source else "poly:rules=" + json.dumps(
            {str(k): {str(e): str(c) for e, c in sorted(v.items())} for k, v in sorted(parsed.items())},
            separators=(",", ":"))
        return cls(table_rule, max_degree=max_degree, name=name)

    def basis_product(self, i, j):
        self.check_index(i)
        self.check_index(j)
        self.check_index(i + j)
        return {i + j: Fraction(1)}

    def d_on_basis(self, i):
        self.check_index(i)
        if i not in self._cache:
            out = _clean(self.rule(i))
            for k in out:
                self.check_index(k)
            self._cache[i] = out
        return self._cache[i]

    def describe(self):
        return self._name if self.max_degree == 64 else f"{self._name};max_degree={self.max_degree}"


class SeriesAlg(BaseAlgebra):
    """Truncated series ``Q[[x]]/x^(N+1)`` with ``d = D_K``.

    Products truncate at degree ``N``. Because ``D_K`` lowers degree by one,
    the truncation error of a product shows up in degree ``N`` after
    differentiation, so :meth:`reduce` compares through degree ``N - 1``.
    """

    def __init__(self, kernel, N: int, name: str | None = None):
        from .volterra import apply_D

        if kernel.ord < N + 1:
            raise PreconditionViolated(f"kernel must be trusted to order {N + 1}, got {kernel.ord}")
        kernel.require_invertible()
        self.kernel = kernel
        self.N = N
        self.dim = N + 1
        self._name = name
        self._d = []
        for i in range(N + 1):
            s = apply_D(kernel, Series.monomial(i, N + 1))
            self._d.append({e: c for e, c in enumerate(s.coeffs[: N + 1]) if c})

    def basis_product(self, i, j):
        self.check_index(i)
        self.check_index(j)
        return {i + j: Fraction(1)} if i + j <= self.N else {}

    def d_on_basis(self, i):
        self.check_index(i)
        return self._d[i]

    def reduce(self, u):
        return {i: c for i, c in u.items() if i < self.N}

    def to_series(self, u) -> Series:
        c = [0] * (self.N + 1)
        for i, a in u.items():
            c[i] = a
        return Series(c, self.N)

    def describe(self):
        label = self._name or f"k={self.kernel.k.to_list()},h={self.kernel.h.to_list()}"
        return f"series:kernel={label};N={self.N}"


def alg_mul(A: BaseAlgebra, u, v) -> dict:
    return A.mul(u, v)


def alg_d(A: BaseAlgebra, u) -> dict:
    return A.d(u)


def verify_modified_leibniz(A: BaseAlgebra, bound: int) -> bool:
    """Check ``d(xy) = d(x)y + x d(y) - x d(1) y`` on all basis pairs below ``bound``."""
    lam = A.lam()
    for i in A.basis(bound):
        for j in A.basis(bound):
            ei, ej = {i: Fraction(1)}, {j: Fraction(1)}
            lhs = A.d(A.basis_product(i, j))
            rhs = alg_add(A.mul(A.d(ei), ej), A.mul(ei, A.d(ej)),
                          alg_scale(-1, A.mul(A.mul(ei, lam), ej)))
            if A.reduce(alg_add(lhs, alg_scale(-1, rhs))):
                return False
    return True


def verify_twisted_leibniz(A: BaseAlgebra, bound: int) -> bool:
    """Check that ``u -> d(u) - lam*u`` satisfies the plain Leibniz rule on basis pairs."""
    lam = A.lam()

    def delta(u):
        return alg_add(A.d(u), alg_scale(-1, A.mul(lam, u)))

    for i in A.basis(bound):
        for j in A.basis(bound):
            ei, ej = {i: Fraction(1)}, {j: Fraction(1)}
            lhs = delta(A.basis_product(i, j))
            rhs = alg_add(A.mul(delta(ei), ej), A.mul(ei, delta(ej)))
            if A.reduce(alg_add(lhs, alg_scale(-1, rhs))):
                return False
    return True


def parse_algebra(text: str, order: int = 16) -> BaseAlgebra:
    """Parse ``scalar[:mu=p/q] | poly[:rules=<json file>] | series:kernel=<kernel>``."""
    from .volterra import parse_kernel

    head, _, rest = text.partition(":")
    opts = dict(part.split("=", 1) for part in rest.split(";") if part) if rest else {}
    if head == "scalar":
        return ScalarAlg(opts.get("mu"))
    if head == "poly":
        max_degree = int(opts.get("max_degree", 64))
        if "rules" in opts:
            return PolyAlg.from_rule_table(opts["rules"], max_degree=max_degree)
        return PolyAlg(max_degree=max_degree)
    if head == "series":
        if "kernel" not in opts:
            raise ValueError("series algebra needs kernel=<name or k=...,h=...>")
        N = int(opts.get("N", order))
        return SeriesAlg(parse_kernel(opts["kernel"], N + 1), N, name=opts["kernel"])
    raise ValueError(f"unknown algebra {text!r}")
