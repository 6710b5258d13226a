"""Operator expressions: parsing, printing, evaluation and Reynolds rewriting.

Grammar (whitespace-insensitive)::

    expr   := term (("+" | "-") term)*
    term   := factor (("*" | "/") factor)*
    factor := "-" factor | atom ("^" nat)?
    atom   := rational | "x" | ident | "lambda" | "exp(" expr ")"
            | "P(" expr ")" | "D(" expr ")" | "(" expr ")"
    rational := int ("/" nat)?
    ident  := [a-z][a-z0-9]*

Division, unary minus and ``exp`` exist so kernels such as
``k=1/(1+x^2)`` or ``k=exp(-x)`` can be written on the command line.
``x``, ``lambda`` and ``exp`` are reserved words.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .errors import ExprSyntaxError, MissingOperator, UnboundSymbol, UnsupportedNode

__all__ = [
    "Expr",
    "Rat",
    "Var",
    "Sym",
    "Lam",
    "Add",
    "Sub",
    "Mul",
    "Div",
    "Neg",
    "Pow",
    "ApplyP",
    "ApplyD",
    "Exp",
    "parse",
    "unparse",
    "eval_expr",
    "symbols",
    "reynolds_expand",
    "wordsum_to_expr",
    "format_wordsum",
    "p_depth",
]


class Expr:
    __slots__ = ()

    def __str__(self):
        return unparse(self)


@dataclass(frozen=True)
class Rat(Expr):
    value: Fraction

    def __post_init__(self):
        object.__setattr__(self, "value", Fraction(self.value))


@dataclass(frozen=True)
class Var(Expr):
    """The series variable ``x``."""


@dataclass(frozen=True)
class Sym(Expr):
    name: str


@dataclass(frozen=True)
class Lam(Expr):
    """The weight element of the model."""


@dataclass(frozen=True)
class Add(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Sub(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Mul(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Div(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Neg(Expr):
    arg: Expr


@dataclass(frozen=True)
class Pow(Expr):
    base: Expr
    exponent: int

    def __post_init__(self):
        if not isinstance(self.exponent, int) or self.exponent < 0:
            raise ValueError("exponent must be a nonnegative integer")


@dataclass(frozen=True)
class ApplyP(Expr):
    arg: Expr


@dataclass(frozen=True)
class ApplyD(Expr):
    arg: Expr


@dataclass(frozen=True)
class Exp(Expr):
    arg: Expr


# --------------------------------------------------------------------------
# lexer / parser

_TOKEN = re.compile(r"\s*(?:(?P<int>\d+)|(?P<name>[A-Za-z][A-Za-z0-9]*)|(?P<op>[-+*/^()]))")
_RESERVED = {"x", "lambda", "exp"}


@dataclass(frozen=True)
class _Tok:
    kind: str  # "int", "name", "op", "end"
    text: str
    offset: int  # byte offset into the UTF-8 source


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    pos = 0
    # offsets are reported in bytes, so track the encoded prefix length
    while True:
        m = _TOKEN.match(text, pos)
        if m is None:
            rest = text[pos:]
            if not rest.strip():
                break
            bad = pos + (len(rest) - len(rest.lstrip()))
            raise ExprSyntaxError(f"unexpected character {text[bad]!r}",
                                  len(text[:bad].encode()), ("expression",))
        kind = m.lastgroup
        start = m.start(kind)
        toks.append(_Tok(kind, m.group(kind), len(text[:start].encode())))
        pos = m.end()
    toks.append(_Tok("end", "", len(text.encode())))
    return toks


_ATOM_START = ("integer", "x", "identifier", "lambda", "P(", "D(", "exp(", "(", "-")


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def peek(self, k=1) -> _Tok:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def fail(self, expected):
        t = self.tok
        what = "end of input" if t.kind == "end" else repr(t.text)
        raise ExprSyntaxError(f"unexpected {what}", t.offset, expected)

    def accept(self, text) -> bool:
        if self.tok.kind == "op" and self.tok.text == text:
            self.i += 1
            return True
        return False

    def expect(self, text, also=()):
        if not self.accept(text):
            self.fail((text, *also))

    def parse(self) -> Expr:
        e = self.expr()
        if self.tok.kind != "end":
            self.fail(("+", "-", "*", "/", "^", "end of input"))
        return e

    def expr(self) -> Expr:
        e = self.term()
        while True:
            if self.accept("+"):
                e = Add(e, self.term())
            elif self.accept("-"):
                e = Sub(e, self.term())
            else:
                return e

    def term(self) -> Expr:
        e = self.factor()
        while True:
            if self.accept("*"):
                e = Mul(e, self.factor())
            elif self.accept("/"):
                e = Div(e, self.factor())
            else:
                return e

    def factor(self) -> Expr:
        if self.accept("-"):
            return Neg(self.factor())
        base = self.atom()
        if self.accept("^"):
            if self.tok.kind != "int":
                self.fail(("natural number",))
            n = int(self.tok.text)
            self.i += 1
            return Pow(base, n)
        return base

    def call(self, node):
        self.i += 1
        self.expect("(")
        arg = self.expr()
        self.expect(")", ("+", "-", "*", "/", "^"))
        return node(arg)

    def atom(self) -> Expr:
        t = self.tok
        if t.kind == "int":
            self.i += 1
            value = Fraction(int(t.text))
            # "p/q" with two integer literals is a single rational literal
            if (self.tok.kind == "op" and self.tok.text == "/" and self.peek().kind == "int"):
                q = int(self.peek().text)
                if q == 0:
                    raise ExprSyntaxError("zero denominator", self.peek().offset, ("positive integer",))
                self.i += 2
                value /= q
            return Rat(value)
        if t.kind == "name":
            nxt = self.peek()
            is_call = nxt.kind == "op" and nxt.text == "("
            if t.text in ("P", "D") and is_call:
                return self.call(ApplyP if t.text == "P" else ApplyD)
            if t.text == "exp" and is_call:
                return self.call(Exp)
            if t.text == "x":
                self.i += 1
                return Var()
            if t.text == "lambda":
                self.i += 1
                return Lam()
            if t.text[0].islower() and t.text not in _RESERVED:
                self.i += 1
                return Sym(t.text)
            self.fail(_ATOM_START)
        if self.accept("("):
            e = self.expr()
            self.expect(")", ("+", "-", "*", "/", "^"))
            return e
        self.fail(_ATOM_START)


def parse(text: str) -> Expr:
    """Parse ``text``; raises :class:`ExprSyntaxError` with a byte offset."""
    return _Parser(text).parse()


# --------------------------------------------------------------------------
# printer: minimal parentheses, exact inverse of parse on parser output


def _render(e: Expr) -> tuple[str, int]:
    if isinstance(e, Rat):
        v = e.value
        if v < 0:
            return f"-{_wrap(Rat(-v), 3)}", 3
        if v.denominator == 1:
            return str(v.numerator), 5
        return f"{v.numerator}/{v.denominator}", 2
    if isinstance(e, Var):
        return "x", 5
    if isinstance(e, Lam):
        return "lambda", 5
    if isinstance(e, Sym):
        return e.name, 5
    if isinstance(e, Add):
        return f"{_wrap(e.left, 1)} + {_wrap(e.right, 2)}", 1
    if isinstance(e, Sub):
        return f"{_wrap(e.left, 1)} - {_wrap(e.right, 2)}", 1
    if isinstance(e, Mul):
        return f"{_wrap(e.left, 2)}*{_wrap(e.right, 3)}", 2
    if isinstance(e, Div):
        # an integer literal next to "/" would fuse into a rational literal
        left = f"({_render(e.left)[0]})" if _is_int_lit(e.left) else _wrap(e.left, 2)
        right = f"({_render(e.right)[0]})" if isinstance(e.right, Rat) else _wrap(e.right, 3)
        return f"{left}/{right}", 2
    if isinstance(e, Neg):
        return f"-{_wrap(e.arg, 3)}", 3
    if isinstance(e, Pow):
        return f"{_wrap(e.base, 5)}^{e.exponent}", 4
    if isinstance(e, ApplyP):
        return f"P({_render(e.arg)[0]})", 5
    if isinstance(e, ApplyD):
        return f"D({_render(e.arg)[0]})", 5
    if isinstance(e, Exp):
        return f"exp({_render(e.arg)[0]})", 5
    raise UnsupportedNode(f"cannot print {type(e).__name__}")


def _is_int_lit(e: Expr) -> bool:
    return isinstance(e, Rat) and e.value >= 0 and e.value.denominator == 1


def _wrap(e: Expr, min_prec: int) -> str:
    s, p = _render(e)
    return f"({s})" if p < min_prec else s


def unparse(e: Expr) -> str:
    return _render(e)[0]


def symbols(e: Expr) -> set[str]:
    if isinstance(e, Sym):
        return {e.name}
    out: set[str] = set()
    for child in _children(e):
        out |= symbols(child)
    return out


def _children(e: Expr):
    if isinstance(e, (Add, Sub, Mul, Div)):
        return (e.left, e.right)
    if isinstance(e, (Neg, ApplyP, ApplyD, Exp)):
        return (e.arg,)
    if isinstance(e, Pow):
        return (e.base,)
    return ()


# --------------------------------------------------------------------------
# evaluation


def eval_expr(e: Expr | str, model, bindings: Mapping[str, object] | None = None):
    """Evaluate bottom-up in ``model`` (an :class:`~reynolds.identities.OperatedModel`)."""
    if isinstance(e, str):
        e = parse(e)
    bindings = bindings or {}

    def ev(n: Expr):
        if isinstance(n, Rat):
            return model.const(n.value)
        if isinstance(n, Var):
            return model.var()
        if isinstance(n, Sym):
            if n.name not in bindings:
                raise UnboundSymbol(f"symbol {n.name!r} is not bound")
            return bindings[n.name]
        if isinstance(n, Lam):
            if model.weight is None:
                raise MissingOperator("model has no weight element")
            return model.weight
        if isinstance(n, Add):
            return ev(n.left) + ev(n.right)
        if isinstance(n, Sub):
            return ev(n.left) - ev(n.right)
        if isinstance(n, Mul):
            return ev(n.left) * ev(n.right)
        if isinstance(n, Div):
            if isinstance(n.right, Rat):
                if not n.right.value:
                    raise ZeroDivisionError("division by zero literal")
                return ev(n.left) * (1 / n.right.value)
            return model.divide(ev(n.left), ev(n.right))
        if isinstance(n, Neg):
            return -ev(n.arg)
        if isinstance(n, Pow):
            if n.exponent == 0:
                return model.const(1)
            base = ev(n.base)
            out = base
            for _ in range(n.exponent - 1):
                out = out * base
            return out
        if isinstance(n, ApplyP):
            return model.P(ev(n.arg))
        if isinstance(n, ApplyD):
            if model.D is None:
                raise MissingOperator("model has no operator D")
            return model.D(ev(n.arg))
        if isinstance(n, Exp):
            return model.exp(ev(n.arg))
        raise UnsupportedNode(f"cannot evaluate {type(n).__name__}")

    return ev(e)


# --------------------------------------------------------------------------
# Reynolds rewriting
#
# A monomial is a sorted tuple of factors; a factor is ("s", name), ("x",),
# ("l",) or ("P", monomial). A word sum maps monomials to Fractions.
# With weight 1 the rewrite P(a)P(b) -> P(P(a)b) + P(aP(b)) - P(lambda P(a)P(b))
# drops the lambda factor.


def _pcount(mono) -> int:
    return sum(1 + _pcount(f[1]) for f in mono if f[0] == "P")


def p_depth(mono) -> int:
    """Deepest P-nesting in a monomial."""
    return max((1 + p_depth(f[1]) for f in mono if f[0] == "P"), default=0)


def _mul_sums(a: dict, b: dict, cap: int) -> dict:
    out: dict = {}
    for m1, c1 in a.items():
        for m2, c2 in b.items():
            m = tuple(sorted(m1 + m2))
            if _pcount(m) > cap:
                continue
            out[m] = out.get(m, 0) + c1 * c2
    return {m: c for m, c in out.items() if c}


def _add_into(acc: dict, src: dict, scale=1):
    for m, c in src.items():
        acc[m] = acc.get(m, 0) + scale * c
        if not acc[m]:
            del acc[m]


class _Rewriter:
    def __init__(self, unit_weight: bool):
        self.unit_weight = unit_weight
        self.memo: dict = {}

    def normal(self, mono, budget: int) -> dict:
        """Normal form of one monomial: at most one P-factor, arguments normal.

        ``budget`` caps the total P-count of kept terms; an argument inherits
        what the rest of its monomial leaves over, so nesting terminates.
        """
        key = (mono, budget)
        if key in self.memo:
            return self.memo[key]
        total = _pcount(mono)
        atoms = tuple(f for f in mono if f[0] != "P")
        current = {atoms: Fraction(1)}
        for f in mono:
            if f[0] != "P":
                continue
            inner = self.normal(f[1], budget - (total - _pcount(f[1])))
            wrapped = {(("P", m),): c for m, c in inner.items()}
            current = _mul_sums(current, wrapped, budget)
        out: dict = {}
        lam = () if self.unit_weight else (("l",),)
        for m, c in current.items():
            ps = [f for f in m if f[0] == "P"]
            if len(ps) < 2:
                _add_into(out, {m: c})
                continue
            # leftmost redex in the canonical order
            pa, pb = ps[0], ps[1]
            rest = list(m)
            rest.remove(pa)
            rest.remove(pb)
            a, b = pa[1], pb[1]
            news = [
                (tuple(sorted(rest + [("P", tuple(sorted((pa,) + b)))])), c),
                (tuple(sorted(rest + [("P", tuple(sorted(a + (pb,))))])), c),
                (tuple(sorted(rest + [("P", tuple(sorted(lam + (pa, pb))))])), -c),
            ]
            for nm, nc in news:
                if _pcount(nm) <= budget:
                    _add_into(out, self.normal(nm, budget), nc)
        self.memo[key] = out
        return out


def _to_sum(e: Expr, cap: int, unit_weight: bool) -> dict:
    if isinstance(e, Rat):
        return {(): e.value} if e.value else {}
    if isinstance(e, Sym):
        return {(("s", e.name),): Fraction(1)}
    if isinstance(e, Var):
        return {(("x",),): Fraction(1)}
    if isinstance(e, Lam):
        return {(): Fraction(1)} if unit_weight else {(("l",),): Fraction(1)}
    if isinstance(e, (Add, Sub)):
        out = dict(_to_sum(e.left, cap, unit_weight))
        _add_into(out, _to_sum(e.right, cap, unit_weight), 1 if isinstance(e, Add) else -1)
        return out
    if isinstance(e, Neg):
        return {m: -c for m, c in _to_sum(e.arg, cap, unit_weight).items()}
    if isinstance(e, Mul):
        return _mul_sums(_to_sum(e.left, cap, unit_weight), _to_sum(e.right, cap, unit_weight), cap)
    if isinstance(e, Pow):
        base = _to_sum(e.base, cap, unit_weight)
        out = {(): Fraction(1)}
        for _ in range(e.exponent):
            out = _mul_sums(out, base, cap)
        return out
    if isinstance(e, ApplyP):
        inner = _to_sum(e.arg, cap, unit_weight)
        return {(("P", m),): c for m, c in inner.items() if _pcount(m) < cap}
    raise UnsupportedNode(f"{type(e).__name__} is not allowed in a Reynolds expansion")


def reynolds_expand(e: Expr | str, order: int, unit_weight: bool = True) -> dict:
    """Rewrite every product of two P-terms until none is left.

    Terms whose total P-count exceeds ``order + 1`` are dropped: a monomial
    with ``c`` applications of P has valuation at least ``c`` in any model
    where P raises valuation, so nothing below ``x^(order+1)`` is lost. With
    ``unit_weight=False`` the weight stays as an atomic ``lambda`` factor.
    Returns ``{monomial: coefficient}``.
    """
    if isinstance(e, str):
        e = parse(e)
    rw = _Rewriter(unit_weight)
    out: dict = {}
    for m, c in _to_sum(e, order + 1, unit_weight).items():
        _add_into(out, rw.normal(m, order + 1), c)
    return out


def _factor_expr(f) -> Expr:
    if f[0] == "s":
        return Sym(f[1])
    if f[0] == "x":
        return Var()
    if f[0] == "l":
        return Lam()
    return ApplyP(_mono_expr(f[1]))


def _mono_expr(mono) -> Expr:
    if not mono:
        return Rat(1)
    e = _factor_expr(mono[0])
    for f in mono[1:]:
        e = Mul(e, _factor_expr(f))
    return e


def wordsum_to_expr(ws: Mapping) -> Expr:
    """Turn a word sum back into an expression (terms sorted for determinism)."""
    e = None
    for m in sorted(ws, key=lambda m: (_pcount(m), m)):
        c = ws[m]
        body = _mono_expr(m)
        mag = abs(c)
        term = body if mag == 1 else (Rat(mag) if not m else Mul(Rat(mag), body))
        if e is None:
            e = term if c > 0 else Neg(term)
        else:
            e = Add(e, term) if c > 0 else Sub(e, term)
    return Rat(0) if e is None else e


def format_wordsum(ws: Mapping) -> list[dict]:
    """JSON-ready list of ``{"term", "coeff"}`` in canonical order."""
    return [{"term": unparse(_mono_expr(m)), "coeff": str(ws[m])}
            for m in sorted(ws, key=lambda m: (_pcount(m), m))]
