import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from reynolds.algebra import PolyAlg, ScalarAlg
from reynolds.errors import ExprSyntaxError, MissingOperator, UnboundSymbol, UnsupportedNode
from reynolds.expr import (
    Add,
    ApplyD,
    ApplyP,
    Div,
    Exp,
    Lam,
    Mul,
    Neg,
    Pow,
    Rat,
    Sub,
    Sym,
    Var,
    eval_expr,
    format_wordsum,
    p_depth,
    parse,
    reynolds_expand,
    symbols,
    unparse,
    wordsum_to_expr,
)
from reynolds.identities import OperatedModel, random_series, random_tensor
from reynolds.series import Series
from reynolds.tensor import TensorSeries
from reynolds.volterra import SeparableKernel, apply_P

F = Fraction
f = ("s", "f")


def nest_P(mono, n):
    for _ in range(n):
        mono = (("P", mono),)
    return mono


# parsing -------------------------------------------------------------------


def test_parse_examples():
    assert parse("P(f)^2") == Pow(ApplyP(Sym("f")), 2)
    assert parse("1/2*x") == Mul(Rat(F(1, 2)), Var())
    assert parse("x/2") == Div(Var(), Rat(2))
    assert parse("a - b - c") == Sub(Sub(Sym("a"), Sym("b")), Sym("c"))
    assert parse("-x^2") == Neg(Pow(Var(), 2))
    assert parse("D(P(lambda*g))") == ApplyD(ApplyP(Mul(Lam(), Sym("g"))))
    assert parse("exp(-x)") == Exp(Neg(Var()))
    assert parse(" 2 +  3*y ") == Add(Rat(2), Mul(Rat(3), Sym("y")))


def test_unparse_minimal_parentheses():
    assert unparse(parse("(a*b)*c")) == "a*b*c"
    assert unparse(parse("a*(b*c)")) == "a*(b*c)"
    assert unparse(parse("(a+b)^2")) == "(a + b)^2"
    assert unparse(Div(Rat(1), Rat(2))) == "(1)/(2)"
    assert unparse(Pow(Rat(F(1, 3)), 2)) == "(1/3)^2"


@pytest.mark.parametrize("text,offset,expected", [
    ("P(f", 3, {")"}),
    ("1 +", 3, {"x", "("}),
    ("f g", 2, {"+", "end of input"}),
    ("x^y", 2, {"natural number"}),
    ("f # g", 2, {"expression"}),
    ("\u00a0\u00a0#", 4, {"expression"}),
    ("1/0", 2, {"positive integer"}),
])
def test_syntax_errors(text, offset, expected):
    with pytest.raises(ExprSyntaxError) as info:
        parse(text)
    assert info.value.offset == offset
    assert expected <= set(info.value.expected)


def test_symbols():
    assert symbols(parse("P(f*g) + x*lambda - h^2")) == {"f", "g", "h"}


names = st.sampled_from(["f", "g", "h1", "ab"])
leaves = st.one_of(
    st.fractions(min_value=0, max_value=20, max_denominator=6).map(Rat),
    st.just(Var()),
    st.just(Lam()),
    names.map(Sym),
)


def extend(children):
    return st.one_of(
        st.builds(Add, children, children),
        st.builds(Sub, children, children),
        st.builds(Mul, children, children),
        st.builds(Div, children, children),
        st.builds(Neg, children),
        st.builds(Pow, children, st.integers(0, 4)),
        st.builds(ApplyP, children),
        st.builds(ApplyD, children),
        st.builds(Exp, children),
    )


asts = st.recursive(leaves, extend, max_leaves=12)


@given(asts)
def test_round_trip(e):
    assert parse(unparse(e)) == e


@given(asts)
def test_printing_is_a_fixed_point(e):
    s = unparse(e)
    assert unparse(parse(s)) == s


# evaluation ------------------------------------------------------------------

ORD = 10


def test_eval_series():
    K = SeparableKernel.exp(ORD)
    model = OperatedModel.volterra(K)
    g = random_series(random.Random(1), ORD)
    assert eval_expr("P(g)", model, {"g": g}) == apply_P(K, g)
    assert eval_expr("lambda", model) == Series.one(ORD - 1)
    assert eval_expr("1/(1-x)", model) == Series.geometric(1, ORD)
    assert eval_expr("exp(x)", model) == Series.exp_linear(1, ORD)
    assert eval_expr("D(P(g)) - g", model, {"g": g}).is_zero()


def test_eval_errors():
    model = OperatedModel.volterra(SeparableKernel(Series.monomial(1, 6), Series.one(6)))
    with pytest.raises(UnboundSymbol):
        eval_expr("P(q)", model)
    with pytest.raises(MissingOperator):
        eval_expr("D(x)", model)
    with pytest.raises(MissingOperator):
        eval_expr("lambda", model)
    with pytest.raises(ZeroDivisionError):
        eval_expr("x/0", model)


WEIGHTED_REYNOLDS = "P(a)*P(b) - P(P(a)*b) - P(a*P(b)) + P(P(a)*lambda*P(b))"


def test_weighted_reynolds_expression_vanishes_on_series():
    model = OperatedModel.volterra(SeparableKernel.cauchy(ORD))
    rng = random.Random(2)
    for _ in range(5):
        b = {"a": random_series(rng, ORD), "b": random_series(rng, ORD)}
        assert eval_expr(WEIGHTED_REYNOLDS, model, b).is_zero()


def test_weighted_reynolds_expression_vanishes_on_tensors():
    A = PolyAlg()
    model = OperatedModel.free(A, 5)
    rng = random.Random(3)
    for _ in range(5):
        b = {"a": random_tensor(rng, A, 5, max_index=2), "b": random_tensor(rng, A, 5, max_index=2)}
        assert eval_expr(WEIGHTED_REYNOLDS, model, b).reduced().is_zero()
    assert eval_expr("x", model) == TensorSeries.word((1,), 5, A)


def test_tensor_models_reject_series_only_nodes():
    model = OperatedModel.free(ScalarAlg(1), 4)
    with pytest.raises(UnsupportedNode):
        eval_expr("x", model)
    with pytest.raises(UnsupportedNode):
        eval_expr("exp(P(1))", model)
    with pytest.raises(UnsupportedNode):
        eval_expr("1/P(1)", model)


# rewriting -------------------------------------------------------------------


def square_terms(order):
    seed = tuple(sorted((f, ("P", (f,)))))
    return {nest_P(seed, n): F(2 * (-1) ** (n - 1)) for n in range(1, order + 1)}


@pytest.mark.parametrize("order", [1, 4, 8])
def test_square_of_P(order):
    assert reynolds_expand("P(f)^2", order) == square_terms(order)


def test_square_with_symbolic_weight():
    got = reynolds_expand("P(f)^2", 3, unit_weight=False)
    pf = ("P", (f,))
    seed = tuple(sorted((f, pf)))
    lam_seed = tuple(sorted((("l",), ("P", seed))))
    assert got[(("P", seed),)] == 2
    assert got[(("P", lam_seed),)] == -2


def test_expansion_without_products_is_unchanged():
    assert reynolds_expand("P(f) + 3*P(P(g))", 5) == {
        (("P", (f,)),): F(1), nest_P((("s", "g"),), 2): F(3)}
    assert reynolds_expand("0", 3) == {}


def test_expansion_has_no_products_of_P():
    out = reynolds_expand("P(f)*P(g)*P(h) + P(f)^3", 5)

    def ok(mono):
        ps = [t for t in mono if t[0] == "P"]
        return len(ps) <= 1 and all(ok(t[1]) for t in ps)

    assert out and all(ok(m) for m in out)


def test_expansion_matches_evaluation():
    K = SeparableKernel.exp(ORD + 1)
    model = OperatedModel.volterra(K)
    rng = random.Random(4)
    for text in ["P(f)^2", "P(f)*P(g)", "P(f)*P(g)*P(f)", "x*P(f)^2 + P(P(f)*P(g))"]:
        b = {"f": random_series(rng, ORD + 1), "g": random_series(rng, ORD + 1)}
        expanded = wordsum_to_expr(reynolds_expand(text, ORD))
        lhs = eval_expr(expanded, model, b)
        rhs = eval_expr(text, model, b)
        assert lhs.equal_mod(rhs, ORD), text


def test_expansion_rejects_D():
    with pytest.raises(UnsupportedNode):
        reynolds_expand("D(f)*P(f)", 4)


def test_depths_and_formatting():
    out = reynolds_expand("P(f)^2", 3)
    assert sorted(p_depth(m) for m in out) == [2, 3, 4]
    rows = format_wordsum(out)
    assert rows[0] == {"term": "P(P(f)*f)", "coeff": "2"}
    assert [r["coeff"] for r in rows] == ["2", "-2", "2"]
    assert unparse(wordsum_to_expr(out)) == "2*P(P(f)*f) - 2*P(P(P(f)*f)) + 2*P(P(P(P(f)*f)))"
