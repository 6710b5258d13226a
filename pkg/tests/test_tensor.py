import itertools
import json
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from reynolds.algebra import PolyAlg, ScalarAlg, SeriesAlg, alg_mul
from reynolds.errors import AlgebraMismatch, IndexOverflow
from reynolds.identities import random_tensor
from reynolds.tensor import (
    TensorSeries,
    classic_shuffle,
    complete_shuffle,
    complete_shuffle_direct,
    deriv_D,
    diamond,
    nested_form,
    q_lambda,
    q_lambda_inv,
    reynolds_P,
    star,
)
from reynolds.volterra import SeparableKernel

F = Fraction
W = TensorSeries.word


def T(terms, N, A):
    return TensorSeries(terms, N, A)


# construction ------------------------------------------------------------


def test_words_are_validated_and_truncated():
    A = PolyAlg(max_degree=3)
    u = T({(0, 1): 2, (0, 0, 0, 0): 1}, 3, A)
    assert dict(u.items()) == {(0, 1): 2}
    with pytest.raises(IndexOverflow):
        W((4,), 3, A)
    with pytest.raises(ValueError):
        T({(): 1}, 3, A)


def test_valuation_convention():
    A = ScalarAlg(1)
    assert TensorSeries.zero(5, A).valuation() == 6
    assert T({(0, 0): 1, (0, 0, 0): 1}, 5, A).valuation() == 2


def test_json_round_trip():
    A = PolyAlg()
    u = T({(0, 1): F(2, 3), (2,): -1}, 4, A)
    data = json.loads(u.to_json())
    assert data["header"] == {"N": 4, "algebra": "poly"}
    assert data["terms"][0] == {"word": [2], "coeff": "-1"}
    assert TensorSeries.from_json(u.to_json()) == u


def test_mixing_algebras_is_an_error():
    with pytest.raises(AlgebraMismatch):
        W((0,), 3, ScalarAlg(1)) + W((0,), 3, ScalarAlg(2))
    with pytest.raises(AlgebraMismatch):
        diamond(W((0,), 3, ScalarAlg(1)), W((0,), 3, PolyAlg()))


# classic shuffle -----------------------------------------------------------


def test_classic_shuffle_examples():
    A = PolyAlg()
    N = 6
    assert classic_shuffle(W((1,), N, A), W((2,), N, A)) == T({(1, 2): 1, (2, 1): 1}, N, A)
    got = classic_shuffle(W((1,), N, A), W((2, 3), N, A))
    assert got == T({(1, 2, 3): 1, (2, 1, 3): 1, (2, 3, 1): 1}, N, A)
    assert len(classic_shuffle(W((1, 2), N, A), W((3, 4), N, A))) == 6


def test_complete_shuffle_without_weight_is_classic():
    A = ScalarAlg()  # d = 0, so lambda = 0
    for m, n in [(1, 1), (2, 1), (2, 3)]:
        a, b = W((0,) * m, 8, A), W((0,) * n, 8, A)
        assert complete_shuffle(a, b) == classic_shuffle(a, b)
        assert complete_shuffle_direct(a, b) == classic_shuffle(a, b)


# complete shuffle ----------------------------------------------------------


def test_length_one_complete_shuffle_closed_form():
    # lambda = 2x in PolyAlg, so (-lambda)^{⊗k} = (-2)^k x⊗...⊗x
    A = PolyAlg()
    N = 7
    expected = {}
    for k in range(N - 1):
        for w in ((3, 4), (4, 3)):
            expected[(1,) * k + w] = F(-2) ** k
    assert complete_shuffle(W((3,), N, A), W((4,), N, A)) == T(expected, N, A)


def test_two_by_two_display_term_for_term():
    A = PolyAlg()
    N = 6
    a1, a2, b1, b2 = 2, 3, 4, 5
    # the six shuffles with the number of slots that admit lambda insertions
    patterns = [
        ((a1, a2, b1, b2), 2), ((b1, b2, a1, a2), 2),
        ((a1, b1, a2, b2), 3), ((a1, b1, b2, a2), 3),
        ((b1, a1, a2, b2), 3), ((b1, a1, b2, a2), 3),
    ]
    expected: dict = {}
    for letters, slots in patterns:
        for ins in itertools.product(range(N - 3), repeat=slots):
            if sum(ins) > N - 4:
                continue
            word = []
            for j, c in enumerate(letters):
                if j < slots:
                    word.extend([1] * ins[j])
                word.append(c)
            expected[tuple(word)] = expected.get(tuple(word), 0) + F(-2) ** sum(ins)
    got = complete_shuffle(W((a1, a2), N, A), W((b1, b2), N, A))
    assert got == T(expected, N, A)


def test_scalar_length_one_counts():
    # the two shuffles a⊗b, b⊗a each extend once per length and collapse onto one word
    A = ScalarAlg(1)
    N = 8
    got = complete_shuffle_direct(W((0,), N, A), W((0,), N, A))
    for r in range(2, N + 1):
        assert got[(0,) * r] == 2 * F(-1) ** (r - 2)
    assert len(got) == N - 1


def pure_words(max_len, letters):
    return [w for m in range(1, max_len + 1) for w in itertools.product(letters, repeat=m)]


@pytest.mark.parametrize("A,letters", [(ScalarAlg(F(2, 3)), [0]), (PolyAlg(), [0, 2])], ids=["scalar", "poly"])
def test_recursion_matches_enumeration(A, letters):
    N = 7
    words = pure_words(3, letters)
    for u in words:
        for v in words:
            a, b = W(u, N, A), W(v, N, A)
            r = complete_shuffle(a, b)
            assert r == complete_shuffle_direct(a, b), (u, v)
            assert r.valuation() >= len(u) + len(v)


# diamond, P, D -----------------------------------------------------------


def test_diamond_examples():
    A = PolyAlg()
    N = 5
    assert diamond(W((2,), N, A), W((3,), N, A)) == W((5,), N, A)
    u = T({(1, 2): 3, (0, 0, 1): -1}, N, A)
    assert diamond(TensorSeries.unit(N, A), u) == u
    assert diamond(u, TensorSeries.unit(N, A)) == u


def test_reynolds_P_examples():
    A = PolyAlg()
    N = 4
    assert reynolds_P(W((2, 3), N, A)) == W((0, 2, 3), N, A)
    assert reynolds_P(TensorSeries.zero(N, A)).is_zero()
    assert reynolds_P(W((1, 1, 1, 1), N, A)).is_zero()  # pushed past N


def test_deriv_D_examples():
    A = ScalarAlg(1)
    N = 5
    assert deriv_D(W((0, 0), N, A)) == W((0,), N - 1, A)
    P = PolyAlg()
    assert deriv_D(W((1,), N, P)) == T({(0,): 1, (2,): 3}, N - 1, P)
    u = T({(1, 2): 1, (0,): 2}, N, P)
    assert deriv_D(reynolds_P(u)) == u.truncate(N - 1)


def test_q_lambda_examples():
    P = PolyAlg()
    N = 5
    w = W((2, 3), N, P)
    assert q_lambda(w) == T({(2, 3): 1, (1, 2, 3): 4}, N, P)
    Z = ScalarAlg()
    u = T({(0, 0): 1, (0,): 3}, N, Z)
    assert q_lambda(u) == u and q_lambda_inv(u) == u


def test_star_without_weight():
    A = ScalarAlg()
    N = 5
    x, y = T({(0,): 1, (0, 0): 2}, N, A), T({(0,): -1}, N, A)
    assert star(x, y) == reynolds_P(x) * y + x * reynolds_P(y)


def test_nested_form_reaches_all_short_words():
    A = PolyAlg()
    for word in pure_words(5, [0, 1, 2]):
        assert nested_form(word, 5, A) == W(word, 5, A)


# properties on random tensors ---------------------------------------------------

ALGEBRAS = [ScalarAlg(1), ScalarAlg(F(2, 3)), PolyAlg(), ScalarAlg(),
            SeriesAlg(SeparableKernel.exp(7), 6)]


def _draw(seed, A, N, k):
    rng = random.Random(seed)
    return [random_tensor(rng, A, N, terms=3, max_index=2) for _ in range(k)]


@settings(max_examples=15)
@given(st.integers(0, 10**6), st.sampled_from(ALGEBRAS))
def test_diamond_commutative_associative(seed, A):
    x, y, z = _draw(seed, A, 5, 3)
    assert (x * y).reduced() == (y * x).reduced()
    assert ((x * y) * z).reduced() == (x * (y * z)).reduced()


@settings(max_examples=15)
@given(st.integers(0, 10**6), st.sampled_from(ALGEBRAS))
def test_valuation_of_diamond(seed, A):
    x, y = _draw(seed, A, 6, 2)
    p = x * y
    if not p.is_zero():
        assert p.valuation() >= x.valuation() + y.valuation() - 1


@settings(max_examples=15)
@given(st.integers(0, 10**6), st.sampled_from(ALGEBRAS[:4]))
def test_star_identities(seed, A):
    x, y, z = _draw(seed, A, 5, 3)
    assert reynolds_P(x) * reynolds_P(y) == reynolds_P(star(x, y))
    assert star(star(x, y), z) == star(x, star(y, z))


@settings(max_examples=15)
@given(st.integers(0, 10**6), st.sampled_from(ALGEBRAS))
def test_q_lambda_is_invertible(seed, A):
    (x,) = _draw(seed, A, 6, 1)
    assert q_lambda_inv(q_lambda(x)) == x
    assert q_lambda(q_lambda_inv(x)) == x


@settings(max_examples=15)
@given(st.integers(0, 10**6), st.sampled_from(ALGEBRAS))
def test_P_raises_valuation(seed, A):
    (x,) = _draw(seed, A, 6, 1)
    if not x.is_zero() and x.valuation() < 6:
        assert reynolds_P(x).valuation() == x.valuation() + 1


def test_length_one_diamond_is_algebra_product():
    A = PolyAlg()
    for i in range(4):
        for j in range(4):
            got = diamond(W((i,), 4, A), W((j,), 4, A))
            assert got == TensorSeries.from_element(alg_mul(A, {i: F(1)}, {j: F(1)}), 4, A)
