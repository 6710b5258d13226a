"""Separable Volterra operators as exact truncated series.

Shows that K = x is not Rota-Baxter, that e^(t-x) is a Reynolds kernel of
weight 1, and that P^n(1) matches its closed form.
"""

from fractions import Fraction

from reynolds import (
    OperatedModel,
    SeparableKernel,
    Series,
    apply_P,
    closed_form_Pn1,
    iterate_P,
    residual,
    weight,
)
from reynolds.volterra import rota_baxter_residual

N = 10
one = Series.one(N)

linear = SeparableKernel(Series.monomial(1, N), one)
print("K = x:  P(1) =", apply_P(linear, one))
print("        Rota-Baxter defect at f = g = 1:", rota_baxter_residual(linear, one, one))

K = SeparableKernel.exp(N)
print("\nK = e^(t-x):  weight D(1) =", weight(K))
print("              P(1) =", apply_P(K, one))
model = OperatedModel.volterra(K)
f = Series([1, 2, Fraction(-1, 3)], N)
g = Series([0, 1, 0, 5], N)
print("              Reynolds residual at sample f, g:", residual(model, "reynolds", [f, g]))

print("\nP^n(1) against the closed form (mu = 1):")
for n in range(4):
    lhs = iterate_P(K, one, n)
    rhs = closed_form_Pn1(K, n, 1)
    print(f"  n={n}: {lhs}   agree: {lhs == rhs.truncate(lhs.ord)}")
