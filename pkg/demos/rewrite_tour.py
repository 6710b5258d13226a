"""Rewriting products of P-terms into sums of single P-terms, then evaluating."""

from reynolds import OperatedModel, SeparableKernel, Series, eval_expr, reynolds_expand
from reynolds.expr import format_wordsum, wordsum_to_expr

order = 5
ws = reynolds_expand("P(f)*P(g)", order)
print(f"P(f)*P(g) up to {order} applications of P:")
for row in format_wordsum(ws):
    print(f"  {row['coeff']:>3}  {row['term']}")

model = OperatedModel.volterra(SeparableKernel.exp(order + 1))
bindings = {"f": Series([1, 1], order + 1), "g": Series([2, 0, -1], order + 1)}
direct = eval_expr("P(f)*P(g)", model, bindings)
rewritten = eval_expr(wordsum_to_expr(ws), model, bindings)
print("\ndirect    :", direct)
print("rewritten :", rewritten)
print("agree through x^%d:" % order, direct.equal_mod(rewritten, order))
