"""The truncated free object: words, the complete shuffle and its evaluation.

Words are tuples of basis indices. Over ScalarAlg(1) the only letter is 0,
and evaluation under the exp kernel turns 1^(k+1) into P^k(1).
"""

from reynolds import (
    ScalarAlg,
    SeparableKernel,
    StructureMap,
    TensorSeries,
    classic_shuffle,
    complete_shuffle,
    deriv_D,
    diamond,
    evaluate,
    reynolds_P,
)
from reynolds.hom import check_homomorphism

N = 6
A = ScalarAlg(1)


def show(t):
    return " + ".join(f"({c})·1^{len(w)}" for w, c in t.sorted_terms())


a = TensorSeries.word((0, 0), N, A)

print("classic  (1⊗1) ш (1⊗1):", show(classic_shuffle(a, a)))
print("complete (1⊗1) ш (1⊗1):", show(complete_shuffle(a, a)))
print("diamond  (1⊗1) ⋄ (1⊗1):", show(diamond(a, a)))
print("P(1⊗1) =", show(reynolds_P(a)), "  D(P(1⊗1)) =", show(deriv_D(reynolds_P(a))))

sm = StructureMap(SeparableKernel.exp(N - 1), A, N - 1)
print("\nevaluation under e^(t-x):")
for k in range(1, 4):
    print(f"  1^{k} ->", evaluate(sm, TensorSeries.word((0,) * k, N, A)))
print("multiplicativity defect on 1⊗1:", check_homomorphism(sm, a, a, N - 1))
