"""
Anchored versus unanchored norms
================================

Results proved for an anchored space transfer to the space centred at the
density omega, at the price of the embedding norm between the two.
"""

from truncdim import (
    AnchoredStep,
    ExplicitWeights,
    Integration,
    ProblemSpec,
    ProductWeights,
    Uniform01,
    corner_norm,
    interpolated_bound,
    kappa_bar_norm,
)

# the averaged kernel gives the inputs: sup norm at p1 = 1, L_1 norm at p1 = inf
M1 = kappa_bar_norm(ProblemSpec(AnchoredStep(), Uniform01(), Integration(), 1)).value
Minf = kappa_bar_norm(ProblemSpec(AnchoredStep(), Uniform01(), Integration(), float("inf"))).value
print("M1", M1, "Minf", Minf)

# product weights: one product for every corner
w = ProductWeights.polynomial(2)
print("s=inf, gamma_j=j^-2:", corner_norm(w, M1, 1, 1).value)
for s in (1, 10, 100, 1000):
    print(" s =", s, corner_norm(ProductWeights.polynomial(2, s=s), M1, 1, 1).value)

# general weights: the corners differ
wx = ExplicitWeights(2, {(): 1.0, (1,): 0.5, (2,): 0.5, (1, 2): 0.9})
for p1, p2 in [(1, 1), (1, float("inf")), (float("inf"), 1), (float("inf"), float("inf"))]:
    M = M1 if p1 == 1 else Minf
    print((p1, p2), corner_norm(wx, M, p1, p2).value)

# in between, only an interpolated upper bound is available
print("p1=p2=2:", interpolated_bound(wx, 2, 2, M1, Minf))
