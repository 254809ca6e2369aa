"""
Truncation dimensions for polynomially decaying weights
=======================================================

How many leading variables must be kept so that dropping the rest costs
at most eps, when gamma_j = j**-alpha?
"""

import math

from truncdim import ProductWeights, trunc_bound_product, truncation_dimension

eps_grid = [1.0 / 10**m for m in range(1, 7)]

# p = 2 uses the product closed form; the bound is evaluated with certified
# tail sums, so every cell comes with the bounds at k and k - 1
for p in (2, 1):
    print(f"p = {p}")
    print("alpha " + "".join(f"{e:>8.0e}" for e in eps_grid))
    for alpha in (2, 3, 4, 5):
        w = ProductWeights.polynomial(alpha)
        row = [truncation_dimension(w, 1.0, e, p).k_star for e in eps_grid]
        print(f"{alpha:>5} " + "".join(f"{k:>8}" for k in row))
    print()

# for p = 1 the bound is just C1 gamma_{k+1}, so the dimension has a formula
for alpha in (2, 5):
    print(alpha, [math.ceil(round(e ** (-1 / alpha), 9) - 1) for e in eps_grid])

# a close call: the bound at k = 1 for alpha = 4 is already below 0.1
r = truncation_dimension(ProductWeights.polynomial(4), 1.0, 0.1, 2)
print(f"\nalpha=4, eps=0.1: k={r.k_star}, bound(k)={r.bound_at_k_star:.6f}, "
      f"bound(k-1)={r.bound_at_previous:.6f}")

# a cruder tail estimate, an integral from k + 1/2, is more conservative
b = trunc_bound_product(ProductWeights.polynomial(4), 1.0, 1, 2, tail_rule="midpoint-integral")
print(f"midpoint-integral bound at k=1: {b.bound:.6f}")
