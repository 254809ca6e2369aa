"""
Budgeting the error of a truncated algorithm
============================================

Truncating to k variables costs err_trnc(k); the algorithm on the kept
variables adds its own error e. The two combine as an l_{p*} sum.
"""

from truncdim import ProductWeights, combined_error, trunc_bound_product, truncation_dimension

w = ProductWeights.polynomial(3)
target = 1e-3

# spend half the budget (in the p* = 2 sense) on truncation
half = target / 2**0.5
r = truncation_dimension(w, 1.0, half, 2)
print(f"keep k={r.k_star} variables; truncation costs {r.bound_at_k_star:.3e}")

for e_alg in (1e-4, half, 1e-3):
    total = combined_error(r.bound_at_k_star, e_alg, 2)
    print(f"algorithm error {e_alg:.2e} -> total {total:.3e} ({'ok' if total <= target else 'over'})")

# with p* = inf (p = 1) the larger of the two errors decides
k = truncation_dimension(w, 1.0, target, 1).k_star
t = trunc_bound_product(w, 1.0, k, 1).bound
print(f"p=1: k={k}, truncation {t:.3e}, total {combined_error(t, 5e-4, float('inf')):.3e}")
