"""
Where the constant C1 comes from
================================

C1 is the size of one variable's piece of the space, measured for the
problem at hand. It depends on the kernel, its weight psi, the density
omega and the exponents.
"""

import math

from truncdim import (
    AnchoredStep,
    Approximation,
    Exponential,
    Integration,
    PolyExp,
    ProblemSpec,
    SmoothG,
    Uniform01,
    kappa_bar_norm,
    kappa_hat,
    kappa_tilde,
)

# anchored Sobolev space on [0, 1]: kappa_hat(x) = x^(1/p1*)
for x in (0.25, 0.5, 1.0):
    print("kappa_hat", x, kappa_hat(AnchoredStep(), 2, x).value)

# L_2 approximation under the uniform density
ps = ProblemSpec(AnchoredStep(), Uniform01(), Approximation(2), 2)
res = kappa_tilde(ps)
print("kappa_tilde", res.value, res.exactness, res.branch)

# on [0, inf) with psi = e^(lam t) and omega = mu e^(-mu x), some constants
# are exact, some are bounds and some are infinite
for r, lam, mu, q, p1 in [(1, 1.0, 1.0, 2, 2), (2, 1.0, 1.0, 2, 2), (2, -0.5, 2.0, 1, 1),
                          (1, -1.0, 0.5, 2, 1), (2, 1.0, 1.0, math.inf, 2)]:
    ps = ProblemSpec(PolyExp(r, lam), Exponential(mu), Approximation(q), p1)
    res = kappa_tilde(ps)
    print(f"r={r} lam={lam:+} mu={mu} q={q} p1={p1}: {res.value:.6g} ({res.exactness}; {res.branch})")

# bounds can be compared with the quadrature value of the same integral
ps = ProblemSpec(PolyExp(2, 1.0), Exponential(1.0), Approximation(2), 2)
print("bound", kappa_tilde(ps).value, "quadrature", kappa_tilde(ps, method="quadrature").value)

# integration only needs the omega-averaged kernel
ps = ProblemSpec(PolyExp(2, 0.0), Exponential(2.0), Integration(), 1)
print("kappa_bar", kappa_bar_norm(ps).value)

# kernels of the form G(x t) have no closed forms
for g in ("one-minus-exp", "one-minus-cos"):
    ps = ProblemSpec(SmoothG(g, 1.0), Exponential(1.0), Integration(), 2)
    res = kappa_bar_norm(ps)
    print(g, f"{res.value:.12f} +- {res.err_estimate:.1e}")
