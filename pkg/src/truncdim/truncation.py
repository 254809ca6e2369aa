"""Truncation-error bounds, truncation dimensions and combined errors.

Setting variables ``k+1, k+2, ...`` to the anchor changes the solution by
at most ``err(k) * ||f - f_k||``; this module evaluates upper bounds on
``err(k)`` and finds the smallest ``k`` with ``err(k) <= eps``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .core import (
    DEFAULT_TOL,
    ExplicitWeights,
    ProductWeights,
    as_exponent,
    conjugate,
    log_one_plus_product_bracket,
    tail_power_bracket,
)
from .errors import ConfigError, DivergentTail, InvalidIndex, Unreachable

__all__ = [
    "TruncationReport",
    "DimensionResult",
    "trunc_bound_general",
    "trunc_bound_product",
    "trunc_bound",
    "truncation_dimension",
    "combined_error",
    "TAIL_RULES",
]

EXACT_SUBSET_SUM = "exact-subset-sum"
PRODUCT_CLOSED_FORM = "product-closed-form"
P1_SUP_FORM = "p1-sup-form"
INF = math.inf

# "exact": tail sum enclosed to the requested tolerance.
# "midpoint-integral": tail replaced by int_{k+1/2}^inf, which dominates it
# for the convex polynomial weights, giving a looser but valid bound.
TAIL_RULES = ("exact", "midpoint-integral")


@dataclass(frozen=True)
class TruncationReport:
    """Upper bound on the ``k``-th truncation error.

    ``bound`` is the point value; ``lower``/``upper`` enclose it given the
    tail-sum tolerance (equal to ``bound`` when computed exactly).
    ``constant_exactness`` records whether ``C1`` itself was exact.
    """

    k: int
    bound: float
    kind: str
    branch: str
    lower: float = field(default=math.nan, repr=False)
    upper: float = field(default=math.nan, repr=False)
    constant_exactness: str = "exact"

    def __post_init__(self):
        if math.isnan(self.lower):
            object.__setattr__(self, "lower", self.bound)
        if math.isnan(self.upper):
            object.__setattr__(self, "upper", self.bound)


@dataclass(frozen=True)
class DimensionResult:
    """Smallest ``k >= 1`` whose truncation bound is at most ``epsilon``.

    ``bound_at_k_star`` and ``bound_at_previous`` are certified (upper end
    of the enclosure) values, so ``bound_at_k_star <= epsilon <
    bound_at_previous`` always holds. ``straddled`` flags a threshold
    decision left ambiguous after all tolerance refinements; the conservative
    (larger) ``k`` is returned in that case.
    """

    k_star: int
    bound_at_k_star: float
    bound_at_previous: float
    epsilon: float
    estimate_at_k_star: float = math.nan
    estimate_at_previous: float = math.nan
    straddled: bool = False
    tol_used: float = DEFAULT_TOL
    kind: str = PRODUCT_CLOSED_FORM

    @property
    def gap(self) -> tuple[float, float]:
        """Relative distances of the two witness bounds to ``epsilon``."""
        eps = self.epsilon
        return (self.bound_at_k_star - eps) / eps, (self.bound_at_previous - eps) / eps


def _c1_value(C1):
    exactness = getattr(C1, "exactness", "exact")
    value = float(getattr(C1, "value", C1))
    if not value >= 0:
        raise ConfigError(f"C1 must be nonnegative, got {value}")
    if math.isinf(value):
        raise DivergentTail("C1 is infinite; the problem is not bounded on this space")
    return value, exactness


# ---------------------------------------------------------------------------
# explicit weights
# ---------------------------------------------------------------------------


def _norm_array(w: ExplicitWeights, op_norms) -> np.ndarray:
    if isinstance(op_norms, Mapping):
        norms = np.zeros(1 << w.s)
        for key, value in op_norms.items():
            norms[w.mask_of(key)] = float(value)
        return norms
    c1, _ = _c1_value(op_norms)
    return c1 ** w.popcounts.astype(float)


def trunc_bound_general(w: ExplicitWeights, op_norms, k: int, pstar) -> TruncationReport:
    """``(sum_{u not in [k]} (||S_u|| gamma_u)**p*)**(1/p*)`` by enumeration.

    ``op_norms`` is either a scalar ``C1`` (meaning ``||S_u|| = C1**|u|``)
    or a mapping from subsets to operator norms (missing subsets count as
    0). ``pstar = inf`` uses the supremum.
    """
    if not 0 <= k <= w.s:
        raise InvalidIndex(f"k={k} outside 0..{w.s}")
    pstar = as_exponent(pstar)
    exactness = getattr(op_norms, "exactness", "exact")
    terms = _norm_array(w, op_norms) * w.values
    outside = (np.arange(1 << w.s) >> k) != 0
    terms = terms[outside]
    if pstar.infinite:
        value = float(terms.max()) if terms.size else 0.0
        branch = "sup over u not in [k]"
    else:
        value = math.fsum(terms**pstar.value) ** (1.0 / pstar.value)
        branch = f"sum over u not in [k], p*={pstar}"
    return TruncationReport(k, value, EXACT_SUBSET_SUM, branch, constant_exactness=exactness)


# ---------------------------------------------------------------------------
# product weights
# ---------------------------------------------------------------------------


def _sup_form(w: ProductWeights, c1: float, k: int) -> tuple[float, str]:
    """``max_{u not in [k]} C1**|u| gamma_u`` for nonincreasing weights.

    The maximizer holds ``k+1`` (largest weight beyond ``k``) plus every
    other ``j`` with ``C1 gamma_j > 1``; those form a prefix ``[m]``.
    """
    if w.s is not None and k >= w.s:
        return 0.0, "k = s"
    head = c1 * w.gamma(k + 1)
    if w.sequence is not None:
        big = [j for j in range(1, w.s + 1) if c1 * w.gamma(j) > 1.0]
        extra = [j for j in big if j != k + 1]
        if not extra:
            return head, "C1*gamma_{k+1}"
        log_extra = math.fsum(math.log(c1 * w.gamma(j)) for j in extra)
        return head * math.exp(log_extra), f"u=[{max(extra)}] + {{k+1}}"

    # c1 * scale * j**-alpha > 1  <=>  j < (c1 * scale)**(1/alpha)
    c = c1 * w.scale
    if c <= 1.0:
        return head, "C1*gamma_{k+1}"
    log_limit = math.log(c) / w.alpha
    cap = w.s if w.s is not None else INF
    if log_limit > math.log(1e15) and cap > 1e15:
        # the block [m] is astronomically long and its product overflows
        return INF, "u=[m] + {k+1}, m beyond 1e15"
    m = cap if log_limit >= math.log(cap) else math.ceil(math.exp(log_limit)) + 1
    m = int(min(m, cap))
    while m > 0 and c1 * w.gamma(m) <= 1.0:
        m -= 1
    if m == 0 or (m == 1 and k == 0):
        return head, "C1*gamma_{k+1}"
    # sum_{j <= m} log(c j^-alpha), without the term for k+1 when it is inside
    log_block = m * math.log(c) - w.alpha * math.lgamma(m + 1)
    if k + 1 <= m:
        log_block -= math.log(c1 * w.gamma(k + 1))
    try:
        value = head * math.exp(log_block)
    except OverflowError:
        value = INF
    return value, f"u=[{m}] + {{k+1}}"


def _midpoint_tail(w: ProductWeights, k: int, t: float) -> float:
    if w.alpha is None or w.s is not None:
        raise ConfigError("midpoint-integral tails need infinitely many polynomial weights")
    beta = w.alpha * t
    if beta <= 1:
        raise DivergentTail("tail sum diverges (need alpha*t > 1)")
    return w.scale**t * (k + 0.5) ** (1.0 - beta) / (beta - 1.0)


def trunc_bound_product(
    w: ProductWeights, C1, k: int, p, tol: float = DEFAULT_TOL, tail_rule: str = "exact"
) -> TruncationReport:
    """Closed-form truncation bound for product weights.

    For ``p > 1``::

        (prod_j (1 + (C1 g_j)**p*) * (1 - exp(-C1**p* sum_{j>k} g_j**p*)))**(1/p*)

    evaluated in the log domain. For ``p = 1`` the exact supremum
    ``max_{u not in [k]} C1**|u| gamma_u``, which is ``C1 gamma_{k+1}`` when
    every ``C1 gamma_j <= 1``.
    """
    p = as_exponent(p)
    c1, exactness = _c1_value(C1)
    if k < 0 or (w.s is not None and k > w.s):
        raise InvalidIndex(f"k={k} outside 0..{w.s if w.s is not None else 'inf'}")
    if tail_rule not in TAIL_RULES:
        raise ConfigError(f"unknown tail rule {tail_rule!r}")

    if p.is_one:
        value, branch = _sup_form(w, c1, k)
        return TruncationReport(k, value, P1_SUP_FORM, branch, constant_exactness=exactness)

    pstar = conjugate(p).value
    if c1 == 0.0:
        return TruncationReport(k, 0.0, PRODUCT_CLOSED_FORM, "C1 = 0", constant_exactness=exactness)
    logp = log_one_plus_product_bracket(w, c1, pstar, tol)
    if tail_rule == "exact":
        tail = tail_power_bracket(w, k, pstar, tol)
    else:
        mid = _midpoint_tail(w, k, pstar)
        tail = type(logp)(mid, mid, mid)
    scale = c1**pstar

    def combine(log_prod, tail_sum):
        x = scale * tail_sum
        if x <= 0:
            return 0.0
        return math.exp((log_prod + math.log(-math.expm1(-x))) / pstar)

    bound = combine(logp.estimate, tail.estimate)
    lower = combine(logp.lower, max(tail.lower, 0.0))
    upper = combine(logp.upper, tail.upper)
    branch = f"p={p}, p*={pstar:g}, tail={tail_rule}"
    return TruncationReport(
        k, bound, PRODUCT_CLOSED_FORM, branch, min(lower, bound), max(upper, bound), exactness
    )


def trunc_bound(w, C1, k: int, p, tol: float = DEFAULT_TOL, tail_rule: str = "exact"):
    """Dispatch on the weight family: exact enumeration or closed form."""
    if isinstance(w, ExplicitWeights):
        return trunc_bound_general(w, C1, k, conjugate(p))
    return trunc_bound_product(w, C1, k, p, tol, tail_rule)


# ---------------------------------------------------------------------------
# dimension search
# ---------------------------------------------------------------------------

_MAX_K = 1 << 40


def truncation_dimension(
    w,
    C1,
    epsilon: float,
    p,
    tol: float = DEFAULT_TOL,
    refinements: int = 4,
    tail_rule: str = "exact",
) -> DimensionResult:
    """Smallest ``k >= 1`` with ``trunc_bound(k) <= epsilon``.

    Doubling then bisection, relying on the bound being nonincreasing in
    ``k``. A threshold decision whose enclosure straddles ``epsilon`` is
    retried with ``tol`` tightened tenfold up to ``refinements`` times and
    otherwise resolved conservatively (treated as ``> epsilon``).
    """
    epsilon = float(epsilon)
    if not epsilon > 0:
        raise ConfigError("epsilon must be positive")
    decisions: dict[int, tuple[bool, TruncationReport, bool, float]] = {}

    def decide(k):
        if k in decisions:
            return decisions[k][0]
        t = tol
        for attempt in range(refinements + 1):
            rep = trunc_bound(w, C1, k, p, t, tail_rule)
            if rep.upper <= epsilon:
                decisions[k] = (True, rep, False, t)
                return True
            if rep.lower > epsilon:
                decisions[k] = (False, rep, False, t)
                return False
            if attempt < refinements:
                t /= 10.0
        decisions[k] = (False, rep, True, t)
        return False

    s = w.s
    if s == 0:
        raise Unreachable("no variables to keep: s = 0")
    lo, hi = 0, 1
    while not decide(hi):
        if s is not None and hi >= s:
            raise Unreachable(f"bound at k=s={s} still exceeds epsilon")
        if hi >= _MAX_K:
            raise Unreachable(f"bound exceeds epsilon={epsilon:g} for all k <= {_MAX_K}")
        lo, hi = hi, hi * 2 if s is None else min(hi * 2, s)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if decide(mid):
            hi = mid
        else:
            lo = mid
    k_star = hi
    _, rep_star, straddle_star, tol_star = decisions[k_star]
    if k_star - 1 not in decisions:
        # k = 0 is only reached here; it is the witness for k_star = 1
        decide(k_star - 1)
    _, rep_prev, straddle_prev, tol_prev = decisions[k_star - 1]
    if rep_prev.upper <= epsilon:
        # k = 0 already meets epsilon; dim is still 1 by definition
        prev_bound = math.inf
    else:
        prev_bound = rep_prev.upper
    return DimensionResult(
        k_star=k_star,
        bound_at_k_star=rep_star.upper,
        bound_at_previous=prev_bound,
        epsilon=epsilon,
        estimate_at_k_star=rep_star.bound,
        estimate_at_previous=rep_prev.bound,
        straddled=straddle_star or straddle_prev or any(d[2] for d in decisions.values()),
        tol_used=min(tol_star, tol_prev),
        kind=rep_star.kind,
    )


# ---------------------------------------------------------------------------
# combined error
# ---------------------------------------------------------------------------


def combined_error(epsilon: float, inner_error: float, pstar) -> float:
    """Worst-case error of a truncation algorithm: ``(eps**p* + e**p*)**(1/p*)``.

    ``pstar = inf`` gives ``max(eps, e)``.
    """
    if epsilon < 0 or inner_error < 0:
        raise ConfigError("errors must be nonnegative")
    pstar = as_exponent(pstar)
    big = max(epsilon, inner_error)
    if pstar.infinite or big == 0 or math.isinf(big):
        return big
    t = pstar.value
    return big * ((epsilon / big) ** t + (inner_error / big) ** t) ** (1.0 / t)
