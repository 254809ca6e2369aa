"""Norms of the identity embedding between anchored and unanchored spaces.

The unanchored (``omega``-centred) space has the same functions as the
anchored one when the weights are downward closed, and the embedding and its
inverse have the same norm, so one number describes both directions.

At the corners ``p1, p2 in {1, inf}`` the norm is an exact max/sum over
subsets. ``M`` is the size of the averaged kernel that matches ``p1``:
its sup norm when ``p1 = 1`` and its ``L_1`` norm when ``p1 = inf``. Other
exponents get an interpolation upper bound built from the corners.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import ExplicitWeights, ProductWeights, as_exponent, log_one_plus_product
from .errors import ConfigError, DivergentProduct, DivergentTail

__all__ = ["EmbeddingNorm", "corner_norm", "interpolated_bound"]

EXACT = "exact"
UPPER = "upper-bound"


@dataclass(frozen=True)
class EmbeddingNorm:
    """Norm of the embedding (equal to the norm of its inverse).

    ``corner`` is ``(p1, p2)`` when the value comes from an exact corner
    formula and ``None`` for interpolation bounds.
    """

    value: float
    exactness: str
    corner: tuple | None = None


def _check_M(M):
    M = float(M)
    if not (M >= 0 and math.isfinite(M)):
        raise ConfigError(f"M must be finite and nonnegative, got {M!r}")
    return M


def _corner_pair(p1, p2):
    p1, p2 = as_exponent(p1), as_exponent(p2)
    if not (p1.is_one or p1.infinite) or not (p2.is_one or p2.infinite):
        raise ConfigError("corner norms need p1, p2 in {1, inf}")
    return p1, p2


def _log_product(w: ProductWeights, M: float) -> float:
    """``sum_j log(1 + gamma_j M)``."""
    if M == 0.0:
        return 0.0
    try:
        return log_one_plus_product(w, M, 1.0)
    except DivergentTail as exc:
        raise DivergentProduct(f"prod (1 + gamma_j M) diverges: {exc}") from None


def _subset_corner(w: ExplicitWeights, M: float, p2_is_one: bool) -> float:
    vals = np.asarray(w.values, dtype=float)
    live = vals > 0
    if p2_is_one:
        # h[u] = sum_{v <= u} M**(|u|-|v|) / gamma_v, by a subset-sum sweep
        h = np.where(live, 1.0 / np.where(live, vals, 1.0), 0.0)
        for i in range(w.s):
            bit = 1 << i
            idx = np.arange(1 << w.s)
            has = (idx & bit) != 0
            h[has] += M * h[idx[has] ^ bit]
        return float(np.max(vals[live] * h[live]))
    # g[u] = sum_{v disjoint from u} gamma_{u+v} M**|v|, by a superset sweep
    g = vals.copy()
    idx = np.arange(1 << w.s)
    for i in range(w.s):
        bit = 1 << i
        lacks = (idx & bit) == 0
        g[lacks] += M * g[idx[lacks] | bit]
    return float(np.max(g[live] / vals[live]))


def corner_norm(w, M: float, p1, p2) -> EmbeddingNorm:
    """Exact embedding norm for ``p1, p2 in {1, inf}``.

    Product weights give ``prod_j (1 + gamma_j M)`` for all four corners.
    Explicit weights use

    * ``p2 = 1``:   ``max_u sum_{v <= u} gamma_u / gamma_v * M**(|u|-|v|)``
    * ``p2 = inf``: ``max_u sum_{v <= [s]\\u} gamma_{u+v} / gamma_u * M**|v|``

    evaluated with O(s 2**s) subset transforms.
    """
    p1, p2 = _corner_pair(p1, p2)
    M = _check_M(M)
    corner = (p1, p2)
    if isinstance(w, ProductWeights):
        return EmbeddingNorm(math.exp(_log_product(w, M)), EXACT, corner)
    if isinstance(w, ExplicitWeights):
        return EmbeddingNorm(_subset_corner(w, M, p2.is_one), EXACT, corner)
    raise ConfigError(f"unsupported weight family {type(w).__name__}")


def interpolated_bound(w, p1, p2, M1: float, Minf: float) -> EmbeddingNorm:
    """Upper bound on the embedding norm for arbitrary ``p1, p2``.

    ``M1`` is the sup norm of the averaged kernel at ``p1 = 1`` and ``Minf``
    its ``L_1`` norm at ``p1 = inf``. Product weights give
    ``prod_j (1 + gamma_j M1)**(1/p1) (1 + gamma_j Minf)**(1 - 1/p1)``.
    Explicit weights combine the corner norms with exponents that depend on
    whether ``p1 <= p2``. Infinite inputs give an infinite bound.
    """
    p1, p2 = as_exponent(p1), as_exponent(p2)
    M1, Minf = float(M1), float(Minf)
    if M1 < 0 or Minf < 0:
        raise ConfigError("kernel norms must be nonnegative")
    at_corner = (p1.is_one or p1.infinite) and (p2.is_one or p2.infinite)
    exactness = EXACT if at_corner else UPPER
    corner = (p1, p2) if at_corner else None
    a = p1.reciprocal
    b = p2.reciprocal

    if isinstance(w, ProductWeights):
        logs = []
        for M, e in ((M1, a), (Minf, 1.0 - a)):
            if e == 0.0:
                continue
            if math.isinf(M):
                return EmbeddingNorm(math.inf, exactness, corner)
            logs.append(e * _log_product(w, M))
        return EmbeddingNorm(math.exp(math.fsum(logs)), exactness, corner)

    if not isinstance(w, ExplicitWeights):
        raise ConfigError(f"unsupported weight family {type(w).__name__}")
    one, inf = as_exponent(1), as_exponent(math.inf)
    if p1 <= p2:
        parts = (((one, inf), M1, a - b), ((one, one), M1, b), ((inf, inf), Minf, 1.0 - a))
    else:
        parts = (((inf, one), Minf, b - a), ((one, one), M1, a), ((inf, inf), Minf, 1.0 - b))
    logs = []
    for (q1, q2), M, e in parts:
        if e == 0.0:
            continue
        if math.isinf(M):
            return EmbeddingNorm(math.inf, exactness, corner)
        logs.append(e * math.log(corner_norm(w, M, q1, q2).value))
    return EmbeddingNorm(math.exp(math.fsum(logs)), exactness, corner)
