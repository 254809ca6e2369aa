"""Brute-force reference computations.

These enumerate subsets directly and share no code with the closed forms
or the vectorized subset transforms they are used to check. They ship with
the library so the CLI can run them on demand (``--verify``).
"""

from __future__ import annotations

import math

from .core import ExplicitWeights, as_exponent
from .errors import ConfigError, DimensionTooLarge, InvalidIndex
from .quadrature import adaptive_quadrature, numerical_sup

__all__ = [
    "subset_sum_oracle",
    "corner_norm_oracle",
    "adaptive_quadrature",
    "numerical_sup",
    "gray_code_subsets",
]

SUBSET_ORACLE_MAX_S = 25
CORNER_ORACLE_MAX_S = 15


def gray_code_subsets(s: int):
    """Yield ``(mask, size)`` for every subset of ``{1..s}`` in Gray order.

    Consecutive masks differ in one bit, so the size is updated in O(1).
    """
    mask, size = 0, 0
    yield mask, size
    for i in range(1, 1 << s):
        bit = (i & -i)
        mask ^= bit
        size += 1 if mask & bit else -1
        yield mask, size


def subset_sum_oracle(w: ExplicitWeights, C1: float, k: int, t) -> float:
    """``sum_{u not subset of [k]} (C1**|u| gamma_u)**t`` by enumeration.

    ``t = inf`` gives the supremum of ``C1**|u| gamma_u`` instead.
    """
    if w.s > SUBSET_ORACLE_MAX_S:
        raise DimensionTooLarge(f"oracle limited to s <= {SUBSET_ORACLE_MAX_S}")
    if not 0 <= k <= w.s:
        raise InvalidIndex(f"k={k} outside 0..{w.s}")
    t = as_exponent(t)
    values = w.values
    powers = [C1**n for n in range(w.s + 1)]
    if t.infinite:
        best = 0.0
        for mask, size in gray_code_subsets(w.s):
            if mask >> k:
                best = max(best, powers[size] * float(values[mask]))
        return best
    tt = t.value
    terms = []
    for mask, size in gray_code_subsets(w.s):
        if mask >> k:
            terms.append((powers[size] * float(values[mask])) ** tt)
    return math.fsum(terms)


def _submasks(mask):
    sub = mask
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & mask


def corner_norm_oracle(w: ExplicitWeights, M: float, p1, p2) -> float:
    """Exact anchored/unanchored embedding norm at ``p1, p2 in {1, inf}``.

    ``p2 = 1``:   ``max_u sum_{v <= u} gamma_u / gamma_v * M**(|u|-|v|)``
    ``p2 = inf``: ``max_u sum_{v <= [s]\\u} gamma_{u+v} / gamma_u * M**|v|``

    The maximum runs over subsets with positive weight. ``M`` is the norm of
    the averaged kernel matching ``p1`` (``L_inf`` for ``p1 = 1``, ``L_1``
    for ``p1 = inf``); ``p1`` itself only selects that input.
    """
    if w.s > CORNER_ORACLE_MAX_S:
        raise DimensionTooLarge(f"oracle limited to s <= {CORNER_ORACLE_MAX_S}")
    p1, p2 = as_exponent(p1), as_exponent(p2)
    if not (p1.is_one or p1.infinite) or not (p2.is_one or p2.infinite):
        raise ConfigError("corner norms need p1, p2 in {1, inf}")
    full = (1 << w.s) - 1
    best = 0.0
    for u in range(1 << w.s):
        gu = float(w.values[u])
        if gu <= 0:
            continue
        nu = bin(u).count("1")
        if p2.is_one:
            total = math.fsum(
                gu / float(w.values[v]) * M ** (nu - bin(v).count("1"))
                for v in _submasks(u)
            )
        else:
            rest = full & ~u
            total = math.fsum(
                float(w.values[u | v]) / gu * M ** bin(v).count("1")
                for v in _submasks(rest)
            )
        best = max(best, total)
    return best
