"""Exponents, weight families and carefully summed infinite series.

Every other module builds on three things defined here:

* :class:`Exponent`, a value in ``[1, inf]`` where infinity is a flag rather
  than a float sentinel, so that callers dispatch between sums and suprema.
* :class:`ProductWeights` (``gamma_u = prod_{j in u} gamma_j``) and
  :class:`ExplicitWeights` (one number per subset, small ``s`` only).
* Tail sums ``sum_{j>k} gamma_j**t`` and log-products
  ``sum_j log(1 + (c gamma_j)**t)`` for possibly infinitely many variables,
  returned together with a rigorous enclosing interval.
"""

from __future__ import annotations

import functools
import math
import warnings
from dataclasses import dataclass
from typing import Iterable, Mapping, NamedTuple, Union

import numpy as np

from .errors import (
    ConfigError,
    DimensionTooLarge,
    DivergentTail,
    InvalidIndex,
    NonMonotoneWeights,
)

__all__ = [
    "Exponent",
    "as_exponent",
    "conjugate",
    "ProductWeights",
    "ExplicitWeights",
    "WeightFamily",
    "Bracket",
    "tail_power_sum",
    "tail_power_bracket",
    "log_one_plus_product",
    "log_one_plus_product_bracket",
    "DEFAULT_TOL",
    "MAX_EXPLICIT_S",
]

DEFAULT_TOL = 1e-13
MAX_EXPLICIT_S = 25

# Partial sums longer than this switch the enclosure from integral bounds
# to the Euler-Maclaurin remainder bound.
_MAX_PARTIAL_TERMS = 1 << 22


# ---------------------------------------------------------------------------
# Exponents
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Exponent:
    """An exponent ``p`` in ``[1, inf]``.

    ``value`` holds the finite value and is ignored when ``infinite`` is set.
    Use :func:`as_exponent` to build one from a number or a string.
    """

    value: float = 1.0
    infinite: bool = False

    def __post_init__(self):
        if self.infinite:
            object.__setattr__(self, "value", 1.0)
            return
        v = float(self.value)
        if math.isnan(v) or v < 1.0:
            raise ConfigError(f"exponent must lie in [1, inf], got {self.value!r}")
        if math.isinf(v):
            raise ConfigError("use Exponent.inf() for an infinite exponent")
        object.__setattr__(self, "value", v)

    @classmethod
    def inf(cls) -> "Exponent":
        return cls(infinite=True)

    @property
    def is_one(self) -> bool:
        return not self.infinite and self.value == 1.0

    @property
    def reciprocal(self) -> float:
        """``1/p``, with ``1/inf = 0``."""
        return 0.0 if self.infinite else 1.0 / self.value

    def conjugate(self) -> "Exponent":
        return conjugate(self)

    def __float__(self) -> float:
        return math.inf if self.infinite else self.value

    def __str__(self) -> str:
        return "inf" if self.infinite else f"{self.value:g}"

    def __lt__(self, other):
        return float(self) < float(as_exponent(other))

    def __le__(self, other):
        return float(self) <= float(as_exponent(other))


def as_exponent(p) -> Exponent:
    if isinstance(p, Exponent):
        return p
    if isinstance(p, str):
        key = p.strip().lower()
        if key in ("inf", "infinity", "+inf", "oo"):
            return Exponent.inf()
        p = float(key)
    p = float(p)
    if math.isinf(p) and p > 0:
        return Exponent.inf()
    return Exponent(p)


def conjugate(p) -> Exponent:
    """Return ``p*`` with ``1/p + 1/p* = 1`` (``1 <-> inf`` exactly)."""
    p = as_exponent(p)
    if p.infinite:
        return Exponent(1.0)
    if p.value == 1.0:
        return Exponent.inf()
    return Exponent(p.value / (p.value - 1.0))


# ---------------------------------------------------------------------------
# Weights
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ProductWeights:
    """Product weights ``gamma_u = prod_{j in u} gamma_j``.

    Either a polynomial rule ``gamma_j = scale * j**(-alpha)`` (``s`` finite or
    ``None`` for infinitely many variables) or a finite nonincreasing
    ``sequence``. Build with :meth:`polynomial` or :meth:`from_sequence`.
    """

    alpha: float | None = None
    sequence: tuple | None = None
    s: int | None = None
    scale: float = 1.0

    def __post_init__(self):
        if (self.alpha is None) == (self.sequence is None):
            raise ConfigError("give exactly one of alpha or sequence")
        if self.alpha is not None:
            if not (self.alpha > 0 and math.isfinite(self.alpha)):
                raise ConfigError(f"alpha must be positive, got {self.alpha!r}")
            if not (self.scale > 0 and math.isfinite(self.scale)):
                raise ConfigError(f"scale must be positive, got {self.scale!r}")
            if self.s is not None and self.s < 0:
                raise ConfigError("s must be nonnegative")
        else:
            seq = tuple(float(g) for g in self.sequence)
            if any(not (g > 0 and math.isfinite(g)) for g in seq):
                raise ConfigError("product weights must be positive and finite")
            if any(b > a for a, b in zip(seq, seq[1:])):
                raise NonMonotoneWeights(
                    "product weight sequence must be nonincreasing; "
                    "use ExplicitWeights for arbitrary per-subset weights"
                )
            object.__setattr__(self, "sequence", seq)
            s = len(seq) if self.s is None else self.s
            if s > len(seq) or s < 0:
                raise ConfigError(f"s={s} exceeds the {len(seq)} supplied weights")
            object.__setattr__(self, "s", s)
            object.__setattr__(self, "scale", 1.0)

    @classmethod
    def polynomial(cls, alpha, s=None, scale=1.0) -> "ProductWeights":
        alpha = float(alpha)
        if alpha.is_integer():
            alpha = int(alpha)
        return cls(alpha=alpha, s=s, scale=float(scale))

    @classmethod
    def from_sequence(cls, gammas: Iterable[float], s=None) -> "ProductWeights":
        return cls(sequence=tuple(gammas), s=s)

    @property
    def is_infinite(self) -> bool:
        return self.s is None

    def scaled(self, c: float) -> "ProductWeights":
        """Weights ``c * gamma_j`` (monotonicity is preserved)."""
        if self.alpha is not None:
            return ProductWeights(alpha=self.alpha, s=self.s, scale=self.scale * c)
        return ProductWeights(sequence=tuple(c * g for g in self.sequence), s=self.s)

    def truncated(self, s: int) -> "ProductWeights":
        if self.s is not None and s > self.s:
            raise InvalidIndex(f"cannot extend s={self.s} to {s}")
        if self.alpha is not None:
            return ProductWeights(alpha=self.alpha, s=s, scale=self.scale)
        return ProductWeights(sequence=self.sequence[:s], s=s)

    def gamma(self, j: int) -> float:
        """The one-dimensional weight ``gamma_j`` (1-based)."""
        if j < 1 or (self.s is not None and j > self.s):
            raise InvalidIndex(f"index {j} outside 1..{self.s}")
        if self.sequence is not None:
            return self.sequence[j - 1]
        if isinstance(self.alpha, int):
            # exact integer power then one correctly rounded division
            return self.scale / (j**self.alpha)
        return self.scale / j**self.alpha

    def power_terms(self, start: int, stop: int, t: float) -> np.ndarray:
        """``gamma_j**t`` for ``start <= j <= stop`` as an array."""
        if stop < start:
            return np.zeros(0)
        if self.sequence is not None:
            return np.asarray(self.sequence[start - 1 : stop]) ** t
        j = np.arange(start, stop + 1, dtype=float)
        return self.scale**t * j ** (-self.alpha * t)

    def gammas(self, n: int | None = None) -> np.ndarray:
        """The first ``n`` weights (all of them for finite ``s``)."""
        if n is None:
            if self.s is None:
                raise ConfigError("n is required for infinitely many variables")
            n = self.s
        return self.power_terms(1, n, 1.0)


class ExplicitWeights:
    """One weight per subset ``u`` of ``{1..s}``, stored by bitmask.

    ``table`` maps subsets (any iterable of 1-based indices) to weights.
    Omitted subsets get weight 0; a positive weight requires all of its
    subsets to be positive as well. Bit ``j-1`` of a mask encodes ``j``.
    """

    def __init__(self, s: int, table: Mapping):
        if s < 0:
            raise ConfigError("s must be nonnegative")
        if s > MAX_EXPLICIT_S:
            raise DimensionTooLarge(
                f"explicit weights limited to s <= {MAX_EXPLICIT_S}, got {s}"
            )
        self.s = int(s)
        values = np.zeros(1 << self.s)
        for key, g in table.items():
            mask = self.mask_of(key)
            g = float(g)
            if not (g >= 0 and math.isfinite(g)):
                raise ConfigError(f"weight for {sorted(self.members(mask))} must be >= 0")
            values[mask] = g
        self._check_downward_closed(values)
        values.flags.writeable = False
        self.values = values

    def mask_of(self, u) -> int:
        if isinstance(u, (int, np.integer)):
            raise ConfigError("subsets are given as iterables of indices, not ints")
        mask = 0
        for j in u:
            j = int(j)
            if not 1 <= j <= self.s:
                raise InvalidIndex(f"index {j} outside 1..{self.s}")
            mask |= 1 << (j - 1)
        return mask

    @staticmethod
    def members(mask: int) -> frozenset:
        return frozenset(i + 1 for i in range(mask.bit_length()) if mask >> i & 1)

    def _check_downward_closed(self, values):
        masks = np.arange(values.size)
        for i in range(self.s):
            bit = 1 << i
            has = (masks & bit) != 0
            bad = has & (values > 0) & (values[masks ^ bit] <= 0)
            if bad.any():
                m = int(np.flatnonzero(bad)[0])
                raise ConfigError(
                    f"weight of {sorted(self.members(m))} is positive but "
                    f"{sorted(self.members(m ^ bit))} has weight 0"
                )

    @classmethod
    def from_product(cls, gammas: Iterable[float], empty: float = 1.0) -> "ExplicitWeights":
        """Materialize ``gamma_u = empty * prod_{j in u} gamma_j`` for all ``u``."""
        g = [float(x) for x in gammas]
        s = len(g)
        if s > MAX_EXPLICIT_S:
            raise DimensionTooLarge(f"cannot materialize {s} > {MAX_EXPLICIT_S} weights")
        values = np.array([empty])
        for gj in g:
            values = np.concatenate([values, values * gj])
        obj = cls.__new__(cls)
        obj.s = s
        values.flags.writeable = False
        obj.values = values
        return obj

    @functools.cached_property
    def popcounts(self) -> np.ndarray:
        masks = np.arange(1 << self.s, dtype=np.int64)
        counts = np.zeros(masks.size, dtype=np.int64)
        for i in range(self.s):
            counts += (masks >> i) & 1
        return counts

    def gamma(self, u) -> float:
        return float(self.values[self.mask_of(u)])

    def __repr__(self):
        return f"ExplicitWeights(s={self.s})"


WeightFamily = Union[ProductWeights, ExplicitWeights]


# ---------------------------------------------------------------------------
# Infinite sums
# ---------------------------------------------------------------------------


class Bracket(NamedTuple):
    """A point estimate together with a rigorous enclosure."""

    estimate: float
    lower: float
    upper: float

    @property
    def width(self) -> float:
        return self.upper - self.lower


def _zeta_tail(beta: float, m: int):
    """Enclose ``sum_{j>m} j**-beta`` for ``beta > 1``, ``m >= 1``.

    Returns ``(lower, estimate, upper, em_error)``; the bounds come from
    integral comparison, the estimate from Euler-Maclaurin with error at
    most ``em_error`` (the first omitted term, valid since all even
    derivatives of ``x**-beta`` are positive).
    """
    b1 = beta - 1.0
    lower = (m + 1.0) ** (-b1) / b1
    upper = float(m) ** (-b1) / b1
    fm = float(m) ** (-beta)
    est = (
        upper
        - fm / 2.0
        + beta * fm / m / 12.0
        - beta * (beta + 1) * (beta + 2) * fm / m**3 / 720.0
    )
    em_err = beta * (beta + 1) * (beta + 2) * (beta + 3) * (beta + 4) * fm / m**5 / 30240.0
    return lower, min(max(est, lower), upper), upper, em_err


def _check_index(w: ProductWeights, k: int):
    if k < 0 or (w.s is not None and k > w.s):
        raise InvalidIndex(f"k={k} outside 0..{w.s if w.s is not None else 'inf'}")


def _divergence_check(w: ProductWeights, t: float, what: str):
    if w.s is None and w.alpha * t <= 1.0:
        raise DivergentTail(
            f"{what} diverges for gamma_j ~ j^-{w.alpha} with exponent {t:g} "
            f"(need alpha*t > 1)"
        )


def _choose_cutoff(coef: float, beta: float, tol: float, start: int) -> tuple[int, bool]:
    """Smallest ``m >= start`` whose integral-bracket width is below ``tol/2``.

    The width is ``coef * (m**(1-b) - (m+1)**(1-b)) / (b-1) <= coef * m**-b``;
    the other half of ``tol`` absorbs rounding in the partial sum.
    Returns ``(m, capped)``.
    """
    start = max(start, 1)
    need = (2.0 * coef / tol) ** (1.0 / beta) if tol > 0 else math.inf
    if need <= start:
        return start, False
    if need - start > _MAX_PARTIAL_TERMS:
        return start + _MAX_PARTIAL_TERMS, True
    return max(start, math.ceil(need)), False


def _fsum_bracket(terms) -> tuple[float, float, float]:
    total = math.fsum(terms)
    # each term carries a few ulps of rounding from pow
    slack = 4 * np.finfo(float).eps * total
    return total, total - slack, total + slack


def tail_power_bracket(w: ProductWeights, k: int, t: float, tol: float = DEFAULT_TOL) -> Bracket:
    """Enclose ``sum_{j=k+1}^{s} gamma_j**t``.

    Finite ``s`` is summed directly. For infinitely many polynomial weights
    the terms up to a cutoff ``m`` are summed exactly and the remainder is
    bracketed by ``int_{m+1}^inf`` and ``int_m^inf``, with ``m`` grown until
    the bracket is narrower than ``tol``.
    """
    t = float(t)
    if not t > 0:
        raise ConfigError("t must be positive")
    _check_index(w, k)
    if w.s is not None:
        total = math.fsum(w.power_terms(k + 1, w.s, t))
        return Bracket(total, total, total)
    _divergence_check(w, t, "tail sum")
    beta = w.alpha * t
    coef = w.scale**t
    m, capped = _choose_cutoff(coef, beta, tol, max(k, 16))
    head, head_lo, head_hi = _fsum_bracket(w.power_terms(k + 1, m, t))
    lo, est, hi, em_err = _zeta_tail(beta, m)
    estimate = head + coef * est
    lower, upper = head_lo + coef * lo, head_hi + coef * hi
    if capped:
        lower = max(lower, head_lo + coef * (est - em_err))
        upper = min(upper, head_hi + coef * (est + em_err))
        if upper - lower > tol:
            warnings.warn(
                f"tail enclosure width {upper - lower:.3g} exceeds tol={tol:.3g}",
                RuntimeWarning,
                stacklevel=2,
            )
    return Bracket(estimate, lower, upper)


def tail_power_sum(w: ProductWeights, k: int, t: float, tol: float = DEFAULT_TOL) -> float:
    """``sum_{j=k+1}^{s} gamma_j**t`` (see :func:`tail_power_bracket`)."""
    return tail_power_bracket(w, k, t, tol).estimate


def log_one_plus_product_bracket(
    w: ProductWeights, c: float, t: float, tol: float = DEFAULT_TOL
) -> Bracket:
    """Enclose ``sum_{j=1}^{s} log(1 + (c gamma_j)**t)``.

    For infinitely many weights the remainder after ``m`` terms lies in
    ``[X - X2/2, X]`` with ``X = sum_{j>m} x_j`` and ``X2 = sum_{j>m} x_j**2``.
    """
    return _log_product_cached(w, float(c), float(t), float(tol))


@functools.lru_cache(maxsize=256)
def _log_product_cached(w: ProductWeights, c: float, t: float, tol: float) -> Bracket:
    if c < 0 or not math.isfinite(c):
        raise ConfigError("c must be finite and nonnegative")
    if not t > 0:
        raise ConfigError("t must be positive")
    if c == 0.0:
        return Bracket(0.0, 0.0, 0.0)
    if w.s is not None:
        x = c**t * w.power_terms(1, w.s, t)
        total = math.fsum(np.log1p(x))
        return Bracket(total, total, total)
    _divergence_check(w, t, "product")
    beta = w.alpha * t
    coef = (c * w.scale) ** t
    # the alternating log series needs x_j < 1/2 beyond the cutoff
    start = max(16, math.ceil((2.0 * coef) ** (1.0 / beta)) + 1)
    m, capped = _choose_cutoff(coef, beta, tol, start)
    x = coef * np.arange(1, m + 1, dtype=float) ** (-beta)
    head, head_lo, head_hi = _fsum_bracket(np.log1p(x))

    lo1, est1, hi1, err1 = _zeta_tail(beta, m)
    lo2, _, hi2, _ = _zeta_tail(2 * beta, m)
    lower = head_lo + coef * lo1 - coef**2 * hi2 / 2.0
    upper = head_hi + coef * hi1

    # log(1+x) = sum_n (-1)^(n+1) x^n / n; x_j <= 1/2 so terms shrink fast
    series, err = 0.0, coef * err1
    n = 1
    while True:
        lo_n, est_n, hi_n, err_n = _zeta_tail(n * beta, m)
        term = coef**n * est_n / n
        if n > 1:
            err += coef**n * err_n / n
        series += term if n % 2 else -term
        if term <= 1e-18 * abs(series) or n >= 200:
            err += coef ** (n + 1) * _zeta_tail((n + 1) * beta, m)[2] / (n + 1)
            break
        n += 1
    estimate = head + series
    if capped:
        lower = max(lower, head_lo + series - err)
        upper = min(upper, head_hi + series + err)
    return Bracket(min(max(estimate, lower), upper), lower, upper)


def log_one_plus_product(w: ProductWeights, c: float, t: float, tol: float = DEFAULT_TOL) -> float:
    """``sum_{j=1}^{s} log(1 + (c gamma_j)**t)`` (see the bracket variant)."""
    return log_one_plus_product_bracket(w, c, t, tol).estimate
