"""Kernel families and the per-variable norm constants they induce.

A one-variable space is described by a kernel ``kappa(x, t)`` on ``D x D``
and a positive weight ``psi`` on ``D``; its members are
``f(x) = int_D g(t) kappa(x, t) dt`` with ``||f|| = ||g||_{L_p1, psi}``.
Three constants follow from it:

``kappa_hat(x)``
    ``|| kappa(x, .) / psi**(1/p1) ||_{L_p1*}``, pointwise size of ``f(x)``.
``kappa_tilde``
    ``|| kappa_hat ||_{L_q(omega)}``, the constant ``C1`` for
    ``L_q(omega)`` approximation.
``kappa_bar``
    ``|| int_D kappa(x, .) omega(x) dx / psi**(1/p1) ||_{L_p1*}``, the
    constant ``C1`` for integration against ``omega``.

Closed forms are used where they are known, tagged ``exact`` or
``upper-bound``; everything else goes through adaptive quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np

from .core import Exponent, as_exponent, conjugate
from .errors import ConfigError, DivergentIntegral, IncompatibleSpec, NoConvergence
from .quadrature import adaptive_quadrature, numerical_sup
from .special import beta_function, gamma_function, lower_incomplete_gamma

__all__ = [
    "AnchoredStep",
    "PolyExp",
    "SmoothG",
    "Custom",
    "KernelSpec",
    "Uniform01",
    "Exponential",
    "DensitySpec",
    "Approximation",
    "Integration",
    "ProblemSpec",
    "ConstantResult",
    "kappa_hat",
    "kappa_tilde",
    "kappa_bar_norm",
    "gamma_function",
    "CHECK_GRID",
]

EXACT = "exact"
UPPER = "upper-bound"
QUADRATURE = "quadrature"

INF = math.inf
# inner values this large come from sampling next to overflow, not from the
# function itself, and are treated as overflow
_SATURATED = 1e300

# parameters on which every closed form is checked against quadrature
CHECK_GRID = {
    "r": (1, 2, 3),
    "lam": (-0.5, 0.0, 1.0),
    "mu": (0.5, 1.0, 2.0),
    "p1": (1.0, 1.5, 2.0, INF),
    "q": (1.0, 2.0, INF),
    "x": (0.3, 1.0, 4.0),
}


# ---------------------------------------------------------------------------
# kernels
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AnchoredStep:
    """``kappa(x, t) = 1 if t < x else 0`` on ``[0, 1]`` with ``psi = 1``."""

    domain = (0.0, 1.0)

    def kappa(self, x, t):
        return np.where(np.asarray(t) < x, 1.0, 0.0)

    def inv_psi_power(self, t, a):
        return np.ones_like(np.asarray(t, dtype=float))

    def kinks(self, x):
        return (x,)


@dataclass(frozen=True)
class PolyExp:
    """``kappa(x, t) = (x - t)_+**(r-1) / (r-1)!`` on ``[0, inf)``, ``psi = e**(lam t)``."""

    r: int = 1
    lam: float = 0.0
    domain = (0.0, INF)

    def __post_init__(self):
        if int(self.r) != self.r or self.r < 1:
            raise ConfigError(f"r must be a positive integer, got {self.r!r}")
        object.__setattr__(self, "r", int(self.r))
        object.__setattr__(self, "lam", float(self.lam))

    def kappa(self, x, t):
        d = np.maximum(x - np.asarray(t, dtype=float), 0.0)
        if self.r == 1:
            return np.where(d > 0, 1.0, 0.0)
        return d ** (self.r - 1) / math.factorial(self.r - 1)

    def inv_psi_power(self, t, a):
        return np.exp(-self.lam * a * np.asarray(t, dtype=float))

    def kinks(self, x):
        return (x,)


_G_FUNCS = {
    "one-minus-exp": lambda y: -np.expm1(-y),
    "one-minus-cos": lambda y: 2.0 * np.sin(0.5 * y) ** 2,
}


@dataclass(frozen=True)
class SmoothG:
    """``kappa(x, t) = G(x t)`` on ``[0, inf)`` with ``psi = e**(lam t)``.

    ``g`` is ``"one-minus-exp"`` (``1 - e**-y``) or ``"one-minus-cos"``.
    Only finiteness of the constants is checked, numerically.
    """

    g: str = "one-minus-exp"
    lam: float = 1.0
    domain = (0.0, INF)

    def __post_init__(self):
        if self.g not in _G_FUNCS:
            raise ConfigError(f"unknown G {self.g!r}; choose from {sorted(_G_FUNCS)}")
        object.__setattr__(self, "lam", float(self.lam))

    def kappa(self, x, t):
        return _G_FUNCS[self.g](x * np.asarray(t, dtype=float))

    def inv_psi_power(self, t, a):
        return np.exp(-self.lam * a * np.asarray(t, dtype=float))

    def kinks(self, x):
        return ()


@dataclass(frozen=True)
class Custom:
    """User kernel ``kappa(x, t)`` and weight ``psi(t)`` on ``domain``.

    Both callables must accept numpy arrays in ``t``. ``kinks(x)`` may list
    points in ``t`` where ``kappa(x, .)`` is not smooth. ``certificate`` is a
    set of ``x`` values at which ``kappa_hat`` must come out finite.
    """

    kappa_fn: Callable
    psi_fn: Callable
    domain: tuple = (0.0, INF)
    kinks_fn: Callable | None = None
    certificate: tuple = (0.5, 1.0)

    def __post_init__(self):
        a, b = self.domain
        if not a <= 0.0 <= b:
            raise ConfigError("domain must contain the anchor 0")
        hi = b if math.isfinite(b) else 50.0
        lo = a if math.isfinite(a) else -50.0
        ts = np.linspace(lo, hi, 32)
        vals = np.asarray(self.kappa_fn(0.0, ts), dtype=float)
        if np.any(np.abs(vals) > 1e-12):
            raise ConfigError("custom kernel is not anchored: kappa(0, t) != 0")

    def kappa(self, x, t):
        return np.asarray(self.kappa_fn(x, np.asarray(t, dtype=float)), dtype=float)

    def inv_psi_power(self, t, a):
        return np.asarray(self.psi_fn(np.asarray(t, dtype=float)), dtype=float) ** (-a)

    def kinks(self, x):
        return tuple(self.kinks_fn(x)) if self.kinks_fn else ()


KernelSpec = Union[AnchoredStep, PolyExp, SmoothG, Custom]


# ---------------------------------------------------------------------------
# densities and problems
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Uniform01:
    domain = (0.0, 1.0)

    def pdf(self, x):
        return np.ones_like(np.asarray(x, dtype=float))


@dataclass(frozen=True)
class Exponential:
    """``omega(x) = mu e**(-mu x)`` on ``[0, inf)``."""

    mu: float = 1.0
    domain = (0.0, INF)

    def __post_init__(self):
        if not (self.mu > 0 and math.isfinite(self.mu)):
            raise ConfigError(f"mu must be positive, got {self.mu!r}")
        object.__setattr__(self, "mu", float(self.mu))

    def pdf(self, x):
        return self.mu * np.exp(-self.mu * np.asarray(x, dtype=float))


DensitySpec = Union[Uniform01, Exponential]


@dataclass(frozen=True)
class Approximation:
    """Embedding into ``L_q(omega)``."""

    q: Exponent = field(default_factory=lambda: Exponent(2.0))

    def __post_init__(self):
        object.__setattr__(self, "q", as_exponent(self.q))


@dataclass(frozen=True)
class Integration:
    """Integration against ``omega``."""


@dataclass(frozen=True)
class ProblemSpec:
    kernel: KernelSpec
    density: DensitySpec
    problem: Union[Approximation, Integration]
    p1: Exponent = field(default_factory=lambda: Exponent(2.0))

    def __post_init__(self):
        object.__setattr__(self, "p1", as_exponent(self.p1))
        if tuple(self.kernel.domain) != tuple(self.density.domain):
            raise IncompatibleSpec(
                f"{type(self.kernel).__name__} lives on {self.kernel.domain} but "
                f"{type(self.density).__name__} on {self.density.domain}"
            )


@dataclass(frozen=True)
class ConstantResult:
    """A norm constant. ``value`` may be ``inf`` when the constant diverges."""

    value: float
    exactness: str = EXACT
    err_estimate: float = 0.0
    branch: str = ""

    @property
    def is_finite(self) -> bool:
        return math.isfinite(self.value)


def _divergent(branch):
    return ConstantResult(INF, EXACT, 0.0, branch)


# ---------------------------------------------------------------------------
# kappa_hat
# ---------------------------------------------------------------------------


def kappa_hat(kernel: KernelSpec, p1, x: float, method: str = "auto") -> ConstantResult:
    """``kappa_hat_{p1}(x)``; ``method="quadrature"`` skips closed forms."""
    p1 = as_exponent(p1)
    x = float(x)
    a, b = kernel.domain
    if not a <= x <= b:
        raise ConfigError(f"x={x} outside the domain {kernel.domain}")
    if method not in ("auto", "quadrature"):
        raise ConfigError(f"unknown method {method!r}")
    if method == "auto":
        closed = _kappa_hat_closed(kernel, p1, x)
        if closed is not None:
            return closed
    return _kappa_hat_numeric(kernel, p1, x)


def _kappa_hat_closed(kernel, p1: Exponent, x: float):
    if isinstance(kernel, AnchoredStep):
        if x == 0.0:
            return ConstantResult(0.0, EXACT, branch="anchor")
        return ConstantResult(x ** conjugate(p1).reciprocal, EXACT, branch="x^(1/p1*)")
    if not isinstance(kernel, PolyExp):
        return None
    r, lam = kernel.r, kernel.lam
    if x == 0.0:
        return ConstantResult(0.0, EXACT, branch="anchor")
    fact = math.factorial(r - 1)
    if p1.infinite:
        # psi**0 = 1: integral of (x-t)^(r-1)/(r-1)! over [0, x]
        return ConstantResult(x**r / math.factorial(r), EXACT, branch="p1=inf: x^r/r!")
    if p1.is_one:
        if lam >= 0 or x <= (r - 1) / abs(lam):
            return ConstantResult(x ** (r - 1) / fact, EXACT, branch="p1=1, max at t=0")
        # 0**0 = 1 covers r = 1
        val = (r - 1) ** (r - 1) * math.exp(abs(lam) * x - (r - 1)) / (abs(lam) ** (r - 1) * fact)
        return ConstantResult(val, EXACT, branch="p1=1, interior max")
    ps = conjugate(p1).value
    inv = 1.0 / ps
    if r == 1:
        if lam == 0:
            return ConstantResult(x**inv, EXACT, branch="r=1, lam=0")
        c = (p1.value - 1.0) / abs(lam)
        if lam > 0:
            val = (c * -math.expm1(-x / c)) ** inv
            return ConstantResult(val, EXACT, branch="r=1, lam>0")
        val = (c * math.expm1(x / c)) ** inv
        return ConstantResult(val, EXACT, branch="r=1, lam<0")
    base = (r - 1) * ps + 1.0
    if lam >= 0:
        val = x ** (r - 1.0 / p1.value) / (fact * base**inv)
        return ConstantResult(val, UPPER, branch="r>=2, lam>=0 bound")
    first = x / base
    second = 1.0 / (abs(lam) * (ps - 1.0))
    active = "x/((r-1)p1*+1)" if first <= second else "1/(|lam|(p1*-1))"
    val = math.exp(abs(lam) * x / p1.value) * x ** (r - 1) / fact * min(first, second) ** inv
    return ConstantResult(val, UPPER, branch=f"r>=2, lam<0 bound, min at {active}")


def _support_end(kernel, x):
    # kappa(x, t) = 0 for t >= x
    if isinstance(kernel, (PolyExp, AnchoredStep)):
        return min(kernel.domain[1], x)
    return kernel.domain[1]


def _scale_breaks(a, b):
    """Decade breakpoints so long panels cannot step over mass near ``a``."""
    if not (math.isfinite(b) and b - a > 10.0):
        return ()
    n = int(math.log10(b - a))
    return tuple(a + 10.0**k for k in range(-2, n + 1))


def _kappa_hat_numeric(kernel, p1: Exponent, x: float, rtol: float = 1e-12) -> ConstantResult:
    a = kernel.domain[0]
    b = _support_end(kernel, x)
    kinks = kernel.kinks(x)
    if p1.is_one:
        # essential sup of |kappa| / psi
        def ratio(t):
            with np.errstate(all="ignore"):
                return np.abs(kernel.kappa(x, t)) * kernel.inv_psi_power(t, 1.0)

        try:
            val, err = numerical_sup(ratio, a, b, breakpoints=kinks)
        except NoConvergence as exc:
            raise DivergentIntegral(f"kappa_hat sup not attained at x={x}: {exc}")
        return ConstantResult(max(val, 0.0), QUADRATURE, err, "numerical sup")
    ps = conjugate(p1).value
    if x == 0.0 and not isinstance(kernel, Custom):
        return ConstantResult(0.0, EXACT, branch="anchor")
    inv_p1 = p1.reciprocal

    def integrand(t):
        with np.errstate(all="ignore"):
            return (np.abs(kernel.kappa(x, t)) * kernel.inv_psi_power(t, inv_p1)) ** ps

    tail = 0.0
    if math.isinf(b):
        b, tail = _tail_test(integrand, "kappa_hat")
    breaks = tuple(kinks) + _scale_breaks(a, b)
    try:
        val, err = adaptive_quadrature(integrand, a, b, tol=1e-300, rtol=rtol,
                                       breakpoints=breaks)
    except NoConvergence as exc:
        raise DivergentIntegral(f"kappa_hat integral does not converge at x={x}: {exc}")
    err += tail
    value = val ** (1.0 / ps)
    rel = err / val if val > 0 else 0.0
    return ConstantResult(value, QUADRATURE, float(value * rel / ps), "quadrature")


def _tail_test(f, what):
    """Reject integrands on [a, inf) that visibly fail to decay like 1/t**(1+).

    Samples ``t f(t)`` at t = 1, 2, 4, .. 2**30 and stops early when a value
    overflows or underflows to zero, so integrands whose factors overflow
    separately are judged on the range where they can still be evaluated.
    Returns ``(t_end, tail)``: the last usable sample when evaluation broke
    down (``inf`` otherwise) and ``t f(t)`` there, a size estimate for the
    mass beyond it.
    """
    ts = 2.0 ** np.arange(0, 31)
    vals = []
    stopped = None
    with np.errstate(all="ignore"):
        for t in ts:
            try:
                v = abs(float(np.asarray(f(np.array([t])), dtype=float)[0])) * t
            except DivergentIntegral:
                stopped = "overflow"
                break
            if not math.isfinite(v):
                stopped = "overflow"
                break
            if v == 0.0 and vals and vals[-1] > 0.0:
                stopped = "underflow"
                break
            vals.append(v)
    if stopped == "overflow" and len(vals) < 4:
        raise DivergentIntegral(f"{what} integrand overflows at moderate arguments")
    if len(vals) >= 2:
        head = max(vals[: max(1, len(vals) // 2)]) or 1.0
        if vals[-1] > 1e-6 * head and vals[-1] >= vals[-2]:
            raise DivergentIntegral(f"{what} integrand does not decay at infinity")
    if stopped:
        return float(ts[len(vals) - 1]), vals[-1]
    return INF, 0.0


# ---------------------------------------------------------------------------
# kappa_tilde (approximation in L_q(omega))
# ---------------------------------------------------------------------------


def kappa_tilde(ps: ProblemSpec, method: str = "auto") -> ConstantResult:
    """``C1`` for approximation: the ``L_q(omega)`` norm of ``kappa_hat``."""
    if not isinstance(ps.problem, Approximation):
        raise IncompatibleSpec("kappa_tilde needs an Approximation problem")
    if method == "auto":
        closed = _kappa_tilde_closed(ps)
        if closed is not None:
            return closed
    elif method != "quadrature":
        raise ConfigError(f"unknown method {method!r}")
    return _kappa_tilde_numeric(ps, "quadrature" if method == "quadrature" else "auto")


def _kappa_tilde_closed(ps: ProblemSpec):
    kernel, dens, q, p1 = ps.kernel, ps.density, ps.problem.q, ps.p1
    if isinstance(kernel, AnchoredStep) and isinstance(dens, Uniform01):
        if q.infinite or p1.is_one:
            return ConstantResult(1.0, EXACT, branch="q=inf or p1=1")
        p1s = conjugate(p1)
        val = (1.0 + q.value * p1s.reciprocal) ** (-1.0 / q.value)
        return ConstantResult(val, EXACT, branch="(1+q/p1*)^(-1/q)")
    if not (isinstance(kernel, PolyExp) and isinstance(dens, Exponential)):
        return None
    r, lam, mu = kernel.r, kernel.lam, dens.mu
    fact = math.factorial(r - 1)

    if q.infinite:
        if r == 1 and p1.is_one and lam >= 0:
            return ConstantResult(1.0, EXACT, branch="q=inf, r=1, p1=1, lam>=0")
        if r == 1 and not p1.is_one and not p1.infinite and lam > 0:
            p1s = conjugate(p1).value
            val = ((p1.value - 1.0) / lam) ** (1.0 / p1s)
            return ConstantResult(val, EXACT, branch="q=inf, r=1, lam>0: limit of kappa_hat")
        return _divergent("q=inf: kappa_hat unbounded")

    qq = q.value
    if lam < 0 and mu + lam * qq * p1.reciprocal <= 0:
        return _divergent("lam<0 and mu + lam q/p1 <= 0")

    if p1.infinite:
        val = gamma_function(r * qq + 1.0) ** (1.0 / qq) / (math.factorial(r) * mu**r)
        return ConstantResult(val, EXACT, branch="p1=inf: Gamma(rq+1)^(1/q)/(r! mu^r)")

    if p1.is_one:
        if lam >= 0:
            val = gamma_function((r - 1) * qq + 1.0) ** (1.0 / qq) / (fact * mu ** (r - 1))
            return ConstantResult(val, EXACT, branch="p1=1, lam>=0")
        # kappa_hat is x^(r-1)/(r-1)! up to x0 = (r-1)/|lam|, then K e^{|lam| x}
        x0 = (r - 1) / abs(lam)
        s = (r - 1) * qq + 1.0
        head = lower_incomplete_gamma(s, mu * x0) / (fact**qq * mu ** (s - 1.0))
        K = (r - 1) ** (r - 1) * math.exp(-(r - 1)) / (abs(lam) ** (r - 1) * fact)
        d = mu - qq * abs(lam)
        tail = K**qq * mu * math.exp(-d * x0) / d
        return ConstantResult((head + tail) ** (1.0 / qq), EXACT,
                              branch="p1=1, lam<0: incomplete gamma")

    p1v = p1.value
    p1s = conjugate(p1).value
    c = qq / p1s
    if r == 1:
        if lam == 0:
            val = gamma_function(c + 1.0) ** (1.0 / qq) / mu ** (1.0 / p1s)
            return ConstantResult(val, EXACT, branch="r=1, lam=0")
        scale = ((p1v - 1.0) / abs(lam)) ** (1.0 / p1s)
        b = abs(lam) / (p1v - 1.0)
        if lam > 0:
            integral = mu / b * beta_function(mu / b, c + 1.0)
            branch = "r=1, lam>0: beta function"
        else:
            integral = mu / b * beta_function(mu / b - c, c + 1.0)
            branch = "r=1, lam<0: beta function"
        return ConstantResult(scale * integral ** (1.0 / qq), EXACT, branch=branch)

    if lam >= 0:
        val = gamma_function((r - 1.0 / p1v) * qq + 1.0) ** (1.0 / qq) / (
            fact * ((r - 1) * p1s + 1.0) ** (1.0 / p1s) * mu ** (r - 1.0 / p1v)
        )
        return ConstantResult(val, UPPER, branch="r>=2, lam>=0 bound")

    # integrate each of the two pointwise kappa_hat bounds against omega
    d = mu + lam * qq / p1v
    first = (mu * gamma_function((r - 1) * qq + 1.0)) ** (1.0 / qq) / (
        fact * (abs(lam) * (p1s - 1.0)) ** (1.0 / p1s) * d ** (r - 1 + 1.0 / qq)
    )
    second = (mu * gamma_function((r - 1) * qq + c + 1.0)) ** (1.0 / qq) / (
        fact * ((r - 1) * p1s + 1.0) ** (1.0 / p1s) * d ** (r - 1 + 1.0 / qq + 1.0 / p1s)
    )
    which = "1/(|lam|(p1*-1)) form" if first <= second else "x/((r-1)p1*+1) form"
    return ConstantResult(min(first, second), UPPER, branch=f"r>=2, lam<0 bound, {which}")


def _kappa_tilde_numeric(ps: ProblemSpec, inner: str) -> ConstantResult:
    kernel, dens, q, p1 = ps.kernel, ps.density, ps.problem.q, ps.p1
    _check_certificate(kernel, p1)
    a, b = dens.domain
    worst_rel = [0.0]

    def khat(x):
        try:
            res = kappa_hat(kernel, p1, x, method=inner)
        except DivergentIntegral:
            return INF  # overflow far out; decay is judged by the tail test
        if res.value > 0:
            worst_rel[0] = max(worst_rel[0], res.err_estimate / res.value)
        return INF if res.value > _SATURATED else res.value

    vk = np.vectorize(khat, otypes=[float])
    if q.infinite:
        if math.isinf(b) and _grows(vk):
            return _divergent("kappa_hat still growing far out")
        val, err = numerical_sup(vk, a, b, samples=129)
        if not math.isfinite(val):
            return _divergent("numerical sup unbounded")
        return ConstantResult(val, QUADRATURE, err + val * worst_rel[0], "numerical sup")
    qq = q.value

    def integrand(x):
        x = np.asarray(x, dtype=float)
        w = dens.pdf(x)
        out = np.zeros_like(w)
        live = w > 0  # skip kappa_hat where the density has underflowed
        with np.errstate(all="ignore"):
            out[live] = vk(x[live]) ** qq * w[live]
        # inf * tiny far out: the tail test has already established decay
        return np.where(~np.isfinite(out) & (w < 1e-100), 0.0, out)

    tail = 0.0
    if math.isinf(b):
        b, tail = _tail_test(integrand, "kappa_tilde")
    try:
        val, err = adaptive_quadrature(integrand, a, b, tol=1e-300, rtol=1e-10,
                                       breakpoints=_scale_breaks(a, b))
    except NoConvergence as exc:
        raise DivergentIntegral(f"kappa_tilde integral does not converge: {exc}")
    err += tail
    value = val ** (1.0 / qq)
    rel = (err / val if val > 0 else 0.0) / qq + worst_rel[0]
    return ConstantResult(value, QUADRATURE, float(value * rel), "nested quadrature")


def _grows(f):
    """True when ``f`` is still increasing at the far end of where it can be evaluated."""
    vals = []
    with np.errstate(all="ignore"):
        for t in 2.0 ** np.arange(3, 24):
            try:
                v = float(np.asarray(f(np.array([t])), dtype=float)[0])
            except DivergentIntegral:
                break
            if not math.isfinite(v) or v > _SATURATED:
                break
            vals.append(v)
    if len(vals) < 3:
        return True
    a, b, c = vals[-3:]
    return bool(c >= b >= a and c > a * (1 + 1e-6))


def _check_certificate(kernel, p1):
    if isinstance(kernel, Custom):
        for x in kernel.certificate:
            res = _kappa_hat_numeric(kernel, p1, float(x))
            if not math.isfinite(res.value):
                raise DivergentIntegral(f"kappa_hat infinite at certificate point x={x}")


# ---------------------------------------------------------------------------
# kappa_bar (integration)
# ---------------------------------------------------------------------------


def kappa_bar_norm(ps: ProblemSpec, method: str = "auto") -> ConstantResult:
    """``C1`` for integration: ``L_p1*`` norm of the ``omega``-averaged kernel."""
    if not isinstance(ps.problem, Integration):
        raise IncompatibleSpec("kappa_bar_norm needs an Integration problem")
    if method == "auto":
        closed = _kappa_bar_closed(ps)
        if closed is not None:
            return closed
    elif method != "quadrature":
        raise ConfigError(f"unknown method {method!r}")
    return _kappa_bar_numeric(ps)


def _kappa_bar_closed(ps: ProblemSpec):
    kernel, dens, p1 = ps.kernel, ps.density, ps.p1
    p1s = conjugate(p1)
    if isinstance(kernel, AnchoredStep) and isinstance(dens, Uniform01):
        # kappa_bar(t) = 1 - t on [0, 1]
        if p1s.infinite:
            return ConstantResult(1.0, EXACT, branch="sup (1 - t)")
        return ConstantResult((1.0 / (p1s.value + 1.0)) ** p1s.reciprocal, EXACT,
                              branch="(1/(p1*+1))^(1/p1*)")
    if not (isinstance(kernel, PolyExp) and isinstance(dens, Exponential)):
        return None
    r, lam, mu = kernel.r, kernel.lam, dens.mu
    # Gamma(r)/(r-1)! = 1; kappa_bar(t) = mu^(1-r) e^{-(mu + lam/p1) t}
    lead = gamma_function(r) / (math.factorial(r - 1) * mu ** (r - 1))
    d = mu + lam * p1.reciprocal
    if p1s.infinite:
        if d < 0:
            return _divergent("p1=1 and mu + lam < 0")
        return ConstantResult(lead, EXACT, branch="p1=1: sup at t=0")
    if d <= 0:
        return _divergent("mu + lam/p1 <= 0")
    val = lead * (1.0 / (p1s.value * d)) ** p1s.reciprocal
    return ConstantResult(val, EXACT, branch="Gamma(r)/((r-1)! mu^(r-1)) (p1*(lam/p1+mu))^(-1/p1*)")


def _kappa_bar_numeric(ps: ProblemSpec) -> ConstantResult:
    kernel, dens, p1 = ps.kernel, ps.density, ps.p1
    _check_certificate(kernel, p1)
    a, b = kernel.domain
    inv_p1 = p1.reciprocal
    worst = [0.0]

    def kbar(t):
        t = float(t)
        weight = float(kernel.inv_psi_power(np.array([t]), inv_p1)[0])
        if weight == 0.0:
            return 0.0

        def inner(x):
            return np.abs(kernel.kappa(x, t)) * dens.pdf(x)

        lo = t if isinstance(kernel, (PolyExp, AnchoredStep)) and t > a else a
        try:
            # absolute accuracy of the weighted value is what matters
            val, err = adaptive_quadrature(inner, lo, b, tol=1e-16 / weight, rtol=1e-13)
        except NoConvergence as exc:
            raise DivergentIntegral(f"averaged kernel does not converge at t={t}: {exc}")
        # pointwise absolute error of kappa_bar(t)
        worst[0] = max(worst[0], err * weight)
        out = val * weight
        return INF if out > _SATURATED else out

    vk = np.vectorize(kbar, otypes=[float])
    p1s = conjugate(p1)
    if p1s.infinite:
        if math.isinf(b) and _grows(vk):
            return _divergent("averaged kernel still growing far out")
        val, err = numerical_sup(vk, a, b, samples=129)
        if not math.isfinite(val):
            return _divergent("averaged kernel unbounded")
        return ConstantResult(val, QUADRATURE, err + worst[0], "numerical sup")
    ex = p1s.value

    def integrand(t):
        return vk(t) ** ex

    tail = 0.0
    if math.isinf(b):
        b, tail = _tail_test(integrand, "kappa_bar")
    try:
        val, err = adaptive_quadrature(integrand, a, b, tol=1e-300, rtol=1e-10,
                                       breakpoints=_scale_breaks(a, b))
    except NoConvergence as exc:
        raise DivergentIntegral(f"kappa_bar norm does not converge: {exc}")
    err += tail
    value = val ** (1.0 / ex)
    rel = (err / val if val > 0 else 0.0) / ex
    # a pointwise error D moves the L_ex norm over [a, b] by at most D (b-a)^(1/ex)
    inner_err = worst[0] * min(b - a, 2.0**30) ** (1.0 / ex)
    return ConstantResult(value, QUADRATURE, float(value * rel + inner_err), "nested quadrature")
