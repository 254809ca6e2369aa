import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from truncdim import NoConvergence, adaptive_quadrature, gamma_function, numerical_sup


@pytest.mark.parametrize(
    "f, a, b, expected",
    [
        (lambda x: x, 0.0, 1.0, 0.5),
        (lambda t: np.exp(-t), 0.0, math.inf, 1.0),
        (lambda x: x**2 * np.exp(-x), 0.0, math.inf, 2.0),
        (lambda x: np.sin(x), 0.0, math.pi, 2.0),
        (lambda x: 1 / (1 + x * x), 0.0, math.inf, math.pi / 2),
        (lambda x: np.sqrt(x), 0.0, 1.0, 2 / 3),
    ],
)
def test_known_integrals(f, a, b, expected):
    val, err = adaptive_quadrature(f, a, b, tol=1e-12)
    assert err <= 1e-12
    assert val == pytest.approx(expected, abs=1e-11)


def test_kink_breakpoint():
    x0 = 0.3137
    f = lambda t: np.abs(t - x0)
    val, err = adaptive_quadrature(f, 0.0, 1.0, tol=1e-14, breakpoints=(x0,))
    assert val == pytest.approx((x0**2 + (1 - x0) ** 2) / 2, abs=1e-14)


def test_reversed_limits():
    val, _ = adaptive_quadrature(lambda x: x, 1.0, 0.0)
    assert val == pytest.approx(-0.5)


def test_empty_interval():
    assert adaptive_quadrature(lambda x: x, 2.0, 2.0) == (0.0, 0.0)


def test_relative_tolerance():
    val, err = adaptive_quadrature(lambda x: 1e20 * np.exp(-x), 0.0, math.inf, tol=0.0, rtol=1e-12)
    assert val == pytest.approx(1e20, rel=1e-11) and err <= 1e-12 * val


def test_no_convergence():
    with pytest.raises(NoConvergence):
        adaptive_quadrature(lambda x: np.sin(1 / x) / x, 1e-9, 1.0, tol=1e-14, limit=50)


def test_bad_tolerance():
    with pytest.raises(ValueError):
        adaptive_quadrature(lambda x: x, 0, 1, tol=0.0)


@given(st.floats(0.5, 3.0), st.floats(0.5, 2.0))
@settings(max_examples=30, deadline=None)
def test_gamma_fact(a, b):
    val, _ = adaptive_quadrature(lambda x: x**a * np.exp(-b * x), 0.0, math.inf, tol=1e-13)
    assert val == pytest.approx(gamma_function(a + 1) / b ** (a + 1), rel=1e-10)


class TestSup:
    def test_interior(self):
        val, _ = numerical_sup(lambda t: t * np.exp(-t), 0.0, math.inf)
        assert val == pytest.approx(math.exp(-1), rel=1e-12)

    def test_endpoint(self):
        val, _ = numerical_sup(lambda t: np.exp(-t), 0.0, math.inf)
        assert val == pytest.approx(1.0, rel=1e-12)

    def test_bounded_with_kink(self):
        val, _ = numerical_sup(lambda t: 1 - np.abs(t - 0.37), 0.0, 1.0, breakpoints=(0.37,))
        assert val == pytest.approx(1.0, abs=1e-12)

    def test_ignores_overflow(self):
        # far-out samples overflow; the finite ones still give the maximum
        val, _ = numerical_sup(lambda t: np.exp(-((t - 2.0) ** 2)) + 0 * np.exp(t), 0.0, math.inf)
        assert val == pytest.approx(1.0, rel=1e-10)

    def test_undefined(self):
        with pytest.raises(NoConvergence):
            numerical_sup(lambda t: np.full_like(t, np.nan), 0.0, 1.0)
