import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from truncdim import (
    DimensionTooLarge,
    DivergentTail,
    ExplicitWeights,
    Exponent,
    InvalidIndex,
    NonMonotoneWeights,
    ProductWeights,
    as_exponent,
    conjugate,
    log_one_plus_product,
    log_one_plus_product_bracket,
    tail_power_bracket,
    tail_power_sum,
)
from truncdim.errors import ConfigError

# log prod_{j>=1} (1 + j^-4) = log((cosh(pi sqrt2) - cos(pi sqrt2)) / (2 pi^2)),
# evaluated with mpmath at 30 digits
LOG_PROD_J4 = 0.773510125820687945839877177404
ZETA4 = math.pi**4 / 90


class TestExponent:
    @pytest.mark.parametrize(
        "p, expected",
        [(1, math.inf), (2, 2.0), (4 / 3, 4.0), (math.inf, 1.0), ("inf", 1.0)],
    )
    def test_conjugate_examples(self, p, expected):
        got = conjugate(p)
        if math.isinf(expected):
            assert got.infinite
        else:
            assert float(got) == pytest.approx(expected, rel=1e-15)

    def test_infinity_is_a_flag(self):
        p = as_exponent(math.inf)
        assert p.infinite and p == Exponent.inf()
        assert p.reciprocal == 0.0
        assert str(p) == "inf"

    @pytest.mark.parametrize("bad", [0.5, 0, -1, float("nan"), "abc"])
    def test_rejects_below_one(self, bad):
        with pytest.raises((ConfigError, ValueError)):
            as_exponent(bad)

    def test_involution_on_grid(self):
        grid = [1.0, *np.geomspace(1.0 + 1e-6, 1e6, 98), math.inf]
        for p in grid:
            back = conjugate(conjugate(p))
            if math.isinf(p) or p == 1.0:
                assert back == as_exponent(p)
            else:
                assert float(back) == pytest.approx(p, rel=1e-9)

    @given(st.floats(min_value=1.0, max_value=1e8))
    def test_conjugate_identity(self, p):
        ps = conjugate(p)
        assert as_exponent(p).reciprocal + ps.reciprocal == pytest.approx(1.0, abs=1e-12)

    def test_ordering(self):
        assert as_exponent(2) < as_exponent(math.inf)
        assert as_exponent(1) <= as_exponent(1)


class TestProductWeights:
    def test_polynomial_values(self):
        w = ProductWeights.polynomial(3)
        assert w.gamma(5) == 5.0**-3
        assert w.is_infinite

    def test_rejects_increasing_sequence(self):
        with pytest.raises(NonMonotoneWeights):
            ProductWeights.from_sequence([0.5, 1.0])

    @pytest.mark.parametrize("bad", [[1.0, 0.0], [1.0, -1.0], [math.inf]])
    def test_rejects_nonpositive(self, bad):
        with pytest.raises(ConfigError):
            ProductWeights.from_sequence(bad)

    def test_index_checks(self):
        w = ProductWeights.polynomial(2, s=3)
        with pytest.raises(InvalidIndex):
            w.gamma(4)
        with pytest.raises(InvalidIndex):
            tail_power_sum(w, 4, 1.0)


class TestExplicitWeights:
    def test_downward_closed_required(self):
        with pytest.raises(ConfigError):
            ExplicitWeights(2, {(): 1.0, (1, 2): 0.5, (1,): 0.5})

    def test_omitted_entries_are_zero(self):
        w = ExplicitWeights(2, {(): 1.0, (1,): 0.5})
        assert w.gamma((2,)) == 0.0 and w.gamma((1, 2)) == 0.0

    def test_size_cap(self):
        with pytest.raises(DimensionTooLarge):
            ExplicitWeights(26, {})

    def test_from_product(self):
        w = ExplicitWeights.from_product([0.5, 0.25])
        assert w.gamma((1, 2)) == 0.125
        assert list(w.popcounts) == [0, 1, 1, 2]

    def test_values_read_only(self):
        w = ExplicitWeights.from_product([0.5])
        with pytest.raises(ValueError):
            w.values[0] = 2.0


class TestTailPowerSum:
    def test_zeta4(self):
        w = ProductWeights.polynomial(2)
        assert tail_power_sum(w, 0, 2, tol=1e-13) == pytest.approx(ZETA4, abs=1e-13)

    def test_bracket_contains_estimate(self):
        b = tail_power_bracket(ProductWeights.polynomial(2), 0, 2, 1e-13)
        assert b.lower <= ZETA4 + 1e-15 and ZETA4 - 1e-15 <= b.upper
        assert b.width <= 1e-13

    def test_empty_tail(self):
        assert tail_power_sum(ProductWeights.polynomial(2, s=6), 6, 2) == 0.0

    def test_finite_is_plain_sum(self):
        g = [1.0, 0.7, 0.3, 0.3, 0.01]
        w = ProductWeights.from_sequence(g)
        assert tail_power_sum(w, 0, 1) == pytest.approx(sum(g), rel=1e-15)

    @pytest.mark.parametrize("alpha, t", [(1, 1), (0.5, 2), (2, 0.5)])
    def test_divergent(self, alpha, t):
        with pytest.raises(DivergentTail):
            tail_power_sum(ProductWeights.polynomial(alpha), 0, t)

    @pytest.mark.parametrize("alpha, t", [(2, 2), (1.5, 1), (3, 2), (1.2, 1.0)])
    def test_consecutive_differences(self, alpha, t):
        w = ProductWeights.polynomial(alpha)
        tol = 1e-13
        for k in [0, 1, 5, 17, 200, 5000]:
            diff = tail_power_sum(w, k, t, tol) - tail_power_sum(w, k + 1, t, tol)
            assert diff == pytest.approx(w.gamma(k + 1) ** t, abs=2 * tol)

    @given(st.integers(min_value=0, max_value=10_000), st.sampled_from([1.5, 2.0, 3.0]))
    @settings(max_examples=40, deadline=None)
    def test_nonincreasing(self, k, alpha):
        w = ProductWeights.polynomial(alpha)
        assert tail_power_sum(w, k + 1, 1.0) <= tail_power_sum(w, k, 1.0) + 1e-13

    def test_mpmath_oracle(self):
        mpmath = pytest.importorskip("mpmath")
        w = ProductWeights.polynomial(1.3)
        for k in [0, 10, 1000]:
            exact = float(mpmath.zeta(2.6, k + 1))
            assert tail_power_sum(w, k, 2.0, 1e-13) == pytest.approx(exact, abs=1e-13)


class TestLogProduct:
    def test_closed_form_value(self):
        w = ProductWeights.polynomial(2)
        assert log_one_plus_product(w, 1.0, 2.0) == pytest.approx(LOG_PROD_J4, abs=1e-13)

    def test_c_zero(self):
        assert log_one_plus_product(ProductWeights.polynomial(2), 0.0, 2.0) == 0.0

    def test_single_factor(self):
        w = ProductWeights.from_sequence([1.0])
        assert log_one_plus_product(w, 1.0, 2.0) == pytest.approx(math.log(2), rel=1e-15)

    def test_sinh_identity(self):
        # prod (1 + 1/j^2) = sinh(pi)/pi
        got = log_one_plus_product(ProductWeights.polynomial(2), 1.0, 1.0)
        assert got == pytest.approx(math.log(math.sinh(math.pi) / math.pi), abs=1e-13)

    def test_bracket_encloses(self):
        b = log_one_plus_product_bracket(ProductWeights.polynomial(2), 1.0, 2.0)
        assert b.lower - 1e-15 <= LOG_PROD_J4 <= b.upper + 1e-15

    @given(st.floats(0.0, 3.0), st.floats(0.0, 3.0))
    @settings(max_examples=30, deadline=None)
    def test_nondecreasing_in_c(self, a, b):
        w = ProductWeights.polynomial(2.5)
        lo, hi = sorted((a, b))
        assert log_one_plus_product(w, lo, 1.0) <= log_one_plus_product(w, hi, 1.0) + 1e-13

    @given(st.lists(st.floats(1e-3, 1.0), min_size=1, max_size=30), st.floats(0.1, 2.0))
    @settings(max_examples=40, deadline=None)
    def test_finite_matches_naive(self, gammas, c):
        gammas = sorted(gammas, reverse=True)
        w = ProductWeights.from_sequence(gammas)
        naive = math.fsum(math.log1p((c * g) ** 2) for g in gammas)
        assert log_one_plus_product(w, c, 2.0) == pytest.approx(naive, abs=1e-12)

    def test_divergent(self):
        with pytest.raises(DivergentTail):
            log_one_plus_product(ProductWeights.polynomial(1), 1.0, 1.0)
