import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from truncdim import (
    ConfigError,
    DivergentProduct,
    ExplicitWeights,
    ProductWeights,
    corner_norm,
    corner_norm_oracle,
    interpolated_bound,
)

INF = math.inf
CORNERS = [(1, 1), (1, INF), (INF, 1), (INF, INF)]


class TestCorner:
    @pytest.mark.parametrize("p1, p2", CORNERS)
    def test_product_example(self, p1, p2):
        res = corner_norm(ProductWeights.polynomial(2, s=3), 1.0, p1, p2)
        assert res.value == pytest.approx(25 / 9, rel=1e-15) and res.exactness == "exact"

    @pytest.mark.parametrize("p1, p2", CORNERS)
    def test_explicit_example(self, p1, p2):
        w = ExplicitWeights.from_product([1.0, 0.25, 1 / 9])
        assert corner_norm(w, 1.0, p1, p2).value == pytest.approx(25 / 9, rel=1e-14)

    @pytest.mark.parametrize("p1, p2", CORNERS)
    def test_zero_M(self, p1, p2):
        w = ExplicitWeights(2, {(): 1.0, (1,): 0.5, (2,): 0.0, (1, 2): 0.0})
        assert corner_norm(w, 0.0, p1, p2).value == 1.0
        assert corner_norm(ProductWeights.polynomial(2), 0.0, p1, p2).value == 1.0

    @pytest.mark.parametrize("p1, p2", CORNERS)
    def test_single_variable(self, p1, p2):
        w = ExplicitWeights(1, {(): 1.0, (1,): 0.4})
        assert corner_norm(w, 3.0, p1, p2).value == pytest.approx(2.2, rel=1e-15)

    def test_non_product_corners_differ(self):
        # only the pair carries weight beyond the singletons
        w = ExplicitWeights(2, {(): 1.0, (1,): 0.5, (2,): 0.5, (1, 2): 0.9})
        a = corner_norm(w, 1.0, 1, 1).value
        b = corner_norm(w, 1.0, 1, INF).value
        assert a == pytest.approx(corner_norm_oracle(w, 1.0, 1, 1), rel=1e-15)
        assert b == pytest.approx(corner_norm_oracle(w, 1.0, 1, INF), rel=1e-15)
        assert a != pytest.approx(b)

    @pytest.mark.parametrize("s", [1, 4, 8])
    def test_matches_oracle(self, rng, s):
        for _ in range(10):
            w = ExplicitWeights(s, {tuple(j + 1 for j in range(s) if m >> j & 1): v
                                    for m, v in enumerate(rng.uniform(0.05, 1.0, 1 << s))})
            M = float(rng.uniform(0, 2))
            for p1, p2 in CORNERS:
                assert corner_norm(w, M, p1, p2).value == pytest.approx(
                    corner_norm_oracle(w, M, p1, p2), rel=1e-13)

    def test_infinite_s(self):
        val = corner_norm(ProductWeights.polynomial(2), 1.0, 1, 1).value
        assert val == pytest.approx(math.sinh(math.pi) / math.pi, rel=1e-12)

    def test_divergent(self):
        with pytest.raises(DivergentProduct):
            corner_norm(ProductWeights.polynomial(1), 1.0, 1, 1)

    @pytest.mark.parametrize("M", [-1.0, INF, math.nan])
    def test_bad_M(self, M):
        with pytest.raises(ConfigError):
            corner_norm(ProductWeights.polynomial(2), M, 1, 1)

    def test_non_corner(self):
        with pytest.raises(ConfigError):
            corner_norm(ProductWeights.polynomial(2), 1.0, 2, 1)


@given(st.lists(st.floats(0.01, 1.0), min_size=1, max_size=6), st.floats(0, 2), st.floats(0, 1),
       st.sampled_from(CORNERS))
@settings(max_examples=60, deadline=None)
def test_monotone_in_M(gammas, M, d, corner):
    w = ExplicitWeights.from_product(sorted(gammas, reverse=True))
    assert corner_norm(w, M + d, *corner).value >= corner_norm(w, M, *corner).value * (1 - 1e-14)


@given(st.lists(st.floats(0.01, 0.9), min_size=2, max_size=6), st.floats(0, 2), st.data())
@settings(max_examples=60, deadline=None)
def test_monotone_in_gamma(gammas, M, data):
    g = sorted(gammas, reverse=True)
    i = data.draw(st.integers(0, len(g) - 1))
    bumped = list(g)
    bumped[i] = min(bumped[i] + data.draw(st.floats(0, 0.1)), 1.0)
    for corner in CORNERS:
        base = corner_norm(ExplicitWeights.from_product(g), M, *corner).value
        assert corner_norm(ExplicitWeights.from_product(bumped), M, *corner).value >= base * (1 - 1e-14)


def test_finite_s_truncations_increase_to_limit():
    limit = corner_norm(ProductWeights.polynomial(3), 1.5, 1, 1).value
    vals = [corner_norm(ProductWeights.polynomial(3, s=s), 1.5, 1, 1).value for s in (1, 2, 5, 20, 200, 5000)]
    assert all(a < b for a, b in zip(vals, vals[1:]))
    assert vals[-1] <= limit * (1 + 1e-14)
    assert vals[-1] == pytest.approx(limit, rel=1e-6)


class TestInterpolated:
    def test_example(self):
        w = ProductWeights.from_sequence([1.0])
        res = interpolated_bound(w, 2, 2, 1.0, 3.0)
        assert res.value == pytest.approx(2 * math.sqrt(2), rel=1e-15)
        assert res.exactness == "upper-bound" and res.corner is None

    @pytest.mark.parametrize("p2", [1, INF, 2])
    def test_product_endpoints(self, p2):
        w = ProductWeights.polynomial(2, s=4)
        assert interpolated_bound(w, 1, p2, 0.7, 5.0).value == pytest.approx(
            corner_norm(w, 0.7, 1, 1).value, rel=1e-12)
        assert interpolated_bound(w, INF, p2, 0.7, 5.0).value == pytest.approx(
            corner_norm(w, 5.0, INF, 1).value, rel=1e-12)

    @pytest.mark.parametrize("p1, p2", CORNERS)
    def test_explicit_corners(self, rng, p1, p2):
        w = ExplicitWeights(3, {tuple(j + 1 for j in range(3) if m >> j & 1): v
                                for m, v in enumerate(rng.uniform(0.1, 1.0, 8))})
        M1, Minf = 0.8, 1.7
        M = M1 if p1 == 1 else Minf
        res = interpolated_bound(w, p1, p2, M1, Minf)
        assert res.exactness == "exact"
        assert res.value == pytest.approx(corner_norm(w, M, p1, p2).value, rel=1e-12)

    @pytest.mark.parametrize("p1, p2", [(1.5, 3), (3, 1.5), (2, 2), (1, 4), (4, 1)])
    def test_explicit_product_is_at_least_one(self, p1, p2):
        w = ExplicitWeights.from_product([0.5, 0.3])
        assert interpolated_bound(w, p1, p2, 1.0, 2.0).value >= 1.0

    def test_infinite_norm(self):
        w = ExplicitWeights.from_product([0.5, 0.3])
        assert interpolated_bound(w, 2, 2, INF, 1.0).value == INF
        assert interpolated_bound(ProductWeights.from_sequence([0.5]), 2, 2, 1.0, INF).value == INF

    def test_negative(self):
        with pytest.raises(ConfigError):
            interpolated_bound(ProductWeights.from_sequence([0.5]), 2, 2, -1.0, 1.0)
