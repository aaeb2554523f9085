"""Price-bound and fast-lane optimizer tests with independent gamma oracles."""

import math

import numpy as np
import pytest
from scipy import stats

from shardprice import (
    ArrivalModel,
    FastLaneProblem,
    PriceRatePair,
    TurboModel,
    cdf_turbo,
    expected_utility_single,
    fast_lane_price_bound,
    model_cdf,
    optimize_fast_lane,
    price_bound,
)


class TestPriceRatePair:
    def test_expenditure_rate(self):
        pair = PriceRatePair(price=0.25, rate=8.0)
        assert pair.expenditure_rate == 2.0

    def test_validation(self):
        assert PriceRatePair(0.0, 1.0).price == 0.0
        with pytest.raises(ValueError):
            PriceRatePair(-0.1, 1.0)
        with pytest.raises(ValueError):
            PriceRatePair(1.0, 0.0)
        with pytest.raises(ValueError):
            PriceRatePair(math.inf, 1.0)


class TestSingleDeadlineBound:
    def test_utility_and_bound_compose(self):
        f = model_cdf(ArrivalModel.rateless(32, 32.0), 1.0)
        eu = expected_utility_single(f, 2.0)
        assert eu == pytest.approx(2.0 * f, abs=1e-15)
        assert price_bound(eu, 32.0) == pytest.approx(eu / 32.0, abs=1e-18)

    def test_validation(self):
        with pytest.raises(ValueError):
            expected_utility_single(1.2, 1.0)
        with pytest.raises(ValueError):
            expected_utility_single(0.5, 0.0)
        with pytest.raises(ValueError):
            price_bound(1.0, 0.0)
        with pytest.raises(ValueError):
            price_bound(math.nan, 1.0)

    def test_ordering_at_operating_point(self):
        # supportable prices: rateless above fixed-rate above uncoded
        tau, lam = 1.0, 32.0
        bounds = {
            name: price_bound(expected_utility_single(model_cdf(m, tau), 1.0), lam)
            for name, m in {
                "uncoded": ArrivalModel.uncoded(32, lam),
                "fixed_rate": ArrivalModel.fixed_rate(32, 64, lam),
                "rateless": ArrivalModel.rateless(32, lam),
            }.items()
        }
        assert bounds["rateless"] > bounds["fixed_rate"] > bounds["uncoded"] > 0


class TestFastLaneBound:
    def test_rateless_base_gamma_oracle(self):
        # Erlang difference quotient computed independently via scipy
        problem = FastLaneProblem(ArrivalModel.rateless(32, 32.0), 64.0, 1.0, 1.0)
        ours = fast_lane_price_bound(problem, 8.0)
        ref = (
            stats.gamma.cdf(1.0, 32, scale=1.0 / 40.0)
            - stats.gamma.cdf(1.0, 32, scale=1.0 / 32.0)
        ) / 8.0
        assert ours == pytest.approx(ref, abs=1e-13)
        assert ours == pytest.approx(0.04887096727761328, abs=1e-12)

    def test_unsharded_base_has_little_synergy(self):
        lam2 = 4.0
        prices = {}
        for name, base in {
            "unsharded": ArrivalModel.unsharded(32, 32.0),
            "uncoded": ArrivalModel.uncoded(32, 32.0),
            "fixed_rate": ArrivalModel.fixed_rate(32, 64, 32.0),
            "rateless": ArrivalModel.rateless(32, 32.0),
        }.items():
            problem = FastLaneProblem(base, 64.0, 1.0, 1.0)
            prices[name] = fast_lane_price_bound(problem, lam2)
        for name in ("uncoded", "fixed_rate", "rateless"):
            assert prices["unsharded"] < prices[name]
        assert prices["unsharded"] < 1e-8

    def test_domain_errors(self):
        problem = FastLaneProblem(ArrivalModel.uncoded(32, 32.0), 64.0, 1.0, 1.0)
        with pytest.raises(ValueError):
            fast_lane_price_bound(problem, 0.0)
        with pytest.raises(ValueError):
            fast_lane_price_bound(problem, -2.0)
        with pytest.raises(ValueError):
            fast_lane_price_bound(problem, 33.0)  # exceeds the cap
        with pytest.raises(ValueError):
            FastLaneProblem(ArrivalModel.uncoded(32, 70.0), 64.0, 1.0, 1.0)
        with pytest.raises(ValueError):
            FastLaneProblem(ArrivalModel.uncoded(32, 32.0), 64.0, 0.0, 1.0)

    def test_grid_endpoint_respects_cap(self):
        # headroom computed by subtraction must stay inside the slackened cap
        problem = FastLaneProblem(ArrivalModel.uncoded(32, 0.1), 64.0, 1.0, 1.0)
        fast_lane_price_bound(problem, problem.headroom)  # must not raise


class TestOptimizer:
    def test_monotone_revenue_pushes_to_cap(self):
        problem = FastLaneProblem(ArrivalModel.fixed_rate(32, 64, 32.0), 64.0, 1.0, 1.0)
        sol = optimize_fast_lane(problem)
        assert sol.feasible
        assert sol.monotone_on_grid
        assert sol.lambda2 == pytest.approx(32.0, abs=1e-12)
        assert sol.revenue == pytest.approx(sol.price * sol.lambda2, abs=1e-9)

    def test_revenue_is_grid_max(self):
        rng = np.random.default_rng(11)
        for _ in range(10):
            base = ArrivalModel.uncoded(32, float(rng.uniform(8, 56)))
            problem = FastLaneProblem(base, 64.0, float(rng.uniform(0.5, 2.0)), 1.0)
            sol = optimize_fast_lane(problem, grid_points=64)
            rates = problem.headroom * np.arange(1, 65) / 64
            grid_best = max(
                fast_lane_price_bound(problem, float(l2)) * l2 for l2 in rates
            )
            assert sol.revenue >= grid_best - 1e-6
            gain = cdf_turbo(problem.tau, TurboModel(base, sol.lambda2)) - model_cdf(
                base, problem.tau
            )
            assert sol.price * sol.lambda2 <= gain + 1e-9

    def test_no_headroom_rejected(self):
        problem = FastLaneProblem(ArrivalModel.uncoded(32, 64.0), 64.0, 1.0, 1.0)
        with pytest.raises(ValueError):
            optimize_fast_lane(problem)

    def test_vanishing_gain_reports_infeasible(self):
        # at tau far beyond every deadline the CDF gain underflows to zero
        problem = FastLaneProblem(ArrivalModel.uncoded(2, 2.0), 4.0, 200.0, 1.0)
        sol = optimize_fast_lane(problem)
        assert not sol.feasible
        assert math.isnan(sol.price)
        assert sol.revenue == 0.0
