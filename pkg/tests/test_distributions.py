"""Closed-form distribution tests: frozen values, scipy cross-checks, shapes."""

import math

import numpy as np
import pytest
from scipy import integrate, stats

from shardprice import (
    ArrivalModel,
    Scheme,
    TurboModel,
    cdf_fixed_rate,
    cdf_rateless,
    cdf_uncoded,
    cdf_unsharded,
    counting_pmf,
    counting_pmf_table,
    invert_cdf,
    model_cdf,
    model_mean,
    quantile,
)


class TestModelValidation:
    def test_factories_round_trip(self):
        m = ArrivalModel.fixed_rate(32, 64, 32.0)
        assert m.scheme is Scheme.FIXED_RATE
        assert (m.k, m.n, m.lam) == (32, 64, 32.0)
        assert m.is_sharded
        assert not ArrivalModel.unsharded(4, 1.0).is_sharded

    def test_rejects_bad_parameters(self):
        with pytest.raises(ValueError):
            ArrivalModel.uncoded(0, 1.0)
        with pytest.raises(ValueError):
            ArrivalModel.uncoded(4, 0.0)
        with pytest.raises(ValueError):
            ArrivalModel.uncoded(4, math.inf)
        with pytest.raises(ValueError):
            ArrivalModel.fixed_rate(8, 4, 1.0)  # n < k
        with pytest.raises(ValueError):
            ArrivalModel.fixed_rate(8, 2**16 + 1, 1.0)  # locator limit
        with pytest.raises(ValueError):
            ArrivalModel(Scheme.RATELESS, 4, 1.0, n=8)  # n without fixed-rate

    def test_fixed_rate_accepts_locator_limit(self):
        m = ArrivalModel.fixed_rate(8, 2**16, 1.0)
        assert m.n == 2**16

    def test_models_frozen(self):
        m = ArrivalModel.rateless(4, 1.0)
        with pytest.raises(AttributeError):
            m.lam = 2.0

    def test_turbo_validation(self):
        base = ArrivalModel.uncoded(4, 2.0)
        t = TurboModel(base, 3.0)
        assert t.k == 4
        assert t.total_rate == 5.0
        assert TurboModel(base).lambda2 == 0.0
        with pytest.raises(ValueError):
            TurboModel(base, -1.0)
        with pytest.raises(ValueError):
            TurboModel(base, math.nan)


class TestFrozenValues:
    def test_uncoded_two_shards(self):
        # (1 - e^{-1})^2 for two parallel unit-rate clocks
        assert cdf_uncoded(1.0, 2, 2.0) == pytest.approx((1 - math.exp(-1)) ** 2, abs=1e-15)

    def test_rateless_second_arrival(self):
        # P(Poisson(1) >= 2) = 1 - 2/e
        assert cdf_rateless(1.0, 2, 1.0) == pytest.approx(1 - 2 / math.e, abs=1e-15)

    def test_fixed_rate_operating_point(self):
        assert cdf_fixed_rate(1.0, 32, 64, 32.0) == pytest.approx(
            0.05416474936184246, abs=1e-12
        )

    def test_unsharded_service_level(self):
        # 1 - e^{-x} = 0.95 at x = ln 20; rate lam/k = 1 here
        assert cdf_unsharded(math.log(20.0), 32, 32.0) == pytest.approx(0.95, abs=1e-12)

    def test_zero_time_is_zero(self):
        assert cdf_unsharded(0.0, 4, 2.0) == 0.0
        assert cdf_uncoded(0.0, 4, 2.0) == 0.0
        assert cdf_rateless(0.0, 4, 2.0) == 0.0
        assert cdf_fixed_rate(0.0, 4, 8, 2.0) == 0.0


class TestScipyCrossChecks:
    def test_rateless_matches_poisson_sf(self):
        taus = np.linspace(0.0, 6.0, 121)
        for k, lam in [(1, 0.5), (4, 3.0), (32, 32.0), (100, 40.0)]:
            ours = cdf_rateless(taus, k, lam)
            ref = stats.poisson.sf(k - 1, lam * taus)
            np.testing.assert_allclose(ours, ref, atol=1e-13)

    def test_fixed_rate_matches_binom_sf(self):
        taus = np.linspace(0.0, 6.0, 121)
        for k, n, lam in [(1, 1, 2.0), (4, 9, 3.0), (32, 64, 32.0), (17, 40, 8.0)]:
            p = -np.expm1(-lam * taus / n)
            ours = cdf_fixed_rate(taus, k, n, lam)
            ref = stats.binom.sf(k - 1, n, p)
            np.testing.assert_allclose(ours, ref, atol=1e-13)

    def test_random_parameter_sweep(self):
        rng = np.random.default_rng(2024)
        for _ in range(50):
            k = int(rng.integers(1, 80))
            n = k + int(rng.integers(0, 80))
            lam = float(rng.uniform(0.1, 100.0))
            tau = float(rng.uniform(0.0, 5.0))
            assert cdf_rateless(tau, k, lam) == pytest.approx(
                float(stats.poisson.sf(k - 1, lam * tau)), abs=1e-12
            )
            p = -math.expm1(-lam * tau / n)
            assert cdf_fixed_rate(tau, k, n, lam) == pytest.approx(
                float(stats.binom.sf(k - 1, n, p)), abs=1e-12
            )

    def test_fixed_rate_with_n_equal_k_is_uncoded(self):
        taus = np.linspace(0.0, 8.0, 200)
        for k, lam in [(1, 1.0), (8, 4.0), (32, 32.0)]:
            np.testing.assert_allclose(
                cdf_fixed_rate(taus, k, k, lam),
                cdf_uncoded(taus, k, lam),
                atol=1e-14,
            )


class TestShapeAndNumerics:
    def test_scalar_in_float_out(self):
        for fn in (
            lambda t: cdf_unsharded(t, 4, 2.0),
            lambda t: cdf_uncoded(t, 4, 2.0),
            lambda t: cdf_rateless(t, 4, 2.0),
            lambda t: cdf_fixed_rate(t, 4, 8, 2.0),
        ):
            out = fn(1.5)
            assert isinstance(out, float)

    def test_array_matches_elementwise_scalars(self):
        taus = np.linspace(0.0, 4.0, 17)
        arr = cdf_fixed_rate(taus, 8, 20, 5.0)
        assert arr.shape == taus.shape
        for i, t in enumerate(taus):
            assert arr[i] == pytest.approx(cdf_fixed_rate(float(t), 8, 20, 5.0), abs=1e-15)

    def test_monotone_and_bounded(self):
        taus = np.linspace(0.0, 50.0, 400)
        for vals in (
            cdf_unsharded(taus, 32, 32.0),
            cdf_uncoded(taus, 32, 32.0),
            cdf_rateless(taus, 32, 32.0),
            cdf_fixed_rate(taus, 32, 64, 32.0),
        ):
            assert np.all(vals >= 0.0) and np.all(vals <= 1.0)
            assert np.all(np.diff(vals) >= -1e-15)
            assert vals[-1] > 1 - 1e-9

    def test_deep_tails_have_relative_accuracy(self):
        # far left tail stays positive and tiny instead of collapsing to 0
        val = cdf_rateless(0.05, 32, 32.0)
        ref = float(stats.poisson.sf(31, 1.6))
        assert val == pytest.approx(ref, rel=1e-10)
        assert 0 < val < 1e-20

    def test_rejects_bad_inputs(self):
        with pytest.raises(ValueError):
            cdf_rateless(-0.5, 4, 1.0)
        with pytest.raises(ValueError):
            cdf_rateless(float("nan"), 4, 1.0)
        with pytest.raises(ValueError):
            cdf_rateless(1.0, 4, 0.0)
        with pytest.raises(ValueError):
            cdf_fixed_rate(1.0, 4, 3, 1.0)
        with pytest.raises(ValueError):
            cdf_uncoded(1.0, 0, 1.0)


class TestCountingPmf:
    def test_uncoded_matches_binomial(self):
        model = ArrivalModel.uncoded(8, 4.0)
        tau = 1.25
        p = -math.expm1(-4.0 * tau / 8)
        for i in range(0, 9):
            assert counting_pmf(model, tau, i) == pytest.approx(
                float(stats.binom.pmf(i, 8, p)), abs=1e-14
            )
        assert counting_pmf(model, tau, 9) == 0.0

    def test_fixed_rate_matches_binomial(self):
        model = ArrivalModel.fixed_rate(32, 64, 32.0)
        tau = 1.0
        p = -math.expm1(-32.0 * tau / 64)
        assert counting_pmf(model, tau, 10) == pytest.approx(
            float(stats.binom.pmf(10, 64, p)), abs=1e-14
        )
        assert counting_pmf(model, tau, 10) == pytest.approx(2.5321755025137375e-05, rel=1e-10)
        assert counting_pmf(model, tau, 65) == 0.0

    def test_rateless_matches_poisson(self):
        model = ArrivalModel.rateless(4, 2.0)
        tau = 1.5
        for i in (0, 1, 4, 11):
            assert counting_pmf(model, tau, i) == pytest.approx(
                float(stats.poisson.pmf(i, 3.0)), abs=1e-14
            )

    def test_tail_sum_is_cdf(self):
        # survival of the counting law at k reproduces the decode-time CDF
        model = ArrivalModel.fixed_rate(8, 20, 5.0)
        tau = 0.7
        below = sum(counting_pmf(model, tau, i) for i in range(8))
        assert 1.0 - below == pytest.approx(cdf_fixed_rate(tau, 8, 20, 5.0), abs=1e-13)

    def test_table_matches_single_entries(self):
        model = ArrivalModel.uncoded(6, 3.0)
        taus = np.array([0.0, 0.4, 2.0])
        table = counting_pmf_table(model, taus, 7)
        assert table.shape == (3, 7)
        np.testing.assert_allclose(table[0], np.eye(7)[0], atol=0)
        for j, t in enumerate(taus):
            for i in range(7):
                assert table[j, i] == pytest.approx(
                    counting_pmf(model, float(t), i), abs=1e-15
                )

    def test_unsharded_has_no_counting_law(self):
        with pytest.raises(ValueError):
            counting_pmf(ArrivalModel.unsharded(4, 1.0), 1.0, 2)
        with pytest.raises(ValueError):
            counting_pmf(ArrivalModel.uncoded(4, 1.0), 1.0, -1)


class TestMeansAndQuantiles:
    def test_means_match_survival_integral(self):
        models = [
            ArrivalModel.unsharded(32, 32.0),
            ArrivalModel.uncoded(32, 32.0),
            ArrivalModel.rateless(32, 32.0),
            ArrivalModel.fixed_rate(32, 64, 32.0),
            ArrivalModel.fixed_rate(5, 5, 2.0),
        ]
        for model in models:
            integral, err = integrate.quad(
                lambda t: 1.0 - model_cdf(model, t), 0.0, np.inf, limit=200
            )
            assert model_mean(model) == pytest.approx(integral, rel=1e-8)

    def test_quantile_round_trip(self):
        models = [
            ArrivalModel.unsharded(32, 32.0),
            ArrivalModel.uncoded(32, 32.0),
            ArrivalModel.rateless(32, 32.0),
            ArrivalModel.fixed_rate(32, 64, 32.0),
        ]
        for model in models:
            for q in (0.05, 0.5, 0.95, 0.999):
                t = quantile(model, q)
                assert model_cdf(model, t) == pytest.approx(q, abs=1e-9)

    def test_unsharded_service_quantile(self):
        # F^{-1}(0.95) = (k / lam) ln 20 = ln 20 at the operating point
        t = quantile(ArrivalModel.unsharded(32, 32.0), 0.95)
        assert t == pytest.approx(math.log(20.0), abs=1e-8)

    def test_rateless_quantile_matches_gamma(self):
        t = quantile(ArrivalModel.rateless(32, 32.0), 0.95)
        ref = float(stats.gamma.ppf(0.95, 32, scale=1.0 / 32.0))
        assert t == pytest.approx(ref, abs=1e-8)
        assert 1.25 <= t <= 1.40

    def test_invert_cdf_rejects_bad_levels(self):
        cdf = lambda t: cdf_unsharded(t, 1, 1.0)
        with pytest.raises(ValueError):
            invert_cdf(cdf, 0.0)
        with pytest.raises(ValueError):
            invert_cdf(cdf, 1.0)
        with pytest.raises(RuntimeError):
            invert_cdf(lambda t: 0.3, 0.9)  # never reaches the level
