"""Monte Carlo sampler tests: agreement with analytic laws, determinism, edges."""

import numpy as np
import pytest

from shardprice import (
    ArrivalModel,
    EmpiricalCdf,
    TurboModel,
    cdf_turbo,
    empirical_cdf,
    ks_distance,
    model_cdf,
    model_mean,
    sample_decode_time,
    sample_decode_times,
)

_TRIALS = 20_000
# Kolmogorov critical value at the 1% level for n = 20000, with headroom
_KS_BOUND = 0.013


def _models():
    return {
        "unsharded": ArrivalModel.unsharded(32, 32.0),
        "uncoded": ArrivalModel.uncoded(32, 32.0),
        "fixed_rate": ArrivalModel.fixed_rate(32, 64, 32.0),
        "rateless": ArrivalModel.rateless(32, 32.0),
    }


class TestSamplersMatchAnalyticCdfs:
    @pytest.mark.parametrize("name", ["unsharded", "uncoded", "fixed_rate", "rateless"])
    def test_standalone_ks(self, name):
        model = _models()[name]
        emp = empirical_cdf(model, _TRIALS, 100)
        stat = ks_distance(emp, lambda t: model_cdf(model, t))
        assert stat < _KS_BOUND

    @pytest.mark.parametrize("name", ["unsharded", "uncoded", "fixed_rate", "rateless"])
    def test_turbo_ks(self, name):
        turbo = TurboModel(_models()[name], lambda2=32.0)
        emp = empirical_cdf(turbo, _TRIALS, 200)
        stat = ks_distance(emp, lambda t: cdf_turbo(t, turbo))
        assert stat < _KS_BOUND

    def test_rateless_single_shard_is_exponential(self):
        model = ArrivalModel.rateless(1, 2.0)
        times = sample_decode_times(model, 50_000, 7)
        se = model_mean(model) / np.sqrt(times.size)
        assert abs(times.mean() - 0.5) < 4 * se
        assert abs(np.median(times) - np.log(2) / 2.0) < 0.01

    def test_sample_mean_tracks_model_mean(self):
        for model in _models().values():
            times = sample_decode_times(model, 50_000, 11)
            rel = abs(times.mean() - model_mean(model)) / model_mean(model)
            assert rel < 0.02


class TestSamplePaths:
    def test_deterministic_under_seed(self):
        model = ArrivalModel.uncoded(8, 4.0)
        a = sample_decode_times(model, 1000, 42)
        b = sample_decode_times(model, 1000, 42)
        np.testing.assert_array_equal(a, b)
        c = sample_decode_times(model, 1000, 43)
        assert not np.array_equal(a, c)

    def test_generator_instances_are_honored(self):
        model = ArrivalModel.rateless(4, 4.0)
        a = sample_decode_times(model, 100, np.random.default_rng(3))
        b = sample_decode_times(model, 100, np.random.default_rng(3))
        np.testing.assert_array_equal(a, b)

    @pytest.mark.parametrize("name", ["unsharded", "uncoded", "fixed_rate", "rateless"])
    def test_idle_fast_lane_reproduces_base_draws(self, name):
        base = _models()[name]
        solo = sample_decode_times(base, 5000, 17)
        turbo = sample_decode_times(TurboModel(base, lambda2=0.0), 5000, 17)
        np.testing.assert_array_equal(solo, turbo)

    def test_fast_lane_weakly_speeds_paths_up(self):
        base = ArrivalModel.uncoded(16, 16.0)
        # same seed: turbo adds events on top of the identical base draws
        solo = sample_decode_times(base, 5000, 23)
        turbo = sample_decode_times(TurboModel(base, lambda2=8.0), 5000, 23)
        assert np.all(turbo <= solo + 1e-12)
        assert turbo.mean() < solo.mean()

    def test_scalar_draw(self):
        value = sample_decode_time(ArrivalModel.unsharded(4, 4.0), 1)
        assert isinstance(value, float) and value > 0

    def test_all_samples_positive(self):
        for model in _models().values():
            assert np.all(sample_decode_times(model, 2000, 5) > 0)

    def test_trials_validation(self):
        with pytest.raises(ValueError):
            sample_decode_times(ArrivalModel.unsharded(2, 1.0), 0, 1)


class TestEmpiricalCdf:
    def test_step_values(self):
        emp = EmpiricalCdf(samples=np.array([1.0, 2.0, 3.0]))
        assert emp.count == 3
        assert emp.evaluate(0.5) == 0.0
        assert emp.evaluate(1.0) == pytest.approx(1 / 3)
        assert emp.evaluate(2.5) == pytest.approx(2 / 3)
        assert emp.evaluate(3.0) == 1.0
        grid = emp.evaluate(np.array([0.0, 1.5, 99.0]))
        np.testing.assert_allclose(grid, [0.0, 1 / 3, 1.0])

    def test_requires_sorted_nonempty_vector(self):
        with pytest.raises(ValueError):
            EmpiricalCdf(samples=np.array([2.0, 1.0]))
        with pytest.raises(ValueError):
            EmpiricalCdf(samples=np.array([]))
        with pytest.raises(ValueError):
            EmpiricalCdf(samples=np.array([[1.0, 2.0]]))

    def test_single_sample_at_median_scores_half(self):
        emp = EmpiricalCdf(samples=np.array([np.log(2.0)]))
        stat = ks_distance(emp, lambda t: 1.0 - np.exp(-np.asarray(t)))
        assert stat == pytest.approx(0.5)

    def test_wrong_model_is_detected(self):
        model = ArrivalModel.uncoded(32, 32.0)
        emp = empirical_cdf(model, 5000, 3)
        wrong = ArrivalModel.unsharded(32, 32.0)
        stat = ks_distance(emp, lambda t: model_cdf(wrong, t))
        assert stat > 0.1
