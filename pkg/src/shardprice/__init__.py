"""Decoding-time distributions and latency pricing for sharded payload delivery.

The library models a payload split into k units served by memoryless relays,
under four delivery regimes (unsharded, uncoded shards, fixed-rate coding,
rateless coding), plus a paid rateless fast lane layered on any of them. On
top of the decode-time distributions it computes mean-field price bounds,
fast-lane revenue optima, multi-deadline expected utilities, and top-k race
utilities, all validated against an event-level Monte Carlo oracle and a
finite-field rank experiment.
"""

from .distributions import (
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
from .models import MAX_CODED_SHARDS, ArrivalModel, Scheme, TurboModel
from .pricing import (
    FastLaneProblem,
    FastLaneSolution,
    PriceRatePair,
    expected_utility_single,
    fast_lane_price_bound,
    optimize_fast_lane,
    price_bound,
)
from .scenarios import (
    RaceConfig,
    RewardSchedule,
    expected_utility_schedule,
    mixture_cdf,
    quantile_deadlines,
    topk_expected_utility,
    utility_vs_alpha,
)
from .simulate import (
    EmpiricalCdf,
    RankExperimentConfig,
    empirical_cdf,
    innovation_counts,
    ks_distance,
    rlnc_innovation_rate,
    sample_decode_time,
    sample_decode_times,
)
from .turbo import cdf_turbo, cdf_turbo_sharded, cdf_turbo_unsharded
from .validation import CheckResult, run_validation

__version__ = "0.1.0"

__all__ = [
    "ArrivalModel",
    "CheckResult",
    "EmpiricalCdf",
    "FastLaneProblem",
    "FastLaneSolution",
    "MAX_CODED_SHARDS",
    "PriceRatePair",
    "RaceConfig",
    "RankExperimentConfig",
    "RewardSchedule",
    "Scheme",
    "TurboModel",
    "cdf_fixed_rate",
    "cdf_rateless",
    "cdf_turbo",
    "cdf_turbo_sharded",
    "cdf_turbo_unsharded",
    "cdf_uncoded",
    "cdf_unsharded",
    "counting_pmf",
    "counting_pmf_table",
    "empirical_cdf",
    "expected_utility_schedule",
    "expected_utility_single",
    "fast_lane_price_bound",
    "innovation_counts",
    "invert_cdf",
    "ks_distance",
    "mixture_cdf",
    "model_cdf",
    "model_mean",
    "optimize_fast_lane",
    "price_bound",
    "quantile",
    "quantile_deadlines",
    "rlnc_innovation_rate",
    "run_validation",
    "sample_decode_time",
    "sample_decode_times",
    "topk_expected_utility",
    "utility_vs_alpha",
]
