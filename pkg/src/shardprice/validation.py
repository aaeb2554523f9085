"""Self-check suite: closed forms against the event-level oracle.

Each check compares an analytic quantity with an independent computation
(Monte Carlo sampling, a limit argument, or the rank experiment) and reports
a measured statistic with its threshold. Checks whose Monte Carlo resolution
cannot distinguish pass from fail at the configured sample size come back
``inconclusive`` instead of silently passing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .distributions import (
    cdf_fixed_rate,
    cdf_rateless,
    cdf_uncoded,
    cdf_unsharded,
    model_cdf,
    quantile,
)
from .models import ArrivalModel, TurboModel
from .simulate import RankExperimentConfig, empirical_cdf, ks_distance, rlnc_innovation_rate
from .turbo import cdf_turbo

__all__ = ["CheckResult", "run_validation"]

# KS critical value scale at the ~1% level; below sqrt(trials) resolution a
# KS check cannot separate a real defect from sampling noise.
_KS_CRITICAL = 1.63

_KS_THRESHOLD = 0.01
_LIMIT_THRESHOLD = 5e-3
_COLLAPSE_THRESHOLD = 1e-12
_RANK_THRESHOLD = 1e-3
_MIN_RANK_TRIALS = 1000

_K = 32
_N = 64
_LAMBDA = 32.0


@dataclass(frozen=True)
class CheckResult:
    """Outcome of one validation check."""

    name: str
    status: str  # "pass", "fail", or "inconclusive"
    statistic: float
    threshold: float
    detail: str

    @property
    def failed(self) -> bool:
        return self.status == "fail"


def _verdict(name: str, statistic: float, threshold: float, detail: str,
             conclusive: bool = True) -> CheckResult:
    if not conclusive:
        status = "inconclusive"
    else:
        status = "pass" if statistic <= threshold else "fail"
    return CheckResult(name, status, float(statistic), float(threshold), detail)


def _ks_checks(trials: int, seed: int) -> list[CheckResult]:
    conclusive = _KS_CRITICAL / math.sqrt(trials) <= _KS_THRESHOLD
    base_models = {
        "ks_unsharded": ArrivalModel.unsharded(_K, _LAMBDA),
        "ks_uncoded": ArrivalModel.uncoded(_K, _LAMBDA),
        "ks_fixed_rate": ArrivalModel.fixed_rate(_K, _N, _LAMBDA),
        "ks_rateless": ArrivalModel.rateless(_K, _LAMBDA),
    }
    out = []
    offset = 0
    for name, model in base_models.items():
        emp = empirical_cdf(model, trials, seed + offset)
        stat = ks_distance(emp, lambda t: model_cdf(model, t))
        out.append(
            _verdict(name, stat, _KS_THRESHOLD, f"{trials} trials, k={_K}", conclusive)
        )
        offset += 1
    turbo_bases = {
        "ks_turbo_unsharded": ArrivalModel.unsharded(_K, _LAMBDA),
        "ks_turbo_uncoded": ArrivalModel.uncoded(_K, _LAMBDA),
        "ks_turbo_fixed_rate": ArrivalModel.fixed_rate(_K, _N, _LAMBDA),
        "ks_turbo_rateless": ArrivalModel.rateless(_K, _LAMBDA),
    }
    for name, base in turbo_bases.items():
        turbo = TurboModel(base, _LAMBDA)
        emp = empirical_cdf(turbo, trials, seed + offset)
        stat = ks_distance(emp, lambda t: cdf_turbo(t, turbo))
        detail = f"{trials} trials, lambda1=lambda2={_LAMBDA:g}"
        out.append(_verdict(name, stat, _KS_THRESHOLD, detail, conclusive))
        offset += 1
    return out


def _poisson_limit_check() -> CheckResult:
    n = 2**14
    taus = np.linspace(0.0, 3.0, 300)
    gap = np.max(
        np.abs(cdf_fixed_rate(taus, _K, n, _LAMBDA) - cdf_rateless(taus, _K, _LAMBDA))
    )
    return _verdict(
        "poisson_limit", gap, _LIMIT_THRESHOLD, f"sup gap over 300 points, n={n}"
    )


def _collapse_check() -> CheckResult:
    total = 2 * _LAMBDA
    taus = np.linspace(0.0, 4.0, 100)
    reference = cdf_rateless(taus, _K, total)
    worst = 0.0
    for lam1 in (8.0, 16.0, 32.0, 48.0, 56.0):
        turbo = TurboModel(ArrivalModel.rateless(_K, lam1), total - lam1)
        worst = max(worst, float(np.max(np.abs(cdf_turbo(taus, turbo) - reference))))
    return _verdict(
        "turbo_rateless_collapse",
        worst,
        _COLLAPSE_THRESHOLD,
        "merged-stream identity over rate splits of 64",
    )


def _dominance_check() -> CheckResult:
    taus = np.linspace(0.01, 4.0, 200)
    rl = cdf_rateless(taus, _K, _LAMBDA)
    fr = cdf_fixed_rate(taus, _K, _N, _LAMBDA)
    un = cdf_uncoded(taus, _K, _LAMBDA)
    worst = -min(float(np.min(rl - fr)), float(np.min(fr - un)))
    return _verdict(
        "cdf_dominance", worst, 1e-12, "rateless >= fixed-rate >= uncoded on tau grid"
    )


def _price_ordering_check() -> CheckResult:
    taus = np.linspace(0.05, 4.0, 80)
    rl = cdf_rateless(taus, _K, _LAMBDA) / _LAMBDA
    fr = cdf_fixed_rate(taus, _K, _N, _LAMBDA) / _LAMBDA
    un = cdf_uncoded(taus, _K, _LAMBDA) / _LAMBDA
    mask = (rl > 0) & (fr > 0) & (un > 0)
    ordered = np.all(rl[mask] > fr[mask]) and np.all(fr[mask] > un[mask])
    stat = 0.0 if ordered else 1.0
    return _verdict(
        "price_ordering", stat, 0.5, "strict bound ordering where all positive"
    )


def _service_ratio_checks() -> list[CheckResult]:
    level = 0.95
    t_un = quantile(ArrivalModel.unsharded(_K, _LAMBDA), level)
    t_rl = quantile(ArrivalModel.rateless(_K, _LAMBDA), level)
    t_fr = quantile(ArrivalModel.fixed_rate(_K, _N, _LAMBDA), level)
    checks = []
    for name, ratio, lo, hi in (
        ("service_ratio_rateless", t_un / t_rl, 2.0, 2.4),
        ("service_ratio_fixed_rate", t_un / t_fr, 1.6, 1.8),
    ):
        inside = lo <= ratio <= hi
        checks.append(
            CheckResult(
                name,
                "pass" if inside else "fail",
                float(ratio),
                float(hi),
                f"95% service-time ratio, expected in [{lo}, {hi}]",
            )
        )
    return checks


def _rank_checks(rank_trials: int, seed: int, backend: str) -> list[CheckResult]:
    conclusive = rank_trials >= _MIN_RANK_TRIALS
    fractions = {}
    for q in (2, 2**8, 2**16):
        config = RankExperimentConfig(k=_K, q=q, trials=rank_trials)
        fractions[q] = rlnc_innovation_rate(config, seed, backend=backend)
    out = [
        _verdict(
            "rank_q65536",
            fractions[2**16],
            _RANK_THRESHOLD,
            f"non-innovation fraction, k={_K}, {rank_trials} trials",
            conclusive,
        )
    ]
    direction = fractions[2] > fractions[2**16]
    out.append(
        CheckResult(
            "rank_direction",
            ("pass" if direction else "fail") if conclusive else "inconclusive",
            float(fractions[2] - fractions[2**16]),
            0.0,
            f"fraction at q=2 ({fractions[2]:.3g}) must exceed q=2^16",
        )
    )
    monotone = fractions[2] >= fractions[2**8] >= fractions[2**16]
    out.append(
        CheckResult(
            "rank_monotone",
            ("pass" if monotone else "fail") if conclusive else "inconclusive",
            float(fractions[2**8]),
            float(fractions[2]),
            "fraction nonincreasing over q in {2, 2^8, 2^16}",
        )
    )
    return out


def run_validation(
    trials: int = 100_000,
    rank_trials: int = 10_000,
    seed: int = 1234,
    backend: str = "auto",
) -> list[CheckResult]:
    """Run the full oracle suite and return one record per check."""
    if not (isinstance(trials, int) and trials >= 1):
        raise ValueError(f"trials must be an int >= 1, got {trials!r}")
    if not (isinstance(rank_trials, int) and rank_trials >= 1):
        raise ValueError(f"rank_trials must be an int >= 1, got {rank_trials!r}")
    results = _ks_checks(trials, seed)
    results.append(_poisson_limit_check())
    results.append(_collapse_check())
    results.append(_dominance_check())
    results.append(_price_ordering_check())
    results.extend(_service_ratio_checks())
    results.extend(_rank_checks(rank_trials, seed + 101, backend))
    return results
