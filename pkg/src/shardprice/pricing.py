"""Mean-field pricing for relay bandwidth under deadline utilities.

A client that earns expected utility E[U] from deliveries arriving at rate
lam breaks even at the posted unit price p when p * lam <= E[U], so the
supportable price is bounded by E[U] / lam. For a fast lane added on top of a
base pipeline the marginal form applies: the lane at rate lambda2 lifts the
on-time probability from F_base(tau) to F_turbo(tau) and supports

    p2 <= reward * (F_turbo(tau) - F_base(tau)) / lambda2.

The lane operator picks lambda2 inside the capacity cap to maximize revenue
p2 * lambda2 = reward * (F_turbo - F_base); a grid scan certifies whether
that objective is monotone in lambda2 (it is for the regimes studied here,
which pushes the optimum to the cap).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .distributions import model_cdf
from .models import ArrivalModel, TurboModel
from .turbo import cdf_turbo

__all__ = [
    "PriceRatePair",
    "FastLaneProblem",
    "FastLaneSolution",
    "expected_utility_single",
    "price_bound",
    "fast_lane_price_bound",
    "optimize_fast_lane",
]

# Relative slack when checking rate sums against the capacity cap, so grids
# built as lam + headroom * i / points never trip on float rounding.
_CAP_SLACK = 1e-9


def _require_finite(name: str, value: float) -> float:
    if not (isinstance(value, (int, float)) and math.isfinite(value)):
        raise ValueError(f"{name} must be a finite number, got {value!r}")
    return float(value)


@dataclass(frozen=True)
class PriceRatePair:
    """A posted unit price together with the arrival rate it applies to."""

    price: float
    rate: float

    def __post_init__(self) -> None:
        p = _require_finite("price", self.price)
        r = _require_finite("rate", self.rate)
        if p < 0:
            raise ValueError(f"price must be >= 0, got {p!r}")
        if r <= 0:
            raise ValueError(f"rate must be > 0, got {r!r}")

    @property
    def expenditure_rate(self) -> float:
        """Spend per unit time at this price and rate."""
        return self.price * self.rate


@dataclass(frozen=True)
class FastLaneProblem:
    """Inputs for pricing a rateless fast lane over a fixed base pipeline."""

    base: ArrivalModel
    lambda_max: float
    tau: float
    reward: float

    def __post_init__(self) -> None:
        lam_max = _require_finite("lambda_max", self.lambda_max)
        tau = _require_finite("tau", self.tau)
        reward = _require_finite("reward", self.reward)
        if tau <= 0:
            raise ValueError(f"deadline tau must be > 0, got {tau!r}")
        if reward <= 0:
            raise ValueError(f"reward must be > 0, got {reward!r}")
        if self.base.lam > lam_max * (1.0 + _CAP_SLACK):
            raise ValueError("base rate already exceeds the capacity cap")

    @property
    def headroom(self) -> float:
        """Capacity left for the fast lane."""
        return max(self.lambda_max - self.base.lam, 0.0)


@dataclass(frozen=True)
class FastLaneSolution:
    """Optimizer output: chosen lane rate, supportable price, and revenue."""

    lambda2: float
    price: float
    revenue: float
    monotone_on_grid: bool

    @property
    def feasible(self) -> bool:
        return math.isfinite(self.lambda2)


def expected_utility_single(on_time_probability: float, reward: float) -> float:
    """E[U] for a single deadline: reward paid iff the decode lands in time."""
    p = _require_finite("on_time_probability", on_time_probability)
    r = _require_finite("reward", reward)
    if not (0.0 <= p <= 1.0):
        raise ValueError(f"on_time_probability must lie in [0, 1], got {p!r}")
    if r <= 0:
        raise ValueError(f"reward must be > 0, got {r!r}")
    return r * p


def price_bound(expected_utility: float, lam: float) -> float:
    """Largest unit price a client with utility E[U] supports at rate lam."""
    eu = _require_finite("expected_utility", expected_utility)
    if not (isinstance(lam, (int, float)) and math.isfinite(lam) and lam > 0):
        raise ValueError(f"rate must be finite and > 0, got {lam!r}")
    return eu / lam


def fast_lane_price_bound(problem: FastLaneProblem, lambda2: float) -> float:
    """Supportable fast-lane price at lane rate lambda2 under the cap."""
    l2 = _require_finite("lambda2", lambda2)
    if l2 <= 0:
        raise ValueError(f"fast-lane rate must be > 0, got {l2!r}")
    if problem.base.lam + l2 > problem.lambda_max * (1.0 + _CAP_SLACK) + _CAP_SLACK:
        raise ValueError(
            f"rate sum {problem.base.lam + l2} exceeds capacity cap {problem.lambda_max}"
        )
    gain = cdf_turbo(problem.tau, TurboModel(problem.base, l2)) - model_cdf(
        problem.base, problem.tau
    )
    return problem.reward * max(gain, 0.0) / l2


def optimize_fast_lane(
    problem: FastLaneProblem,
    grid_points: int = 256,
    monotone_slack: float = 1e-12,
) -> FastLaneSolution:
    """Pick the revenue-maximizing fast-lane rate on a grid inside the cap.

    Revenue reward * (F_turbo - F_base) is scanned on an even grid over
    (0, headroom]. When the scan is nondecreasing (up to ``monotone_slack``)
    the cap itself is optimal and is returned directly; otherwise the best
    grid point wins, ties resolved toward the smallest rate. A lane that
    cannot earn positive revenue comes back with NaN rate and price.
    """
    if not (isinstance(grid_points, int) and grid_points >= 2):
        raise ValueError(f"grid_points must be an int >= 2, got {grid_points!r}")
    headroom = problem.headroom
    if headroom <= 0:
        raise ValueError("no capacity headroom left for a fast lane")
    rates = headroom * np.arange(1, grid_points + 1) / grid_points
    base_val = model_cdf(problem.base, problem.tau)
    revenue = np.array(
        [
            problem.reward * (cdf_turbo(problem.tau, TurboModel(problem.base, l2)) - base_val)
            for l2 in rates
        ]
    )
    monotone = bool(np.all(np.diff(revenue) >= -monotone_slack))
    idx = grid_points - 1 if monotone else int(np.argmax(revenue))
    if revenue[idx] <= 0:
        return FastLaneSolution(math.nan, math.nan, 0.0, monotone)
    lam2 = float(rates[idx])
    rev = float(revenue[idx])
    return FastLaneSolution(lam2, rev / lam2, rev, monotone)
