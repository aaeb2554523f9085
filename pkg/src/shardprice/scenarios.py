"""Deadline-schedule utilities and the top-k delivery race.

Two payoff shapes sit on top of the decode-time distributions. A reward
schedule pays r_m when the decode lands in (tau_{m-1}, tau_m], with tau_0 = 0
and an optional penalty for missing the last deadline:

    E[U] = sum_m r_m * (F(tau_m) - F(tau_{m-1})) - penalty * (1 - F(tau_last)).

A top-k race ranks one decoder against a population of N competitors whose
decode times follow a mixture CDF; finishing among the first s earns a
rank-dependent reward, and every entrant burns gas. With the competitor
quantiles tau_m = G^{-1}(m / N) as effective deadlines the race utility
telescopes to

    E[U] = -gas + (r_s + gas) * F(tau_s)
           + sum_{m=1}^{s-1} (r_m - r_{m+1}) * F(tau_m).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Sequence

from .distributions import ArrayLike, cdf_rateless, cdf_uncoded, invert_cdf, model_cdf, model_mean
from .models import ArrivalModel

__all__ = [
    "RewardSchedule",
    "RaceConfig",
    "expected_utility_schedule",
    "quantile_deadlines",
    "mixture_cdf",
    "topk_expected_utility",
    "utility_vs_alpha",
]

# Competitor quantile levels are capped just under 1 so the last effective
# deadline stays finite even when the winner count equals the field size.
_QUANTILE_CAP = 1.0 - 1e-9


def _as_float_tuple(name: str, values: Sequence[float]) -> tuple[float, ...]:
    out = tuple(float(v) for v in values)
    if not out:
        raise ValueError(f"{name} must be non-empty")
    if any(not math.isfinite(v) for v in out):
        raise ValueError(f"{name} must contain only finite numbers")
    return out


@dataclass(frozen=True)
class RewardSchedule:
    """Stepwise rewards over increasing deadlines, plus a terminal penalty.

    ``rewards[m]`` is paid when the decode time falls in
    (deadlines[m-1], deadlines[m]], with an implicit start at time zero.
    """

    deadlines: tuple[float, ...]
    rewards: tuple[float, ...]
    terminal_penalty: float = 0.0

    def __post_init__(self) -> None:
        deadlines = _as_float_tuple("deadlines", self.deadlines)
        rewards = _as_float_tuple("rewards", self.rewards)
        object.__setattr__(self, "deadlines", deadlines)
        object.__setattr__(self, "rewards", rewards)
        if len(deadlines) != len(rewards):
            raise ValueError("deadlines and rewards must have equal length")
        if deadlines[0] <= 0 or any(b <= a for a, b in zip(deadlines, deadlines[1:])):
            raise ValueError("deadlines must be strictly increasing and positive")
        if any(b > a for a, b in zip(rewards, rewards[1:])):
            raise ValueError("rewards must be nonincreasing over deadlines")
        if any(r < 0 for r in rewards):
            raise ValueError("rewards must be >= 0")
        if not (math.isfinite(self.terminal_penalty) and self.terminal_penalty >= 0):
            raise ValueError("terminal_penalty must be finite and >= 0")

    @classmethod
    def harmonic(cls, reward: float, base_delay: float, horizon: int = 16) -> "RewardSchedule":
        """Deadlines i * base_delay paying reward / i, for i = 1..horizon."""
        if not (isinstance(horizon, int) and horizon >= 1):
            raise ValueError(f"horizon must be an int >= 1, got {horizon!r}")
        if not (math.isfinite(base_delay) and base_delay > 0):
            raise ValueError(f"base_delay must be finite and > 0, got {base_delay!r}")
        if not (math.isfinite(reward) and reward > 0):
            raise ValueError(f"reward must be finite and > 0, got {reward!r}")
        ds = tuple(i * base_delay for i in range(1, horizon + 1))
        rs = tuple(reward / i for i in range(1, horizon + 1))
        return cls(ds, rs)

    @property
    def last_deadline(self) -> float:
        return self.deadlines[-1]


def expected_utility_schedule(
    cdf: Callable[[float], float], schedule: RewardSchedule
) -> float:
    """E[U] of a decode-time CDF under a stepwise reward schedule."""
    total = 0.0
    prev = 0.0
    for deadline, reward in zip(schedule.deadlines, schedule.rewards):
        cur = float(cdf(deadline))
        if not (prev - 1e-12 <= cur <= 1.0 + 1e-12):
            raise ValueError("cdf must be nondecreasing with values in [0, 1]")
        total += reward * (cur - prev)
        prev = cur
    total -= schedule.terminal_penalty * (1.0 - prev)
    return total


@dataclass(frozen=True)
class RaceConfig:
    """A top-k race: N competitors, the first s finishers earn rank rewards.

    The population decode time follows the mixture
    alpha * F_fast + (1 - alpha) * F_base; one entrant deviates by running
    either lane alone. Gas is burned by every entrant regardless of rank, and
    a zero-gas race is allowed.
    """

    n_competitors: int
    s_rewarded: int
    rank_rewards: tuple[float, ...]
    gas: float
    alpha: float
    fast_model: ArrivalModel
    base_model: ArrivalModel

    def __post_init__(self) -> None:
        n, s = self.n_competitors, self.s_rewarded
        if not (isinstance(n, int) and n >= 1):
            raise ValueError(f"n_competitors must be an int >= 1, got {n!r}")
        if not (isinstance(s, int) and 1 <= s <= n):
            raise ValueError(f"s_rewarded must be an int in [1, n_competitors], got {s!r}")
        rewards = _as_float_tuple("rank_rewards", self.rank_rewards)
        object.__setattr__(self, "rank_rewards", rewards)
        if len(rewards) != s:
            raise ValueError("rank_rewards must have one entry per rewarded rank")
        if any(r <= 0 for r in rewards):
            raise ValueError("rank rewards must be > 0")
        if any(b > a for a, b in zip(rewards, rewards[1:])):
            raise ValueError("rank rewards must be nonincreasing in rank")
        if not (math.isfinite(self.gas) and self.gas >= 0):
            raise ValueError(f"gas must be finite and >= 0, got {self.gas!r}")
        if not (math.isfinite(self.alpha) and 0.0 <= self.alpha <= 1.0):
            raise ValueError(f"alpha must lie in [0, 1], got {self.alpha!r}")
        for name in ("fast_model", "base_model"):
            if not isinstance(getattr(self, name), ArrivalModel):
                raise ValueError(f"{name} must be an ArrivalModel")

    @classmethod
    def with_linear_rewards(
        cls,
        n_competitors: int,
        s_rewarded: int,
        reward: float,
        gas: float,
        alpha: float,
        fast_model: ArrivalModel,
        base_model: ArrivalModel,
    ) -> "RaceConfig":
        """Rank m earns reward * (s - m + 1) / s, declining linearly to reward / s."""
        if not (math.isfinite(reward) and reward > 0):
            raise ValueError(f"reward must be finite and > 0, got {reward!r}")
        rewards = tuple(
            reward * (s_rewarded - m + 1) / s_rewarded for m in range(1, s_rewarded + 1)
        )
        return cls(n_competitors, s_rewarded, rewards, gas, alpha, fast_model, base_model)


def mixture_cdf(alpha: float, tau: ArrayLike, k: int, lam: float) -> ArrayLike:
    """Population decode-time CDF: alpha rateless + (1 - alpha) uncoded."""
    if not (math.isfinite(alpha) and 0.0 <= alpha <= 1.0):
        raise ValueError(f"alpha must lie in [0, 1], got {alpha!r}")
    return alpha * cdf_rateless(tau, k, lam) + (1.0 - alpha) * cdf_uncoded(tau, k, lam)


def _population_cdf(config: RaceConfig) -> Callable[[ArrayLike], ArrayLike]:
    a = config.alpha

    def cdf(tau: ArrayLike) -> ArrayLike:
        return a * model_cdf(config.fast_model, tau) + (1.0 - a) * model_cdf(
            config.base_model, tau
        )

    return cdf


def quantile_deadlines(
    population_cdf: Callable[[float], float],
    n_competitors: int,
    s_rewarded: int,
    bracket_hint: float = 1.0,
    tol: float = 1e-10,
) -> tuple[float, ...]:
    """Effective deadlines tau_m = G^{-1}(m / N) for ranks m = 1..s.

    The level for m == N is capped at 1 - 1e-9 so the bracket stays finite.
    """
    if not (isinstance(n_competitors, int) and n_competitors >= 1):
        raise ValueError(f"n_competitors must be an int >= 1, got {n_competitors!r}")
    if not (isinstance(s_rewarded, int) and 1 <= s_rewarded <= n_competitors):
        raise ValueError("s_rewarded must lie in [1, n_competitors]")
    out = []
    for m in range(1, s_rewarded + 1):
        q = min(m / n_competitors, _QUANTILE_CAP)
        out.append(invert_cdf(population_cdf, q, bracket_hint=bracket_hint, tol=tol))
    return tuple(out)


def topk_expected_utility(own_cdf: Callable[[float], float], config: RaceConfig) -> float:
    """E[U] of one entrant with decode-time CDF ``own_cdf`` in the race.

    Ranks are decided against the population quantiles, so entrant m-th place
    requires finishing before tau_m = G^{-1}(m / N); the stepwise payoff then
    telescopes into a weighted sum of own on-time probabilities.
    """
    hint = 2.0 * max(model_mean(config.fast_model), model_mean(config.base_model))
    taus = quantile_deadlines(
        _population_cdf(config), config.n_competitors, config.s_rewarded, bracket_hint=hint
    )
    rewards = config.rank_rewards
    s = config.s_rewarded
    own = [float(own_cdf(t)) for t in taus]
    total = -config.gas + (rewards[s - 1] + config.gas) * own[s - 1]
    for m in range(1, s):
        total += (rewards[m - 1] - rewards[m]) * own[m - 1]
    return total


def utility_vs_alpha(
    config: RaceConfig, alphas: Sequence[float]
) -> list[tuple[float, float, float]]:
    """Sweep the population mix and report (alpha, E[U] fast, E[U] base).

    The fast entrant runs ``fast_model`` alone and the base entrant
    ``base_model`` alone, each against the same mixed population.
    """
    rows = []
    for a in alphas:
        cfg = replace(config, alpha=float(a))
        fast_cdf = lambda t: model_cdf(cfg.fast_model, t)
        base_cdf = lambda t: model_cdf(cfg.base_model, t)
        rows.append(
            (
                float(a),
                topk_expected_utility(fast_cdf, cfg),
                topk_expected_utility(base_cdf, cfg),
            )
        )
    return rows
