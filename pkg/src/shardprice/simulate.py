"""Event-level Monte Carlo oracle for the closed-form distributions.

Samplers draw the actual arrival events of each regime: per-shard exponential
clocks for uncoded and fixed-rate lanes, a cumulative-gap Poisson stream for
rateless coding, and the merged order statistic for two-lane models. This
deliberately re-derives every distribution from raw events so the analytic
module and the oracle share no formulas.

The RLNC rank experiment is the one loop-bound piece; it runs on the kernel
backends in :mod:`shardprice.kernels`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from . import kernels
from .models import ArrivalModel, Scheme, TurboModel

__all__ = [
    "EmpiricalCdf",
    "RankExperimentConfig",
    "sample_decode_time",
    "sample_decode_times",
    "empirical_cdf",
    "ks_distance",
    "rlnc_innovation_rate",
    "innovation_counts",
]

AnyModel = Union[ArrivalModel, TurboModel]

# Trials are drawn in fixed-size blocks so event matrices stay in memory
# budget; the block size is part of the seeded stream layout.
_BLOCK = 1 << 17


@dataclass(frozen=True)
class EmpiricalCdf:
    """Step-function CDF over a sorted sample of decode times."""

    samples: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.samples, dtype=float)
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("samples must be a non-empty 1-d array")
        if np.any(np.diff(arr) < 0):
            raise ValueError("samples must be sorted ascending")
        object.__setattr__(self, "samples", arr)

    @property
    def count(self) -> int:
        return int(self.samples.size)

    def evaluate(self, tau: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
        """F̂(tau) = (#samples <= tau) / count."""
        pos = np.searchsorted(self.samples, np.asarray(tau, dtype=float), side="right")
        out = pos / self.count
        return float(out) if np.ndim(tau) == 0 else out


@dataclass(frozen=True)
class RankExperimentConfig:
    """Setup for the RLNC innovation experiment.

    ``mix_units`` interleaves unit coefficient vectors (standing for uncoded
    base-lane shards) with the random coded vectors; each reception flips a
    fair coin for the shard type and unit shards arrive in a random
    without-replacement order, falling back to coded shards once exhausted.
    """

    k: int
    q: int
    trials: int
    mix_units: bool = False

    def __post_init__(self) -> None:
        if not (isinstance(self.k, int) and self.k >= 1):
            raise ValueError(f"k must be an int >= 1, got {self.k!r}")
        if self.q not in (2, 2**8, 2**16):
            raise ValueError(f"field size q must be 2, 2^8, or 2^16, got {self.q!r}")
        if not (isinstance(self.trials, int) and self.trials >= 1):
            raise ValueError(f"trials must be an int >= 1, got {self.trials!r}")


def _rng(rng_seed) -> np.random.Generator:
    return np.random.default_rng(rng_seed)


def _sharded_event_times(model: ArrivalModel, block: int, rng: np.random.Generator) -> np.ndarray:
    """Times at which the distinct-useful-shard count increments, per trial."""
    k, lam = model.k, model.lam
    if model.scheme is Scheme.UNCODED:
        return rng.exponential(k / lam, size=(block, k))
    if model.scheme is Scheme.FIXED_RATE:
        return rng.exponential(model.n / lam, size=(block, model.n))
    return np.cumsum(rng.exponential(1.0 / lam, size=(block, k)), axis=1)


def _sample_block(model: AnyModel, block: int, rng: np.random.Generator) -> np.ndarray:
    if isinstance(model, TurboModel):
        base, lambda2 = model.base, model.lambda2
        k = base.k
        if base.scheme is Scheme.UNSHARDED:
            times = rng.exponential(k / base.lam, size=block)
            if lambda2 > 0:
                fast = np.cumsum(rng.exponential(1.0 / lambda2, size=(block, k)), axis=1)
                times = np.minimum(times, fast[:, -1])
            return times
        events = _sharded_event_times(base, block, rng)
        if lambda2 > 0:
            fast = np.cumsum(rng.exponential(1.0 / lambda2, size=(block, k)), axis=1)
            events = np.hstack([events, fast])
        return np.partition(events, k - 1, axis=1)[:, k - 1]

    k, lam = model.k, model.lam
    if model.scheme is Scheme.UNSHARDED:
        return rng.exponential(k / lam, size=block)
    if model.scheme is Scheme.UNCODED:
        return _sharded_event_times(model, block, rng).max(axis=1)
    if model.scheme is Scheme.RATELESS:
        return _sharded_event_times(model, block, rng)[:, -1]
    return np.partition(_sharded_event_times(model, block, rng), k - 1, axis=1)[:, k - 1]


def sample_decode_times(model: AnyModel, trials: int, rng_seed) -> np.ndarray:
    """Draw ``trials`` independent decode times by simulating arrival events."""
    if not (isinstance(trials, int) and trials >= 1):
        raise ValueError(f"trials must be an int >= 1, got {trials!r}")
    if not isinstance(model, (ArrivalModel, TurboModel)):
        raise ValueError(f"expected an ArrivalModel or TurboModel, got {model!r}")
    rng = _rng(rng_seed)
    parts = []
    remaining = trials
    while remaining > 0:
        block = min(remaining, _BLOCK)
        parts.append(_sample_block(model, block, rng))
        remaining -= block
    return np.concatenate(parts) if len(parts) > 1 else parts[0]


def sample_decode_time(model: AnyModel, rng_seed) -> float:
    """Draw a single decode time."""
    return float(sample_decode_times(model, 1, rng_seed)[0])


def empirical_cdf(model: AnyModel, trials: int, rng_seed) -> EmpiricalCdf:
    """Empirical decode-time CDF over ``trials`` seeded draws."""
    return EmpiricalCdf(np.sort(sample_decode_times(model, trials, rng_seed)))


def ks_distance(emp: EmpiricalCdf, analytic: Callable[[np.ndarray], np.ndarray]) -> float:
    """sup_t |F̂(t) - F(t)|, evaluated at both edges of every sample step."""
    f = np.asarray(analytic(emp.samples), dtype=float)
    n = emp.count
    upper = np.arange(1, n + 1) / n
    lower = np.arange(0, n) / n
    return float(np.max(np.maximum(np.abs(upper - f), np.abs(lower - f))))


def innovation_counts(
    config: RankExperimentConfig, rng_seed: int, backend: str = "auto"
) -> tuple[np.ndarray, np.ndarray]:
    """Per-trial (non-innovative, total) reception counts until rank k."""
    return kernels.innovation_experiment(
        config.k, config.q, config.trials, int(rng_seed), config.mix_units, backend
    )


def rlnc_innovation_rate(
    config: RankExperimentConfig, rng_seed: int, backend: str = "auto"
) -> float:
    """Observed fraction of non-innovative receptions before rank k.

    Aggregated across trials: total non-innovative receptions divided by
    total receptions. Small values mean the innovation assumption holds.
    """
    noninnov, receptions = innovation_counts(config, rng_seed, backend)
    return float(noninnov.sum() / receptions.sum())
