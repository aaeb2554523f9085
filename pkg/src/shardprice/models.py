"""Domain types for payload delivery over a memoryless relay fabric.

A payload is split into ``k`` recoverable units and served by relays whose
deliveries form a Poisson process with aggregate rate ``lam``. The scheme
decides what each delivery carries and therefore which order statistic of the
arrival process completes the decode.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

# Fixed-rate coded shards carry 2-byte locators, so n may not exceed 2**16.
MAX_CODED_SHARDS = 2**16


class Scheme(Enum):
    """Delivery regime for a payload split into k recoverable units."""

    UNSHARDED = "unsharded"
    UNCODED = "uncoded"
    FIXED_RATE = "fixed_rate"
    RATELESS = "rateless"


def _require_positive_rate(lam: float) -> None:
    if not (isinstance(lam, (int, float)) and math.isfinite(lam) and lam > 0):
        raise ValueError(f"arrival rate must be finite and > 0, got {lam!r}")


def _require_unit_count(k: int) -> None:
    if not (isinstance(k, int) and not isinstance(k, bool) and k >= 1):
        raise ValueError(f"unit count k must be an int >= 1, got {k!r}")


@dataclass(frozen=True)
class ArrivalModel:
    """One delivery pipeline: a scheme plus its arrival-rate parameters.

    Attributes:
        scheme: delivery regime.
        k: number of units needed to decode the payload.
        lam: aggregate arrival rate of the pipeline.
        n: total coded shards, required iff scheme is FIXED_RATE.
    """

    scheme: Scheme
    k: int
    lam: float
    n: int | None = None

    def __post_init__(self) -> None:
        if not isinstance(self.scheme, Scheme):
            raise ValueError(f"scheme must be a Scheme, got {self.scheme!r}")
        _require_unit_count(self.k)
        _require_positive_rate(self.lam)
        if self.scheme is Scheme.FIXED_RATE:
            if not (isinstance(self.n, int) and not isinstance(self.n, bool)):
                raise ValueError("fixed-rate coding requires an integer shard count n")
            if not (self.k <= self.n <= MAX_CODED_SHARDS):
                raise ValueError(
                    f"fixed-rate shard count must satisfy k <= n <= {MAX_CODED_SHARDS}, "
                    f"got k={self.k}, n={self.n}"
                )
        elif self.n is not None:
            raise ValueError(f"scheme {self.scheme.value} does not take a shard count n")

    @classmethod
    def unsharded(cls, k: int, lam: float) -> "ArrivalModel":
        """Whole payload on one relay path, served at the per-shard rate lam/k."""
        return cls(Scheme.UNSHARDED, k, lam)

    @classmethod
    def uncoded(cls, k: int, lam: float) -> "ArrivalModel":
        """k distinct shards on k paths; decode waits for the slowest shard."""
        return cls(Scheme.UNCODED, k, lam)

    @classmethod
    def fixed_rate(cls, k: int, n: int, lam: float) -> "ArrivalModel":
        """n coded shards, any k of which decode the payload."""
        return cls(Scheme.FIXED_RATE, k, lam, n=n)

    @classmethod
    def rateless(cls, k: int, lam: float) -> "ArrivalModel":
        """Stream of coded shards where every arrival is useful until decode."""
        return cls(Scheme.RATELESS, k, lam)

    @property
    def is_sharded(self) -> bool:
        """True when deliveries arrive shard-by-shard rather than as one blob."""
        return self.scheme is not Scheme.UNSHARDED


@dataclass(frozen=True)
class TurboModel:
    """A base pipeline plus a rateless fast lane at rate lambda2.

    The fast lane streams coded shards that combine with whatever the base
    lane has already delivered, so the decode completes as soon as the two
    lanes jointly hold k useful units. ``lambda2 == 0`` recovers the base
    model exactly.
    """

    base: ArrivalModel
    lambda2: float = 0.0

    def __post_init__(self) -> None:
        if not isinstance(self.base, ArrivalModel):
            raise ValueError(f"base must be an ArrivalModel, got {self.base!r}")
        l2 = self.lambda2
        if not (isinstance(l2, (int, float)) and math.isfinite(l2) and l2 >= 0):
            raise ValueError(f"fast-lane rate must be finite and >= 0, got {l2!r}")

    @property
    def k(self) -> int:
        return self.base.k

    @property
    def total_rate(self) -> float:
        return self.base.lam + self.lambda2
