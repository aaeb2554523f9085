"""Two-lane decode-time distributions: a base pipeline plus a rateless fast lane.

The fast lane streams coded shards at rate lambda2. For a sharded base the
two counting processes add, so the decode is late at tau only when the lane
counts S1 + S2 stay below k:

    F(tau) = 1 - sum_{j < k} P(S1 = j) * P(S2 <= k - 1 - j)

evaluated through the shared counting tables so both lanes use one source of
truth. For a rateless base the merged stream is again rateless at rate
lam + lambda2, and for an unsharded base the payload races the fast lane:
F = F1 + F2 - F1 * F2, written in the cancellation-free product-of-survivals
form.
"""

from __future__ import annotations

import numpy as np

from .distributions import (
    ArrayLike,
    _shaped,
    cdf_rateless,
    cdf_unsharded,
    counting_pmf_table,
    model_cdf,
)
from .models import ArrivalModel, Scheme, TurboModel

__all__ = ["cdf_turbo", "cdf_turbo_sharded", "cdf_turbo_unsharded"]


def _fast_lane_cdf_table(k: int, lambda2: float, tau: ArrayLike) -> np.ndarray:
    """P(S2 <= j) for j in [0, k), shape (len(tau), k)."""
    if lambda2 == 0:
        t = np.atleast_1d(np.asarray(tau, dtype=float))
        return np.ones((t.size, k))  # no fast lane: S2 == 0 surely
    fast = ArrivalModel.rateless(k, lambda2)
    return np.cumsum(counting_pmf_table(fast, tau, k), axis=1)


def cdf_turbo_sharded(tau: ArrayLike, model: TurboModel) -> ArrayLike:
    """Decode-time CDF when a sharded base lane is joined by the fast lane."""
    base = model.base
    if not base.is_sharded:
        raise ValueError("cdf_turbo_sharded requires a sharded base model")
    k = base.k
    if base.scheme is Scheme.RATELESS:
        # Two merged Poisson shard streams are one stream at the summed rate.
        return cdf_rateless(tau, k, base.lam + model.lambda2)
    base_pmf = counting_pmf_table(base, tau, k)
    fast_cdf = _fast_lane_cdf_table(k, model.lambda2, tau)
    late = (base_pmf * fast_cdf[:, ::-1]).sum(axis=1)
    return _shaped(np.clip(1.0 - late, 0.0, 1.0), tau)


def cdf_turbo_unsharded(tau: ArrayLike, model: TurboModel) -> ArrayLike:
    """Decode-time CDF when the whole-payload path races the fast lane."""
    base = model.base
    if base.scheme is not Scheme.UNSHARDED:
        raise ValueError("cdf_turbo_unsharded requires an unsharded base model")
    f1 = np.atleast_1d(cdf_unsharded(tau, base.k, base.lam))
    if model.lambda2 == 0:
        return _shaped(f1, tau)
    f2 = np.atleast_1d(cdf_rateless(tau, base.k, model.lambda2))
    return _shaped(f1 + f2 - f1 * f2, tau)


def cdf_turbo(tau: ArrayLike, model: TurboModel) -> ArrayLike:
    """Decode-time CDF of the two-lane model, dispatching on the base scheme."""
    if not isinstance(model, TurboModel):
        raise ValueError(f"expected a TurboModel, got {model!r}")
    if model.lambda2 == 0:
        return model_cdf(model.base, tau)
    if model.base.is_sharded:
        return cdf_turbo_sharded(tau, model)
    return cdf_turbo_unsharded(tau, model)
