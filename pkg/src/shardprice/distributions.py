"""Closed-form decoding-time distributions for the four delivery regimes.

All regimes share one scaling: the CDF at time tau depends on the rate only
through ``x = lam * tau``. With ``k`` units required:

* unsharded:   F(tau) = 1 - exp(-x / k), a single exponential clock,
* uncoded:     F(tau) = (1 - exp(-x / k))**k, slowest of k parallel shards,
* rateless:    F(tau) = P(Poisson(x) >= k), the k-th arrival of the stream,
* fixed-rate:  F(tau) = P(Binomial(n, 1 - exp(-x / n)) >= k), k-th distinct
  arrival among n coded shards.

The counting views (how many useful shards have landed by tau) are the
Binomial and Poisson laws above; they drive both the two-lane convolution in
:mod:`shardprice.turbo` and the deadline utilities in
:mod:`shardprice.pricing`.

Survival sums are evaluated in log space and branch on which side of the
threshold is small, so values near 0 and near 1 keep full relative accuracy
instead of dying by cancellation in ``1 - sum``.
"""

from __future__ import annotations

import math
from typing import Callable, Union

import numpy as np
from scipy.special import gammaln

from .models import ArrivalModel, Scheme

__all__ = [
    "cdf_unsharded",
    "cdf_uncoded",
    "cdf_rateless",
    "cdf_fixed_rate",
    "model_cdf",
    "model_mean",
    "counting_pmf",
    "counting_pmf_table",
    "quantile",
    "invert_cdf",
]

ArrayLike = Union[float, np.ndarray]

# Extra log-space terms summed past the threshold when the upper tail is
# accumulated directly; 96 + 8*sqrt(k) covers > 13 standard deviations of the
# counting law, so the truncated remainder is below double-precision noise.
_TAIL_PAD = 96

# Cap on the (points, terms) work matrices so huge grids stay in cache.
_CHUNK = 16384


def _validated_x(tau: ArrayLike, lam: float) -> np.ndarray:
    if not (isinstance(lam, (int, float)) and math.isfinite(lam) and lam > 0):
        raise ValueError(f"rate must be finite and > 0, got {lam!r}")
    t = np.asarray(tau, dtype=float)
    if np.any(np.isnan(t)) or np.any(t < 0):
        raise ValueError("tau must be >= 0")
    return t * lam


def _shaped(flat: np.ndarray, like: ArrayLike) -> ArrayLike:
    arr = np.asarray(like)
    if arr.ndim == 0:
        return float(flat[0])
    return flat.reshape(arr.shape)


def _chunked(fn: Callable[[np.ndarray], np.ndarray], x: np.ndarray) -> np.ndarray:
    flat = np.atleast_1d(x).ravel()
    if flat.size <= _CHUNK:
        return fn(flat)
    parts = [fn(flat[i : i + _CHUNK]) for i in range(0, flat.size, _CHUNK)]
    return np.concatenate(parts)


def _tail_terms(k: int) -> int:
    return _TAIL_PAD + 8 * (math.isqrt(k) + 1)


def _poisson_tail(k: int, x: np.ndarray) -> np.ndarray:
    """P(Poisson(x) >= k) for a 1-d array of means x >= 0."""
    out = np.zeros_like(x)
    pos = x > 0
    if not pos.any():
        return out
    xp = x[pos]
    res = np.empty_like(xp)
    lo = xp >= k  # CDF side is the small one: sum i < k and subtract
    if lo.any():
        xv = xp[lo][:, None]
        i = np.arange(k, dtype=float)[None, :]
        terms = np.exp(i * np.log(xv) - xv - gammaln(i + 1.0))
        res[lo] = 1.0 - terms.sum(axis=1)
    hi = ~lo  # tail side is the small one: sum it directly
    if hi.any():
        m = k + _tail_terms(k)
        xv = xp[hi][:, None]
        i = np.arange(k, m, dtype=float)[None, :]
        terms = np.exp(i * np.log(xv) - xv - gammaln(i + 1.0))
        res[hi] = terms.sum(axis=1)
    out[pos] = np.clip(res, 0.0, 1.0)
    return out


def _log_choose(n: int, j: np.ndarray) -> np.ndarray:
    return gammaln(n + 1.0) - gammaln(j + 1.0) - gammaln(n - j + 1.0)


def _binom_tail(k: int, n: int, x: np.ndarray) -> np.ndarray:
    """P(Binomial(n, 1 - exp(-x/n)) >= k) for a 1-d array x >= 0.

    log(1 - p) is taken as -x/n exactly, which keeps the n == k case
    bit-consistent with the uncoded closed form.
    """
    out = np.zeros_like(x)
    pos = x > 0
    if not pos.any():
        return out
    xp = x[pos]
    logp = np.log(-np.expm1(-xp / n))
    res = np.empty_like(xp)
    lo = n * (-np.expm1(-xp / n)) >= k
    if lo.any():
        j = np.arange(k, dtype=float)
        lch = _log_choose(n, j)
        xv = xp[lo][:, None]
        lpv = logp[lo][:, None]
        terms = np.exp(lch[None, :] + j[None, :] * lpv - (n - j)[None, :] * xv / n)
        res[lo] = 1.0 - terms.sum(axis=1)
    hi = ~lo
    if hi.any():
        m = min(n + 1, k + _tail_terms(k))
        j = np.arange(k, m, dtype=float)
        lch = _log_choose(n, j)
        xv = xp[hi][:, None]
        lpv = logp[hi][:, None]
        terms = np.exp(lch[None, :] + j[None, :] * lpv - (n - j)[None, :] * xv / n)
        res[hi] = terms.sum(axis=1)
    out[pos] = np.clip(res, 0.0, 1.0)
    return out


def cdf_unsharded(tau: ArrayLike, k: int, lam: float) -> ArrayLike:
    """Decode-time CDF when the whole payload rides one path at rate lam/k."""
    _check_k(k)
    x = _validated_x(tau, lam)
    flat = -np.expm1(-np.atleast_1d(x).ravel() / k)
    return _shaped(flat, tau)


def cdf_uncoded(tau: ArrayLike, k: int, lam: float) -> ArrayLike:
    """Decode-time CDF for k uncoded shards: all k clocks must have fired."""
    _check_k(k)
    x = _validated_x(tau, lam)

    def eval_chunk(xc: np.ndarray) -> np.ndarray:
        res = np.zeros_like(xc)
        pos = xc > 0
        if pos.any():
            logp = np.log(-np.expm1(-xc[pos] / k))
            res[pos] = np.exp(k * logp)
        return res

    return _shaped(_chunked(eval_chunk, x), tau)


def cdf_rateless(tau: ArrayLike, k: int, lam: float) -> ArrayLike:
    """Decode-time CDF for rateless coding: the k-th arrival of the stream."""
    _check_k(k)
    x = _validated_x(tau, lam)
    return _shaped(_chunked(lambda xc: _poisson_tail(k, xc), x), tau)


def cdf_fixed_rate(tau: ArrayLike, k: int, n: int, lam: float) -> ArrayLike:
    """Decode-time CDF for (n, k) fixed-rate coding: k distinct shards of n."""
    _check_k(k)
    if not (isinstance(n, int) and not isinstance(n, bool) and n >= k):
        raise ValueError(f"fixed-rate shard count must be an int >= k, got {n!r}")
    x = _validated_x(tau, lam)
    return _shaped(_chunked(lambda xc: _binom_tail(k, n, xc), x), tau)


def _check_k(k: int) -> None:
    if not (isinstance(k, int) and not isinstance(k, bool) and k >= 1):
        raise ValueError(f"unit count k must be an int >= 1, got {k!r}")


def model_cdf(model: ArrivalModel, tau: ArrayLike) -> ArrayLike:
    """Decode-time CDF of the given model, vectorized over tau."""
    if model.scheme is Scheme.UNSHARDED:
        return cdf_unsharded(tau, model.k, model.lam)
    if model.scheme is Scheme.UNCODED:
        return cdf_uncoded(tau, model.k, model.lam)
    if model.scheme is Scheme.RATELESS:
        return cdf_rateless(tau, model.k, model.lam)
    return cdf_fixed_rate(tau, model.k, model.n, model.lam)


def _harmonic(n: int) -> float:
    return sum(1.0 / i for i in range(1, n + 1))


def model_mean(model: ArrivalModel) -> float:
    """Mean decode time, from order-statistic identities for each regime."""
    k, lam = model.k, model.lam
    if model.scheme is Scheme.UNSHARDED:
        return k / lam
    if model.scheme is Scheme.UNCODED:
        return (k / lam) * _harmonic(k)
    if model.scheme is Scheme.RATELESS:
        return k / lam
    n = model.n
    return (n / lam) * (_harmonic(n) - _harmonic(n - k))


def counting_pmf_table(model: ArrivalModel, tau: ArrayLike, length: int) -> np.ndarray:
    """P(useful shards at tau == i) for i in [0, length), shape (len(tau), length).

    The counting law is Binomial(k, 1 - exp(-x/k)) for uncoded shards,
    Binomial(n, 1 - exp(-x/n)) for fixed-rate coding, and Poisson(x) for the
    rateless stream, with x = lam * tau.
    """
    if not model.is_sharded:
        raise ValueError("the unsharded regime has no per-shard counting law")
    if not (isinstance(length, int) and length >= 1):
        raise ValueError(f"length must be an int >= 1, got {length!r}")
    x = np.atleast_1d(_validated_x(tau, model.lam)).ravel()
    table = np.zeros((x.size, length))
    table[x == 0, 0] = 1.0
    pos = x > 0
    if pos.any():
        i = np.arange(length, dtype=float)[None, :]
        xv = x[pos][:, None]
        if model.scheme is Scheme.RATELESS:
            block = np.exp(i * np.log(xv) - xv - gammaln(i + 1.0))
        else:
            trials = model.k if model.scheme is Scheme.UNCODED else model.n
            logp = np.log(-np.expm1(-xv / trials))
            lch = _log_choose(trials, np.arange(length, dtype=float))
            block = np.exp(lch[None, :] + i * logp - (trials - i) * xv / trials)
            block[:, trials + 1 :] = 0.0  # counts above the shard total
        table[pos, :] = np.clip(block, 0.0, 1.0)
    return table


def counting_pmf(model: ArrivalModel, tau: ArrayLike, i: int) -> ArrayLike:
    """P(exactly i useful shards have landed by tau) under the counting law."""
    if not (isinstance(i, int) and not isinstance(i, bool) and i >= 0):
        raise ValueError(f"shard count i must be an int >= 0, got {i!r}")
    if model.scheme in (Scheme.UNCODED, Scheme.FIXED_RATE):
        trials = model.k if model.scheme is Scheme.UNCODED else model.n
        if i > trials:
            x = np.asarray(tau)
            return 0.0 if x.ndim == 0 else np.zeros(x.shape)
    table = counting_pmf_table(model, tau, i + 1)
    return _shaped(table[:, i].copy(), tau)


def invert_cdf(
    cdf: Callable[[float], float],
    q: float,
    bracket_hint: float = 1.0,
    tol: float = 1e-10,
    max_iter: int = 500,
) -> float:
    """Solve cdf(t) == q for t >= 0 by bracketed bisection.

    ``cdf`` must be nondecreasing with cdf(0) <= q. The bracket grows
    geometrically from ``bracket_hint`` until it straddles q, then bisection
    runs until |cdf(t) - q| <= tol.
    """
    if not (0.0 < q < 1.0):
        raise ValueError(f"quantile level must lie in (0, 1), got {q!r}")
    if not (math.isfinite(bracket_hint) and bracket_hint > 0):
        raise ValueError(f"bracket_hint must be finite and > 0, got {bracket_hint!r}")
    hi = bracket_hint
    for _ in range(200):
        if float(cdf(hi)) >= q:
            break
        hi *= 2.0
    else:
        raise RuntimeError("failed to bracket the quantile; cdf may not reach q")
    lo = 0.0
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        f = float(cdf(mid))
        if abs(f - q) <= tol:
            return mid
        if f < q:
            lo = mid
        else:
            hi = mid
    raise RuntimeError(f"bisection stalled before reaching |cdf(t) - q| <= {tol}")


def quantile(model: ArrivalModel, q: float, tol: float = 1e-10) -> float:
    """Decode-time quantile F^{-1}(q) for the given model."""
    hint = 2.0 * model_mean(model)
    return invert_cdf(lambda t: model_cdf(model, t), q, bracket_hint=hint, tol=tol)
