"""Backend dispatch for the finite-field rank kernel.

The compiled Cython kernel is preferred when its extension module imported
cleanly; the numpy implementation is always available. Both produce identical
arrays for identical inputs, so selection is a speed decision only. The
environment variable ``SHARDPRICE_BACKEND`` (``cython`` or ``python``)
overrides the default, and every entry point also accepts an explicit
``backend=`` argument.
"""

from __future__ import annotations

import os

import numpy as np

from . import _rankkernel_py
from .gftables import field_tables

try:
    from . import _rankkernel
except ImportError:  # extension not built; numpy path serves everything
    _rankkernel = None

__all__ = ["available_backends", "default_backend", "innovation_experiment"]

_ENV_VAR = "SHARDPRICE_BACKEND"

_FIELD_BITS = {2: 1, 2**8: 8, 2**16: 16}


def available_backends() -> tuple[str, ...]:
    """Backends importable in this process, fastest first."""
    if _rankkernel is not None:
        return ("cython", "python")
    return ("python",)


def default_backend() -> str:
    """Backend used when none is requested explicitly."""
    forced = os.environ.get(_ENV_VAR, "").strip().lower()
    if forced:
        if forced not in ("cython", "python"):
            raise ValueError(f"{_ENV_VAR} must be 'cython' or 'python', got {forced!r}")
        if forced == "cython" and _rankkernel is None:
            raise RuntimeError(f"{_ENV_VAR}=cython but the compiled kernel is not built")
        return forced
    return available_backends()[0]


def innovation_experiment(
    k: int,
    field_size: int,
    trials: int,
    seed: int,
    mix_units: bool = False,
    backend: str = "auto",
) -> tuple[np.ndarray, np.ndarray]:
    """Per-trial (non-innovative, total) reception counts until rank k.

    Each trial feeds uniformly random coefficient vectors over the field of
    ``field_size`` elements (optionally interleaved with unit vectors) into
    an incremental row reduction and stops once the basis reaches rank k.
    """
    if field_size not in _FIELD_BITS:
        raise ValueError(f"field size must be one of {sorted(_FIELD_BITS)}, got {field_size!r}")
    if not (isinstance(trials, int) and trials >= 1):
        raise ValueError(f"trials must be an int >= 1, got {trials!r}")
    if not (isinstance(k, int) and k >= 1):
        raise ValueError(f"k must be an int >= 1, got {k!r}")
    bits = _FIELD_BITS[field_size]
    tables = field_tables(bits)
    chosen = default_backend() if backend == "auto" else backend
    if chosen == "cython":
        if _rankkernel is None:
            raise RuntimeError("compiled kernel requested but not built")
        return _rankkernel.innovation_experiment(
            k, bits, trials, seed & 0xFFFFFFFFFFFFFFFF, mix_units, tables.log, tables.exp
        )
    if chosen == "python":
        return _rankkernel_py.innovation_experiment(
            k, bits, trials, seed, mix_units, tables.log, tables.exp
        )
    raise ValueError(f"unknown backend {chosen!r}; expected 'auto', 'cython', or 'python'")
