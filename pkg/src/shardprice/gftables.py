"""Log/antilog tables for GF(2^m) under fixed reduction polynomials.

Multiplication in GF(2^m) reduces to integer addition through discrete logs
over a primitive element g: a * b = exp[log a + log b]. The reduction
polynomials are pinned (0x11B for GF(2^8), 0x1002D for GF(2^16)) so encoded
artifacts stay portable; the generator is the smallest primitive element of
each field, found by search and certified by the exp table visiting all q - 1
nonzero elements. The exp table is doubled in length so a log-sum never needs
a modulo.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["FieldTables", "field_tables", "gf_multiply", "REDUCTION_POLY"]

REDUCTION_POLY = {1: 0x3, 8: 0x11B, 16: 0x1002D}


@dataclass(frozen=True)
class FieldTables:
    """Discrete-log tables for one field: exp has length 2 * (q - 1)."""

    bits: int
    generator: int
    log: np.ndarray
    exp: np.ndarray

    @property
    def order(self) -> int:
        return (1 << self.bits) - 1


def _multiply_slow(a: int, b: int, poly: int, bits: int) -> int:
    """Carry-less multiply with reduction; reference path for table builds."""
    acc = 0
    while b:
        if b & 1:
            acc ^= a
        b >>= 1
        a <<= 1
        if a >> bits:
            a ^= poly
    return acc


def _try_generator(gen: int, poly: int, bits: int) -> FieldTables | None:
    order = (1 << bits) - 1
    exp = np.zeros(2 * order, dtype=np.uint32)
    log = np.zeros(1 << bits, dtype=np.uint32)
    seen = bytearray(1 << bits)
    value = 1
    for i in range(order):
        if seen[value]:
            return None  # cycle shorter than q - 1: not primitive
        seen[value] = 1
        exp[i] = value
        log[value] = i
        value = _multiply_slow(value, gen, poly, bits)
    if value != 1:
        return None
    exp[order:] = exp[:order]
    return FieldTables(bits=bits, generator=gen, log=log, exp=exp)


def _build(bits: int) -> FieldTables:
    if bits not in REDUCTION_POLY:
        raise ValueError(f"unsupported field width: GF(2^{bits})")
    poly = REDUCTION_POLY[bits]
    if bits == 1:
        return FieldTables(
            bits=1,
            generator=1,
            log=np.array([0, 0], dtype=np.uint32),
            exp=np.array([1, 1], dtype=np.uint32),
        )
    for gen in range(2, 1 << bits):
        tables = _try_generator(gen, poly, bits)
        if tables is not None:
            return tables
    raise RuntimeError(f"no primitive element found for GF(2^{bits}); bad polynomial?")


_CACHE: dict[int, FieldTables] = {}


def field_tables(bits: int) -> FieldTables:
    """Tables for GF(2^bits), built once per process and cached."""
    if bits not in _CACHE:
        _CACHE[bits] = _build(bits)
    return _CACHE[bits]


def gf_multiply(a: int, b: int, bits: int) -> int:
    """Scalar field product, via the reference carry-less multiply."""
    q = 1 << bits
    if not (0 <= a < q and 0 <= b < q):
        raise ValueError(f"operands must lie in [0, 2^{bits})")
    return _multiply_slow(a, b, REDUCTION_POLY[bits], bits)
