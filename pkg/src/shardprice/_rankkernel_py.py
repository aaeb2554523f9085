"""Numpy fallback for the finite-field rank-update kernel.

Runs the same experiment as the compiled kernel, bit for bit: every trial
owns a splitmix64 word stream derived from (seed, trial index), and the Gauss
elimination consumes words in the same order. The difference is execution
shape only, lockstep across trials here versus trial-at-a-time in C, so the
two backends must return identical arrays for identical inputs.

GF(2) vectors live in packed uint64 words; larger fields use log/antilog
tables. Trials are processed in chunks sized to keep the per-chunk basis
storage bounded.
"""

from __future__ import annotations

import numpy as np

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)

# Per-chunk budget for basis storage, in bytes.
_CHUNK_BYTES = 64 * 2**20
_MAX_CHUNK = 65536


def _mix64(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


def _draw(states: np.ndarray, idx: np.ndarray) -> np.ndarray:
    """Advance the streams at ``idx`` one step and return their next words."""
    s = states[idx] + _GOLDEN
    states[idx] = s
    return _mix64(s)


def _chunk_size(k: int, field_bits: int) -> int:
    if field_bits == 1:
        per_trial = k * ((k + 63) // 64) * 8 + 64
    else:
        per_trial = k * k * 4 + 64
    return int(np.clip(_CHUNK_BYTES // per_trial, 1, _MAX_CHUNK))


def innovation_experiment(
    k: int,
    field_bits: int,
    trials: int,
    seed: int,
    mix_units: bool,
    log_table: np.ndarray,
    exp_table: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    """Count non-innovative receptions per trial until rank k is reached.

    Returns (noninnovative, receptions), both int64 arrays of length trials.
    """
    noninnov = np.zeros(trials, dtype=np.int64)
    receptions = np.zeros(trials, dtype=np.int64)
    chunk = _chunk_size(k, field_bits)
    for start in range(0, trials, chunk):
        ids = np.arange(start, min(start + chunk, trials), dtype=np.uint64)
        nn, rc = _run_chunk(k, field_bits, ids, seed, mix_units, log_table, exp_table)
        noninnov[start : start + ids.size] = nn
        receptions[start : start + ids.size] = rc
    return noninnov, receptions


def _run_chunk(
    k: int,
    field_bits: int,
    trial_ids: np.ndarray,
    seed: int,
    mix_units: bool,
    log_table: np.ndarray,
    exp_table: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    count = trial_ids.size
    with np.errstate(over="ignore"):
        seed64 = np.uint64(seed & 0xFFFFFFFFFFFFFFFF)
        states = _mix64(seed64 + (trial_ids + np.uint64(1)) * _GOLDEN)

        noninnov = np.zeros(count, dtype=np.int64)
        receptions = np.zeros(count, dtype=np.int64)
        rank = np.zeros(count, dtype=np.int64)
        active = np.ones(count, dtype=bool)
        pivot = np.zeros((count, k), dtype=bool)

        packed = field_bits == 1
        words = (k * field_bits + 63) // 64
        if packed:
            last_mask = np.uint64((1 << (k & 63)) - 1 if k & 63 else 0xFFFFFFFFFFFFFFFF)
            basis_w = np.zeros((count, k, words), dtype=np.uint64)
            vec_w = np.zeros((count, words), dtype=np.uint64)
        else:
            order = np.uint64(len(exp_table) // 2)
            coeff_mask = np.uint64((1 << field_bits) - 1)
            basis = np.zeros((count, k, k), dtype=np.uint32)
            vec = np.zeros((count, k), dtype=np.uint32)

        if mix_units:
            unit_order = np.tile(np.arange(k, dtype=np.int64), (count, 1))
            rows = np.arange(count)
            for i in range(k - 1, 0, -1):
                j = (_draw(states, rows) % np.uint64(i + 1)).astype(np.int64)
                swapped = unit_order[rows, j]
                unit_order[rows, j] = unit_order[rows, i]
                unit_order[rows, i] = swapped
            unit_next = np.zeros(count, dtype=np.int64)

        while active.any():
            act = np.nonzero(active)[0]
            receptions[act] += 1

            if mix_units:
                coin = _draw(states, act) & np.uint64(1)
                use_unit = (coin == 1) & (unit_next[act] < k)
            else:
                use_unit = np.zeros(act.size, dtype=bool)
            rand_idx = act[~use_unit]
            unit_idx = act[use_unit]

            if packed:
                vec_w[act] = 0
                if rand_idx.size:
                    for w in range(words):
                        vec_w[rand_idx, w] = _draw(states, rand_idx)
                    vec_w[rand_idx, words - 1] &= last_mask
                if unit_idx.size:
                    sel = unit_order[unit_idx, unit_next[unit_idx]]
                    unit_next[unit_idx] += 1
                    wi = sel >> 6
                    bit = np.uint64(1) << (sel & 63).astype(np.uint64)
                    vec_w[unit_idx, wi] |= bit
            else:
                vec[act] = 0
                if rand_idx.size:
                    buf = np.empty((rand_idx.size, words), dtype=np.uint64)
                    for w in range(words):
                        buf[:, w] = _draw(states, rand_idx)
                    for c in range(k):
                        wi = (c * field_bits) // 64
                        sh = np.uint64((c * field_bits) % 64)
                        vec[rand_idx, c] = ((buf[:, wi] >> sh) & coeff_mask).astype(np.uint32)
                if unit_idx.size:
                    sel = unit_order[unit_idx, unit_next[unit_idx]]
                    unit_next[unit_idx] += 1
                    vec[unit_idx, sel] = 1

            pending = np.zeros(count, dtype=bool)
            pending[act] = True
            for c in range(k):
                if packed:
                    colbit = (vec_w[:, c >> 6] >> np.uint64(c & 63)) & np.uint64(1)
                    nz = pending & (colbit == 1)
                else:
                    nz = pending & (vec[:, c] != 0)
                if not nz.any():
                    continue
                reduce_idx = np.nonzero(nz & pivot[:, c])[0]
                if reduce_idx.size:
                    if packed:
                        vec_w[reduce_idx] ^= basis_w[reduce_idx, c]
                    else:
                        la = log_table[vec[reduce_idx, c]].astype(np.uint32)
                        brow = basis[reduce_idx, c]
                        prod = np.where(
                            brow != 0, exp_table[la[:, None] + log_table[brow]], 0
                        ).astype(np.uint32)
                        vec[reduce_idx] ^= prod
                install_idx = np.nonzero(nz & ~pivot[:, c])[0]
                if install_idx.size:
                    if packed:
                        basis_w[install_idx, c] = vec_w[install_idx]
                    else:
                        inv = exp_table[order - log_table[vec[install_idx, c]]]
                        li = log_table[inv].astype(np.uint32)
                        vrow = vec[install_idx]
                        basis[install_idx, c] = np.where(
                            vrow != 0, exp_table[li[:, None] + log_table[vrow]], 0
                        ).astype(np.uint32)
                    pivot[install_idx, c] = True
                    rank[install_idx] += 1
                    pending[install_idx] = False

            noninnov[pending] += 1
            finished = act[rank[act] >= k]
            active[finished] = False

    return noninnov, receptions
