# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled finite-field rank-update kernel.

Trial-at-a-time Gauss elimination with per-trial splitmix64 word streams.
The word-consumption order (shuffle words, coin word, vector words) matches
shardprice._rankkernel_py exactly, so both backends return identical arrays.
"""

import numpy as np

from libc.stdint cimport int64_t, uint32_t, uint64_t

cdef uint64_t GOLDEN = 0x9E3779B97F4A7C15ULL


cdef inline uint64_t mix64(uint64_t z) nogil:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
    return z ^ (z >> 31)


cdef inline uint64_t next_word(uint64_t* state) nogil:
    state[0] += GOLDEN
    return mix64(state[0])


def innovation_experiment(
    int k,
    int field_bits,
    long long trials,
    unsigned long long seed,
    bint mix_units,
    uint32_t[::1] log_table,
    uint32_t[::1] exp_table,
):
    """Count non-innovative receptions per trial until rank k is reached.

    Returns (noninnovative, receptions), both int64 arrays of length trials.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if field_bits not in (1, 8, 16):
        raise ValueError("field_bits must be one of 1, 8, 16")
    if trials < 1:
        raise ValueError("trials must be >= 1")

    noninnov_arr = np.zeros(trials, dtype=np.int64)
    recept_arr = np.zeros(trials, dtype=np.int64)
    cdef int64_t[::1] noninnov = noninnov_arr
    cdef int64_t[::1] receptions = recept_arr

    cdef int words = (k * field_bits + 63) // 64
    cdef uint64_t order = (<uint64_t> len(exp_table)) // 2

    pivot_arr = np.zeros(k, dtype=np.uint8)
    cdef unsigned char[::1] pivot = pivot_arr
    order_arr = np.zeros(k, dtype=np.int64)
    cdef int64_t[::1] unit_order = order_arr

    # GF(2) storage: packed bitset rows.
    basis_w_arr = np.zeros(k * words, dtype=np.uint64)
    vec_w_arr = np.zeros(words, dtype=np.uint64)
    cdef uint64_t[::1] basis_w = basis_w_arr
    cdef uint64_t[::1] vec_w = vec_w_arr

    # Table-field storage: one coefficient per entry.
    basis_arr = np.zeros(k * k, dtype=np.uint32)
    vec_arr = np.zeros(k, dtype=np.uint32)
    cdef uint32_t[::1] basis = basis_arr
    cdef uint32_t[::1] vec = vec_arr

    cdef bint packed = field_bits == 1
    cdef uint64_t coeff_mask = (<uint64_t> 1 << field_bits) - 1
    cdef uint64_t last_mask
    if k & 63:
        last_mask = (<uint64_t> 1 << (k & 63)) - 1
    else:
        last_mask = <uint64_t> 0xFFFFFFFFFFFFFFFFULL

    cdef int64_t t
    cdef uint64_t state, w
    cdef int rank, c, j, i, wi, per, idx, unit_next, sel
    cdef uint32_t a, la, inv, li, b
    cdef bint installed, use_unit
    cdef int64_t nn, rc

    with nogil:
        for t in range(trials):
            state = mix64(seed + (<uint64_t> (t + 1)) * GOLDEN)
            for c in range(k):
                pivot[c] = 0
            rank = 0
            nn = 0
            rc = 0
            unit_next = 0
            if mix_units:
                for c in range(k):
                    unit_order[c] = c
                for i in range(k - 1, 0, -1):
                    w = next_word(&state)
                    j = <int> (w % (<uint64_t> (i + 1)))
                    sel = <int> unit_order[j]
                    unit_order[j] = unit_order[i]
                    unit_order[i] = sel

            while rank < k:
                rc += 1
                use_unit = False
                if mix_units:
                    w = next_word(&state)
                    use_unit = (w & 1) == 1 and unit_next < k

                if packed:
                    if use_unit:
                        for wi in range(words):
                            vec_w[wi] = 0
                        sel = <int> unit_order[unit_next]
                        unit_next += 1
                        vec_w[sel >> 6] |= <uint64_t> 1 << (sel & 63)
                    else:
                        for wi in range(words):
                            vec_w[wi] = next_word(&state)
                        vec_w[words - 1] &= last_mask
                    installed = False
                    for c in range(k):
                        if not (vec_w[c >> 6] >> (c & 63)) & 1:
                            continue
                        if pivot[c]:
                            for wi in range(words):
                                vec_w[wi] ^= basis_w[c * words + wi]
                        else:
                            for wi in range(words):
                                basis_w[c * words + wi] = vec_w[wi]
                            pivot[c] = 1
                            rank += 1
                            installed = True
                            break
                else:
                    if use_unit:
                        for c in range(k):
                            vec[c] = 0
                        sel = <int> unit_order[unit_next]
                        unit_next += 1
                        vec[sel] = 1
                    else:
                        per = 64 // field_bits
                        idx = 0
                        while idx < k:
                            w = next_word(&state)
                            for i in range(per):
                                if idx >= k:
                                    break
                                vec[idx] = <uint32_t> ((w >> (field_bits * i)) & coeff_mask)
                                idx += 1
                    installed = False
                    for c in range(k):
                        a = vec[c]
                        if a == 0:
                            continue
                        if pivot[c]:
                            la = log_table[a]
                            for j in range(c, k):
                                b = basis[c * k + j]
                                if b:
                                    vec[j] ^= exp_table[la + log_table[b]]
                        else:
                            inv = exp_table[order - log_table[a]]
                            li = log_table[inv]
                            for j in range(k):
                                b = vec[j]
                                if b:
                                    basis[c * k + j] = exp_table[li + log_table[b]]
                                else:
                                    basis[c * k + j] = 0
                            pivot[c] = 1
                            rank += 1
                            installed = True
                            break
                if not installed:
                    nn += 1

            noninnov[t] = nn
            receptions[t] = rc

    return noninnov_arr, recept_arr
