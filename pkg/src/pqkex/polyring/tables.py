"""Constants for arithmetic in Z_q[x]/(x^256 + 1).

Everything here is derived from the primitive 256-th root of unity 17 at
import time; nothing is pasted in as magic numbers except the Barrett
multiplier, which is checked against its closed form.

Montgomery radix is R = 2^16.  Twiddles are stored as pairs
``(lo, hi) = (z * q^-1 mod+- 2^16, z)`` where ``z = zeta * R mod+- q``, so a
butterfly needs one low and two high multiplications and its output is in the
ordinary (non-Montgomery) domain.

Vector storage layout
---------------------
The vector backend keeps a polynomial as 8 rows ("registers") of 32 int16
lanes.  The first three NTT layers pair whole rows.  Before each of the last
four layers, rows (2p, 2p+1) are passed through a block transpose
``shuffle(n)`` with n = 16, 8, 4, 2, after which butterfly partners sit in the
same lane of the two rows.  A final ``shuffle(1)`` leaves row 2p holding the
even coefficients and row 2p+1 the odd coefficients of residues 32p..32p+31,
so pointwise multiplication is purely lanewise.  For p in 0..3::

    row 2p   = [64p + 0, 64p + 2, ..., 64p + 62]
    row 2p+1 = [64p + 1, 64p + 3, ..., 64p + 63]

``VECTOR_ORDER[pos]`` is the scalar (bit-reversed residue) index stored at
flat position ``pos``.  The inverse NTT walks the same network backwards.

Lazy reduction in the inverse NTT
---------------------------------
Sums in the Gentleman-Sande butterfly grow; differences are Montgomery
multiplied and stay below q.  ``INTT_REDUCE`` lists, per layer, the
coefficient indices that are Barrett-reduced before that layer so no sum can
leave int16.  It is computed by worst-case interval propagation from the
input bound ``NTT_OUTPUT_BOUND`` (16541, so both raw ``ntt`` output and
basemul output, which is below q, can be fed directly) and is used verbatim
by both backends, which keeps them bit-identical.  Result for reference
(layer: count, first indices)::

    len   2: 128  [0, 1, 4, 5, 8, 9, 12, 13, ...]
    len   4:  64  [0, 1, 8, 9, 16, 17, 24, 25, ...]
    len   8:  32  [0, 1, 16, 17, 32, 33, 48, 49, ...]
    len  16:  16  [0, 1, 32, 33, 64, 65, 96, 97, ...]
    len  32:  24  [0, 1, 2, 3, 32, 33, 64, 65, ...]
    len  64:  16  [2, 3, 4, 5, 6, 7, 66, 67, ...]
    len 128:  16  [4, 5, 6, 7, 8, 9, 10, 11, ...]

Peak worst-case magnitude before the final scaling is 29961 < 2^15.
"""
from __future__ import annotations

import numpy as np

from ..params import N, Q

ROOT = 17
R = 1 << 16
QINV = -3327  # q^-1 mod+- 2^16
BARRETT_V = 20159
BARRETT_SHIFT = 10  # applied after the high-half multiply
INT16_MAX = (1 << 15) - 1

assert (Q * QINV) % R == 1
assert BARRETT_V == ((1 << 26) + Q // 2) // Q  # round(2^(floor(log q) - 1) * 2^16 / q)


def centered(x: int, m: int) -> int:
    """x mod+- m, in (-m/2, m/2]."""
    r = x % m
    return r - m if r > m // 2 else r


def bitrev7(i: int) -> int:
    return int(f"{i:07b}"[::-1], 2)


ZETAS = [pow(ROOT, bitrev7(i), Q) for i in range(128)]
GAMMAS = [pow(ROOT, 2 * bitrev7(i) + 1, Q) for i in range(128)]


def twiddle_pair(zeta: int) -> tuple[int, int]:
    hi = centered(zeta * R, Q)
    lo = centered(hi * QINV, R)
    return lo, hi


# Forward table, indexed by the FIPS-203 block counter 1..127 (entry 0 unused).
NTT_TWIDDLES = [twiddle_pair(z) for z in ZETAS]
# Inverse table in consumption order (counter runs 127 down to 1).
INTT_TWIDDLES = [twiddle_pair(ZETAS[k]) for k in range(127, 0, -1)]
# Residue constants for basemul, Montgomery form (gamma * R).
BASEMUL_GAMMAS = [centered(g * R, Q) for g in GAMMAS]

# basemul finishes with a Montgomery multiply by R^2 so its output carries no
# factor; the INTT then only has to remove 1/128, and the same constant makes
# intt an exact two-sided inverse of ntt.
TOMONT = centered(R * R, Q)  # montgomery(a * TOMONT) = a * R
FROMMONT = 1  # montgomery(a * 1) = a * R^-1
INTT_SCALE = centered(pow(128, -1, Q) * R, Q)
INTT_SCALE_PAIR = (centered(INTT_SCALE * QINV, R), INTT_SCALE)

NTT_LENS = (128, 64, 32, 16, 8, 4, 2)
INTT_LENS = NTT_LENS[::-1]


def ntt_block_index(i: int, length: int) -> int:
    return 128 // length + i // (2 * length)


def intt_block_index(i: int, length: int) -> int:
    return 256 // length - 1 - i // (2 * length)


def _lazy_schedule(input_bound: int) -> tuple[list[list[int]], int]:
    bound = [input_bound] * N
    schedule = []
    for length in INTT_LENS:
        reduce_here: set[int] = set()
        for start in range(0, N, 2 * length):
            for j in range(start, start + length):
                if bound[j] + bound[j + length] > INT16_MAX:
                    big = j if bound[j] >= bound[j + length] else j + length
                    reduce_here.add(big)
                    bound[big] = Q
                    if bound[j] + bound[j + length] > INT16_MAX:
                        reduce_here.update((j, j + length))
                        bound[j] = bound[j + length] = Q
        schedule.append(sorted(reduce_here))
        for start in range(0, N, 2 * length):
            for j in range(start, start + length):
                bound[j], bound[j + length] = bound[j] + bound[j + length], Q
    return schedule, max(bound)


def _ntt_output_bound(input_bound: int) -> int:
    # |mulmont(x, z)| <= |x| * max|z| / 2^16 + q/2; each layer adds that to a lane
    zmax = max(abs(hi) for _, hi in NTT_TWIDDLES[1:])
    b = input_bound
    for _ in NTT_LENS:
        b = b + (b * zmax >> 16) + 1 + Q // 2
    return b


NTT_OUTPUT_BOUND = _ntt_output_bound(Q)
assert NTT_OUTPUT_BOUND <= INT16_MAX
MONT_LIMIT = Q << 15  # montgomery_reduce domain is [-MONT_LIMIT, MONT_LIMIT)
# basemul with one operand |c| <= q and the other an NTT output stays in domain
assert NTT_OUTPUT_BOUND * Q < MONT_LIMIT

INTT_INPUT_BOUND = NTT_OUTPUT_BOUND  # covers raw ntt output and basemul output (< q)
INTT_REDUCE, INTT_PEAK = _lazy_schedule(INTT_INPUT_BOUND)
assert INTT_PEAK <= INT16_MAX


# -- vector layout ---------------------------------------------------------

ROWS, LANES = 8, 32
SHUFFLE_BEFORE = (0, 0, 0, 16, 8, 4, 2)  # per forward layer; 0 = no shuffle
ROW_DISTANCE = {128: 4, 64: 2, 32: 1}


def shuffle_rows(a: np.ndarray, b: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    """2x2 block transpose of two rows with block size n (an involution)."""
    a2 = a.reshape(-1, n)
    b2 = b.reshape(-1, n)
    out_a = np.empty_like(a2)
    out_b = np.empty_like(b2)
    out_a[0::2], out_a[1::2] = a2[0::2], b2[0::2]
    out_b[0::2], out_b[1::2] = a2[1::2], b2[1::2]
    return out_a.reshape(-1), out_b.reshape(-1)


def _row_pairs(length: int) -> list[tuple[int, int]]:
    if length in ROW_DISTANCE:
        d = ROW_DISTANCE[length]
        return [(r, r + d) for r in range(ROWS) if (r // d) % 2 == 0]
    return [(2 * p, 2 * p + 1) for p in range(ROWS // 2)]


def _build_vector_tables():
    layout = np.arange(N).reshape(ROWS, LANES)
    fwd_pairs = np.zeros((7, 4, 2), dtype=np.int64)
    fwd_lo = np.zeros((7, 4, LANES), dtype=np.int16)
    fwd_hi = np.zeros((7, 4, LANES), dtype=np.int16)
    for layer, length in enumerate(NTT_LENS):
        n = SHUFFLE_BEFORE[layer]
        if n:
            for p in range(ROWS // 2):
                layout[2 * p], layout[2 * p + 1] = shuffle_rows(layout[2 * p], layout[2 * p + 1], n)
        for slot, (ra, rb) in enumerate(_row_pairs(length)):
            fwd_pairs[layer, slot] = (ra, rb)
            for lane in range(LANES):
                top = int(layout[ra, lane])
                assert layout[rb, lane] == top + length
                lo, hi = NTT_TWIDDLES[ntt_block_index(top, length)]
                fwd_lo[layer, slot, lane] = lo
                fwd_hi[layer, slot, lane] = hi
    for p in range(ROWS // 2):
        layout[2 * p], layout[2 * p + 1] = shuffle_rows(layout[2 * p], layout[2 * p + 1], 1)
    order = layout.reshape(-1).copy()

    gamma = np.zeros((4, LANES), dtype=np.int16)
    for p in range(4):
        for lane in range(LANES):
            even = int(layout[2 * p, lane])
            assert even % 2 == 0 and layout[2 * p + 1, lane] == even + 1
            gamma[p, lane] = BASEMUL_GAMMAS[even // 2]

    # Inverse: same network in reverse, starting from the storage layout.
    inv_pairs = np.zeros((7, 4, 2), dtype=np.int64)
    inv_lo = np.zeros((7, 4, LANES), dtype=np.int16)
    inv_hi = np.zeros((7, 4, LANES), dtype=np.int16)
    inv_mask = np.zeros((7, ROWS, LANES), dtype=np.bool_)
    inv_shuffle = (1, 2, 4, 8, 16, 0, 0)  # applied before each inverse layer
    for p in range(ROWS // 2):
        layout[2 * p], layout[2 * p + 1] = shuffle_rows(layout[2 * p], layout[2 * p + 1], 1)
    for layer, length in enumerate(INTT_LENS):
        if layer > 0 and inv_shuffle[layer]:
            for p in range(ROWS // 2):
                layout[2 * p], layout[2 * p + 1] = shuffle_rows(
                    layout[2 * p], layout[2 * p + 1], inv_shuffle[layer]
                )
        reduce_set = set(INTT_REDUCE[layer])
        inv_mask[layer] = np.isin(layout, list(reduce_set)) if reduce_set else False
        for slot, (ra, rb) in enumerate(_row_pairs(length)):
            inv_pairs[layer, slot] = (ra, rb)
            for lane in range(LANES):
                top = int(layout[ra, lane])
                assert layout[rb, lane] == top + length
                k = intt_block_index(top, length)
                lo, hi = twiddle_pair(ZETAS[k])
                inv_lo[layer, slot, lane] = lo
                inv_hi[layer, slot, lane] = hi
    assert np.array_equal(layout.reshape(-1), np.arange(N))
    return {
        "order": order,
        "fwd_pairs": fwd_pairs,
        "fwd_lo": fwd_lo,
        "fwd_hi": fwd_hi,
        "fwd_shuffle": np.array(SHUFFLE_BEFORE, dtype=np.int64),
        "gamma": gamma,
        "inv_pairs": inv_pairs,
        "inv_lo": inv_lo,
        "inv_hi": inv_hi,
        "inv_mask": inv_mask,
        "inv_shuffle": np.array(inv_shuffle, dtype=np.int64),
    }


VECTOR_TABLES = _build_vector_tables()
VECTOR_ORDER = VECTOR_TABLES["order"]
VECTOR_ORDER_INV = np.argsort(VECTOR_ORDER)
