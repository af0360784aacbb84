"""Reference polynomial arithmetic, one coefficient at a time.

Arrays in the NTT domain are kept in plain bit-reversed residue order:
entries (2i, 2i+1) hold the degree-1 residue modulo x^2 - gamma_i.

Computation happens on Python ints, which act as a wide shadow of the 16-bit
lanes: the code never wraps, so passing ``trace`` (a list) records the
largest magnitude seen per layer and lets tests prove nothing would have
overflowed a signed 16-bit lane.
"""
from __future__ import annotations

import numpy as np

from ..params import N, Q
from .tables import (
    BARRETT_SHIFT,
    BARRETT_V,
    BASEMUL_GAMMAS,
    INTT_LENS,
    INTT_REDUCE,
    INTT_SCALE_PAIR,
    INTT_TWIDDLES,
    MONT_LIMIT,
    NTT_LENS,
    NTT_TWIDDLES,
    QINV,
    TOMONT,
)

NAME = "scalar"


def barrett_reduce(a: int) -> int:
    t = (a * BARRETT_V) >> 16  # vpmulhw
    t >>= BARRETT_SHIFT  # vpsraw $10
    return a - t * Q


def montgomery_reduce(a: int) -> int:
    assert -MONT_LIMIT <= a < MONT_LIMIT, a
    t = (a * QINV) & 0xFFFF
    if t & 0x8000:
        t -= 0x10000
    return (a - t * Q) >> 16


def _mulmont(x: int, lo: int, hi: int) -> int:
    # hi(x*z) - hi(q * lo(x * z*qinv)); equals montgomery_reduce(x * hi)
    m = (x * lo) & 0xFFFF
    if m & 0x8000:
        m -= 0x10000
    return ((x * hi) >> 16) - ((m * Q) >> 16)


def ntt_one(f, trace=None) -> list[int]:
    a = [int(c) for c in f]
    k = 1
    for length in NTT_LENS:
        peak = 0
        for start in range(0, N, 2 * length):
            lo, hi = NTT_TWIDDLES[k]
            k += 1
            for j in range(start, start + length):
                x = a[j + length]
                m = (x * lo) & 0xFFFF
                if m & 0x8000:
                    m -= 0x10000
                t = ((x * hi) >> 16) - ((m * Q) >> 16)
                y = a[j]
                a[j + length] = y - t
                a[j] = y + t
                if trace is not None:
                    peak = max(peak, abs(t), abs(y - t), abs(y + t))
        if trace is not None:
            trace.append(peak)
    return a


def intt_one(fhat, trace=None) -> list[int]:
    a = [int(c) for c in fhat]
    idx = 0
    for layer, length in enumerate(INTT_LENS):
        for i in INTT_REDUCE[layer]:
            a[i] = barrett_reduce(a[i])
        peak = 0
        for start in range(0, N, 2 * length):
            lo, hi = INTT_TWIDDLES[idx]
            idx += 1
            for j in range(start, start + length):
                t = a[j]
                u = a[j + length]
                d = u - t
                a[j] = t + u
                m = (d * lo) & 0xFFFF
                if m & 0x8000:
                    m -= 0x10000
                a[j + length] = ((d * hi) >> 16) - ((m * Q) >> 16)
                if trace is not None:
                    peak = max(peak, abs(t + u), abs(d))
        if trace is not None:
            trace.append(peak)
    lo, hi = INTT_SCALE_PAIR
    return [_mulmont(x, lo, hi) for x in a]


def basemul_one(a, b) -> list[int]:
    out = [0] * N
    mr = montgomery_reduce
    for i in range(N // 2):
        a0, a1 = int(a[2 * i]), int(a[2 * i + 1])
        b0, b1 = int(b[2 * i]), int(b[2 * i + 1])
        r0 = mr(mr(a1 * b1) * BASEMUL_GAMMAS[i]) + mr(a0 * b0)
        r1 = mr(a0 * b1) + mr(a1 * b0)
        out[2 * i] = mr(r0 * TOMONT)
        out[2 * i + 1] = mr(r1 * TOMONT)
    return out


def _rows(x: np.ndarray) -> np.ndarray:
    return np.asarray(x).reshape(-1, N)


def _pack(rows: list[list[int]], shape) -> np.ndarray:
    return np.array(rows, dtype=np.int16).reshape(shape)


def ntt(f: np.ndarray) -> np.ndarray:
    return _pack([ntt_one(r.tolist()) for r in _rows(f)], np.shape(f))


def intt(fhat: np.ndarray) -> np.ndarray:
    return _pack([intt_one(r.tolist()) for r in _rows(fhat)], np.shape(fhat))


def basemul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    a, b = np.broadcast_arrays(a, b)
    return _pack([basemul_one(x.tolist(), y.tolist()) for x, y in zip(_rows(a), _rows(b))], a.shape)


def add(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    a, b = np.broadcast_arrays(a, b)
    return _pack([[x + y for x, y in zip(ra.tolist(), rb.tolist())] for ra, rb in zip(_rows(a), _rows(b))], a.shape)


def sub(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    a, b = np.broadcast_arrays(a, b)
    return _pack([[x - y for x, y in zip(ra.tolist(), rb.tolist())] for ra, rb in zip(_rows(a), _rows(b))], a.shape)


def reduce(a: np.ndarray) -> np.ndarray:
    return _pack([[barrett_reduce(x) for x in r.tolist()] for r in _rows(a)], np.shape(a))


def to_mont(a: np.ndarray) -> np.ndarray:
    return _pack([[montgomery_reduce(x * TOMONT) for x in r.tolist()] for r in _rows(a)], np.shape(a))


def from_mont(a: np.ndarray) -> np.ndarray:
    return _pack([[montgomery_reduce(x) for x in r.tolist()] for r in _rows(a)], np.shape(a))


def freeze(a: np.ndarray) -> np.ndarray:
    """Barrett then conditional subtract: representative in [0, q)."""
    out = []
    for r in _rows(a):
        row = []
        for x in r.tolist():
            x = barrett_reduce(x)
            row.append(x - Q if x >= Q else x)
        out.append(row)
    return _pack(out, np.shape(a))


def to_scalar_order(fhat: np.ndarray) -> np.ndarray:
    return np.asarray(fhat, dtype=np.int16)


def from_scalar_order(fhat: np.ndarray) -> np.ndarray:
    return np.asarray(fhat, dtype=np.int16)
