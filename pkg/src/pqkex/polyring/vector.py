"""Lane-parallel polynomial arithmetic (numba kernels).

A polynomial is 8 rows of 32 int16 lanes.  Each kernel walks the lanes of a
row pair in a fixed-width inner loop, mirroring one 512-bit instruction per
step: ``mullo``/``mulhi`` are emulated on int32 and truncated exactly as the
hardware would.  NTT-domain arrays are kept in storage order (see
``tables.VECTOR_ORDER``); use ``to_scalar_order`` before comparing with the
scalar backend.
"""
from __future__ import annotations

import numpy as np
from numba import njit

from ..params import N, Q
from .tables import (
    BARRETT_SHIFT,
    BARRETT_V,
    INTT_SCALE_PAIR,
    LANES,
    QINV,
    ROWS,
    TOMONT,
    VECTOR_ORDER,
    VECTOR_ORDER_INV,
    VECTOR_TABLES as _T,
)

NAME = "vector"

_SCALE_LO, _SCALE_HI = INTT_SCALE_PAIR


@njit(cache=True, inline="always")
def _lo16(x):
    return ((x & 0xFFFF) ^ 0x8000) - 0x8000


@njit(cache=True, inline="always")
def _mulmont(x, lo, hi):
    return ((x * hi) >> 16) - ((_lo16(x * lo) * Q) >> 16)


@njit(cache=True, inline="always")
def _barrett(x):
    return x - (((x * BARRETT_V) >> 16) >> BARRETT_SHIFT) * Q


@njit(cache=True)
def _shuffle(a, m, n):
    # swap odd n-blocks of row 2p with even n-blocks of row 2p+1
    for p in range(4):
        for k in range(0, 32, 2 * n):
            for i in range(n):
                t = a[m, 2 * p, k + n + i]
                a[m, 2 * p, k + n + i] = a[m, 2 * p + 1, k + i]
                a[m, 2 * p + 1, k + i] = t


@njit(cache=True)
def _ntt_kernel(a, pairs, lo, hi, shuf):
    for m in range(a.shape[0]):
        for layer in range(7):
            if shuf[layer]:
                _shuffle(a, m, shuf[layer])
            for s in range(4):
                ra = pairs[layer, s, 0]
                rb = pairs[layer, s, 1]
                for lane in range(32):
                    x = np.int32(a[m, rb, lane])
                    t = _mulmont(x, np.int32(lo[layer, s, lane]), np.int32(hi[layer, s, lane]))
                    y = np.int32(a[m, ra, lane])
                    a[m, rb, lane] = y - t
                    a[m, ra, lane] = y + t
        _shuffle(a, m, 1)


@njit(cache=True)
def _intt_kernel(a, pairs, lo, hi, mask, shuf, scale_lo, scale_hi):
    for m in range(a.shape[0]):
        for layer in range(7):
            if shuf[layer]:
                _shuffle(a, m, shuf[layer])
            for r in range(8):
                for lane in range(32):
                    if mask[layer, r, lane]:
                        a[m, r, lane] = _barrett(np.int32(a[m, r, lane]))
            for s in range(4):
                ra = pairs[layer, s, 0]
                rb = pairs[layer, s, 1]
                for lane in range(32):
                    t = np.int32(a[m, ra, lane])
                    u = np.int32(a[m, rb, lane])
                    a[m, ra, lane] = t + u
                    a[m, rb, lane] = _mulmont(u - t, np.int32(lo[layer, s, lane]), np.int32(hi[layer, s, lane]))
        for r in range(8):
            for lane in range(32):
                a[m, r, lane] = _mulmont(np.int32(a[m, r, lane]), scale_lo, scale_hi)


@njit(cache=True, inline="always")
def _mont(x):
    return (x - _lo16(x * QINV) * Q) >> 16


@njit(cache=True)
def _basemul_kernel(out, a, b, gamma):
    for m in range(out.shape[0]):
        for p in range(4):
            for lane in range(32):
                a0 = np.int32(a[m, 2 * p, lane])
                a1 = np.int32(a[m, 2 * p + 1, lane])
                b0 = np.int32(b[m, 2 * p, lane])
                b1 = np.int32(b[m, 2 * p + 1, lane])
                r0 = _mont(_mont(a1 * b1) * np.int32(gamma[p, lane])) + _mont(a0 * b0)
                r1 = _mont(a0 * b1) + _mont(a1 * b0)
                out[m, 2 * p, lane] = _mont(r0 * TOMONT)
                out[m, 2 * p + 1, lane] = _mont(r1 * TOMONT)


def _as_rows(x: np.ndarray) -> np.ndarray:
    return np.ascontiguousarray(x, dtype=np.int16).reshape(-1, ROWS, LANES).copy()


def ntt(f: np.ndarray) -> np.ndarray:
    a = _as_rows(f)
    _ntt_kernel(a, _T["fwd_pairs"], _T["fwd_lo"], _T["fwd_hi"], _T["fwd_shuffle"])
    return a.reshape(np.shape(f))


def intt(fhat: np.ndarray) -> np.ndarray:
    a = _as_rows(fhat)
    _intt_kernel(
        a, _T["inv_pairs"], _T["inv_lo"], _T["inv_hi"], _T["inv_mask"], _T["inv_shuffle"],
        np.int32(_SCALE_LO), np.int32(_SCALE_HI),
    )
    return a.reshape(np.shape(fhat))


def basemul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    a, b = np.broadcast_arrays(np.asarray(a, dtype=np.int16), np.asarray(b, dtype=np.int16))
    shape = a.shape
    out = np.empty((int(np.prod(shape[:-1], dtype=np.int64)), ROWS, LANES), dtype=np.int16)
    _basemul_kernel(out, _as_rows(a), _as_rows(b), _T["gamma"])
    return out.reshape(shape)


# Elementwise operations do not care about lane order; plain numpy on int32
# followed by truncation reproduces the 16-bit lane results.

def _i32(x) -> np.ndarray:
    return np.asarray(x, dtype=np.int32)


def _lo16_np(x: np.ndarray) -> np.ndarray:
    return x.astype(np.int16)


def _mont_np(x: np.ndarray) -> np.ndarray:
    t = _lo16_np(x * QINV).astype(np.int32)
    return (x - t * Q) >> 16


def add(a, b) -> np.ndarray:
    return (_i32(a) + _i32(b)).astype(np.int16)


def sub(a, b) -> np.ndarray:
    return (_i32(a) - _i32(b)).astype(np.int16)


def reduce(a) -> np.ndarray:
    x = _i32(a)
    return (x - (((x * BARRETT_V) >> 16) >> BARRETT_SHIFT) * Q).astype(np.int16)


def to_mont(a) -> np.ndarray:
    return _mont_np(_i32(a) * TOMONT).astype(np.int16)


def from_mont(a) -> np.ndarray:
    return _mont_np(_i32(a)).astype(np.int16)


def freeze(a) -> np.ndarray:
    x = reduce(a)
    return np.where(x >= Q, x - Q, x).astype(np.int16)


def to_scalar_order(fhat: np.ndarray) -> np.ndarray:
    return np.asarray(fhat, dtype=np.int16)[..., VECTOR_ORDER_INV]


def from_scalar_order(fhat: np.ndarray) -> np.ndarray:
    return np.asarray(fhat, dtype=np.int16)[..., VECTOR_ORDER]


assert N == ROWS * LANES
