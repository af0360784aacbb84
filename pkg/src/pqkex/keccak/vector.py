"""Lockstep Keccak over N interleaved states (numba).

State layout is ``(25, N)`` uint64: lane ``x + 5*y`` of every instance sits
in one contiguous row, so each step of the round function is a single pass
over N words (one 512-bit operation when N = 8).  Byte streams are converted
to and from this layout only at absorb/squeeze boundaries.
"""
from __future__ import annotations

import numpy as np
from numba import njit

from .scalar import ROTATIONS, ROUND_CONSTANTS

_RC = np.array(ROUND_CONSTANTS, dtype=np.uint64)
# After rho/pi, position i = x + 5y receives lane _PI_SRC[i] rotated by _PI_ROT[i].
_PI_SRC = np.zeros(25, dtype=np.int64)
_PI_ROT = np.zeros(25, dtype=np.uint64)
for _x in range(5):
    for _y in range(5):
        _dst = _y + 5 * ((2 * _x + 3 * _y) % 5)
        _PI_SRC[_dst] = _x + 5 * _y
        _PI_ROT[_dst] = ROTATIONS[_x][_y]


@njit(cache=True)
def _permute(S, rc, pi_src, pi_rot):
    n = S.shape[1]
    C = np.empty((5, n), np.uint64)
    B = np.empty((25, n), np.uint64)
    one = np.uint64(1)
    s63 = np.uint64(63)
    s64 = np.uint64(64)
    for r in range(24):
        for x in range(5):
            for l in range(n):
                C[x, l] = S[x, l] ^ S[x + 5, l] ^ S[x + 10, l] ^ S[x + 15, l] ^ S[x + 20, l]
        for i in range(25):
            src = pi_src[i]
            xs = src % 5
            sh = pi_rot[i]
            for l in range(n):
                c1 = C[(xs + 1) % 5, l]
                a = S[src, l] ^ C[(xs + 4) % 5, l] ^ ((c1 << one) | (c1 >> s63))
                if sh != 0:
                    a = (a << sh) | (a >> (s64 - sh))
                B[i, l] = a
        for y in range(5):
            for x in range(5):
                for l in range(n):
                    S[5 * y + x, l] = B[5 * y + x, l] ^ (~B[5 * y + (x + 1) % 5, l] & B[5 * y + (x + 2) % 5, l])
        for l in range(n):
            S[0, l] ^= rc[r]


@njit(cache=True)
def _absorb(S, words, nblocks, rate_words, rc, pi_src, pi_rot):
    # words: (N, max_blocks * rate_words); lanes past their block count idle
    n = S.shape[1]
    maxb = 0
    for l in range(n):
        maxb = max(maxb, nblocks[l])
    for b in range(maxb):
        for l in range(n):
            if b < nblocks[l]:
                for w in range(rate_words):
                    S[w, l] ^= words[l, b * rate_words + w]
        idle = -1
        for l in range(n):
            if b >= nblocks[l]:
                idle = l
        if idle < 0:
            _permute(S, rc, pi_src, pi_rot)
        else:
            keep = S.copy()
            _permute(S, rc, pi_src, pi_rot)
            for l in range(n):
                if b >= nblocks[l]:
                    for w in range(25):
                        S[w, l] = keep[w, l]


@njit(cache=True)
def _squeeze(S, out, nblocks, rate_words, first_pending, rc, pi_src, pi_rot):
    # out: (N, nblocks * rate_words)
    n = S.shape[1]
    for b in range(nblocks):
        if b > 0 or first_pending:
            _permute(S, rc, pi_src, pi_rot)
        for l in range(n):
            for w in range(rate_words):
                out[l, b * rate_words + w] = S[w, l]


def permute(S: np.ndarray) -> None:
    """Permute a (25, N) uint64 state in place."""
    _permute(S, _RC, _PI_SRC, _PI_ROT)


def pad_blocks(msgs: list[bytes], rate: int, suffix: int) -> tuple[np.ndarray, np.ndarray]:
    counts = np.array([len(m) // rate + 1 for m in msgs], dtype=np.int64)
    buf = np.zeros((len(msgs), int(counts.max()) * rate), dtype=np.uint8)
    for i, m in enumerate(msgs):
        end = int(counts[i]) * rate
        buf[i, : len(m)] = np.frombuffer(m, dtype=np.uint8)
        buf[i, len(m)] ^= suffix
        buf[i, end - 1] ^= 0x80
    return buf.view("<u8"), counts


class BatchSponge:
    """N sponges with a common rate, absorbed together and squeezed in lockstep."""

    __slots__ = ("rate", "state", "_pending")

    def __init__(self, rate: int, suffix: int, msgs: list[bytes]):
        self.rate = rate
        words, counts = pad_blocks(msgs, rate, suffix)
        self.state = np.zeros((25, len(msgs)), dtype=np.uint64)
        _absorb(self.state, words, counts, rate // 8, _RC, _PI_SRC, _PI_ROT)
        self._pending = False

    def squeeze_blocks(self, nblocks: int) -> np.ndarray:
        """Next ``nblocks`` rate-sized blocks of every lane as a (N, nblocks*rate) uint8 array."""
        out = np.empty((self.state.shape[1], nblocks * self.rate // 8), dtype="<u8")
        if nblocks:
            _squeeze(self.state, out, nblocks, self.rate // 8, self._pending, _RC, _PI_SRC, _PI_ROT)
            self._pending = True
        return out.view(np.uint8)
