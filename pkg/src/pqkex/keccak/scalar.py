"""Keccak-p[1600, 24] and a byte-oriented sponge on plain Python ints.

The state is a list of 25 lanes indexed ``x + 5*y``.  The round function is
fully unrolled into locals named ``a<x><y>``; it is the slow but obvious
reference the batched kernels are checked against.
"""
from __future__ import annotations

M = (1 << 64) - 1

ROUND_CONSTANTS = (
    0x0000000000000001, 0x0000000000008082, 0x800000000000808A, 0x8000000080008000,
    0x000000000000808B, 0x0000000080000001, 0x8000000080008081, 0x8000000000008009,
    0x000000000000008A, 0x0000000000000088, 0x0000000080008009, 0x000000008000000A,
    0x000000008000808B, 0x800000000000008B, 0x8000000000008089, 0x8000000000008003,
    0x8000000000008002, 0x8000000000000080, 0x000000000000800A, 0x800000008000000A,
    0x8000000080008081, 0x8000000000008080, 0x0000000080000001, 0x8000000080008008,
)

# rotation offsets r[x][y]
ROTATIONS = (
    (0, 36, 3, 41, 18),
    (1, 44, 10, 45, 2),
    (62, 6, 43, 15, 61),
    (28, 55, 25, 21, 56),
    (27, 20, 39, 8, 14),
)


def permute(lanes: list[int]) -> list[int]:
    (a00, a10, a20, a30, a40, a01, a11, a21, a31, a41, a02, a12, a22, a32, a42, a03, a13, a23, a33, a43, a04, a14, a24, a34, a44) = lanes
    for rc in ROUND_CONSTANTS:
        c0 = a00 ^ a01 ^ a02 ^ a03 ^ a04
        c1 = a10 ^ a11 ^ a12 ^ a13 ^ a14
        c2 = a20 ^ a21 ^ a22 ^ a23 ^ a24
        c3 = a30 ^ a31 ^ a32 ^ a33 ^ a34
        c4 = a40 ^ a41 ^ a42 ^ a43 ^ a44
        d0 = c4 ^ (((c1 << 1) | (c1 >> 63)) & M)
        d1 = c0 ^ (((c2 << 1) | (c2 >> 63)) & M)
        d2 = c1 ^ (((c3 << 1) | (c3 >> 63)) & M)
        d3 = c2 ^ (((c4 << 1) | (c4 >> 63)) & M)
        d4 = c3 ^ (((c0 << 1) | (c0 >> 63)) & M)
        b00 = a00 ^ d0
        t = a01 ^ d0; b13 = ((t << 36) | (t >> 28)) & M
        t = a02 ^ d0; b21 = ((t << 3) | (t >> 61)) & M
        t = a03 ^ d0; b34 = ((t << 41) | (t >> 23)) & M
        t = a04 ^ d0; b42 = ((t << 18) | (t >> 46)) & M
        t = a10 ^ d1; b02 = ((t << 1) | (t >> 63)) & M
        t = a11 ^ d1; b10 = ((t << 44) | (t >> 20)) & M
        t = a12 ^ d1; b23 = ((t << 10) | (t >> 54)) & M
        t = a13 ^ d1; b31 = ((t << 45) | (t >> 19)) & M
        t = a14 ^ d1; b44 = ((t << 2) | (t >> 62)) & M
        t = a20 ^ d2; b04 = ((t << 62) | (t >> 2)) & M
        t = a21 ^ d2; b12 = ((t << 6) | (t >> 58)) & M
        t = a22 ^ d2; b20 = ((t << 43) | (t >> 21)) & M
        t = a23 ^ d2; b33 = ((t << 15) | (t >> 49)) & M
        t = a24 ^ d2; b41 = ((t << 61) | (t >> 3)) & M
        t = a30 ^ d3; b01 = ((t << 28) | (t >> 36)) & M
        t = a31 ^ d3; b14 = ((t << 55) | (t >> 9)) & M
        t = a32 ^ d3; b22 = ((t << 25) | (t >> 39)) & M
        t = a33 ^ d3; b30 = ((t << 21) | (t >> 43)) & M
        t = a34 ^ d3; b43 = ((t << 56) | (t >> 8)) & M
        t = a40 ^ d4; b03 = ((t << 27) | (t >> 37)) & M
        t = a41 ^ d4; b11 = ((t << 20) | (t >> 44)) & M
        t = a42 ^ d4; b24 = ((t << 39) | (t >> 25)) & M
        t = a43 ^ d4; b32 = ((t << 8) | (t >> 56)) & M
        t = a44 ^ d4; b40 = ((t << 14) | (t >> 50)) & M
        a00 = b00 ^ (~b10 & b20)
        a10 = b10 ^ (~b20 & b30)
        a20 = b20 ^ (~b30 & b40)
        a30 = b30 ^ (~b40 & b00)
        a40 = b40 ^ (~b00 & b10)
        a01 = b01 ^ (~b11 & b21)
        a11 = b11 ^ (~b21 & b31)
        a21 = b21 ^ (~b31 & b41)
        a31 = b31 ^ (~b41 & b01)
        a41 = b41 ^ (~b01 & b11)
        a02 = b02 ^ (~b12 & b22)
        a12 = b12 ^ (~b22 & b32)
        a22 = b22 ^ (~b32 & b42)
        a32 = b32 ^ (~b42 & b02)
        a42 = b42 ^ (~b02 & b12)
        a03 = b03 ^ (~b13 & b23)
        a13 = b13 ^ (~b23 & b33)
        a23 = b23 ^ (~b33 & b43)
        a33 = b33 ^ (~b43 & b03)
        a43 = b43 ^ (~b03 & b13)
        a04 = b04 ^ (~b14 & b24)
        a14 = b14 ^ (~b24 & b34)
        a24 = b24 ^ (~b34 & b44)
        a34 = b34 ^ (~b44 & b04)
        a44 = b44 ^ (~b04 & b14)
        a00 ^= rc

    return [a00, a10, a20, a30, a40, a01, a11, a21, a31, a41, a02, a12, a22, a32, a42, a03, a13, a23, a33, a43, a04, a14, a24, a34, a44]


class Sponge:
    """Single-instance sponge: absorb once, squeeze any number of times."""

    __slots__ = ("rate", "lanes", "_buf", "_pending")

    def __init__(self, rate: int, suffix: int, msg: bytes):
        self.rate = rate
        lanes = [0] * 25
        words = rate // 8
        padded = bytearray(msg)
        padded.append(suffix)
        padded.extend(bytes(-len(padded) % rate))
        padded[-1] |= 0x80
        for off in range(0, len(padded), rate):
            block = padded[off:off + rate]
            for i in range(words):
                lanes[i] ^= int.from_bytes(block[8 * i:8 * i + 8], "little")
            lanes = permute(lanes)
        self.lanes = lanes
        self._buf = b""
        self._pending = False  # True once the current block has been emitted

    def _block(self) -> bytes:
        if self._pending:
            self.lanes = permute(self.lanes)
        self._pending = True
        return b"".join(w.to_bytes(8, "little") for w in self.lanes[: self.rate // 8])

    def squeeze(self, n: int) -> bytes:
        out = bytearray(self._buf)
        while len(out) < n:
            out += self._block()
        self._buf = bytes(out[n:])
        return bytes(out[:n])
