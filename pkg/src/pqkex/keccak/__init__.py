"""SHA-3 / SHAKE with a scalar reference and an N-way lockstep backend.

``batch_absorb_squeeze`` is the public N-way entry point (N in {1, 8}).
Internal callers with an arbitrary number of jobs use :func:`hash_many` or
:class:`XofBatch` through :func:`chunks`, which runs full groups of eight
8-wide and any remainder one stream at a time; lanes are never padded with
dummy inputs.
"""
from __future__ import annotations

from typing import Iterator, Sequence

import numpy as np

from .. import backend as _backend
from ..errors import InvalidParameterError
from . import scalar as _scalar

__all__ = [
    "VARIANTS",
    "BATCH_WIDTH",
    "keccak_p1600",
    "sha3_256",
    "sha3_512",
    "shake128",
    "shake256",
    "sha3_digest",
    "shake_xof",
    "batch_absorb_squeeze",
    "hash_many",
    "XofBatch",
    "chunks",
]

BATCH_WIDTH = 8

# name -> (rate in bytes, domain suffix, fixed digest length or None for XOFs)
VARIANTS: dict[str, tuple[int, int, int | None]] = {
    "sha3-256": (136, 0x06, 32),
    "sha3-512": (72, 0x06, 64),
    "shake128": (168, 0x1F, None),
    "shake256": (136, 0x1F, None),
}


def _variant(name: str) -> tuple[int, int, int | None]:
    try:
        return VARIANTS[name]
    except KeyError:
        raise InvalidParameterError(f"unknown Keccak variant {name!r}") from None


def _outlen(name: str, outlen: int | None) -> int:
    fixed = _variant(name)[2]
    if fixed is None:
        if outlen is None or outlen < 0:
            raise InvalidParameterError(f"{name} needs a non-negative output length")
        return outlen
    if outlen not in (None, fixed):
        raise InvalidParameterError(f"{name} has a fixed {fixed}-byte digest")
    return fixed


def _vector():
    from . import vector

    return vector


class XofBatch:
    """Absorb ``msgs`` into parallel sponges and squeeze them block by block."""

    def __init__(self, variant: str, msgs: Sequence[bytes], backend: str | None = None):
        rate, suffix, _ = _variant(variant)
        self.rate = rate
        self.width = len(msgs)
        self._scalar = _backend.resolve(backend) == _backend.SCALAR
        if self._scalar:
            self._impl = [_scalar.Sponge(rate, suffix, bytes(m)) for m in msgs]
        else:
            self._impl = _vector().BatchSponge(rate, suffix, [bytes(m) for m in msgs])

    def squeeze_blocks(self, nblocks: int) -> np.ndarray:
        """(width, nblocks * rate) uint8 array with the next blocks of every stream."""
        if self._scalar:
            rows = [s.squeeze(nblocks * self.rate) for s in self._impl]
            return np.frombuffer(b"".join(rows), dtype=np.uint8).reshape(self.width, -1)
        return self._impl.squeeze_blocks(nblocks)


def chunks(count: int, backend: str | None = None) -> Iterator[range]:
    """Split job indices into lockstep groups: eights, then singles."""
    if _backend.resolve(backend) == _backend.SCALAR:
        for i in range(count):
            yield range(i, i + 1)
        return
    full = count - count % BATCH_WIDTH
    for start in range(0, full, BATCH_WIDTH):
        yield range(start, start + BATCH_WIDTH)
    for i in range(full, count):
        yield range(i, i + 1)


def _squeeze(variant: str, msgs: Sequence[bytes], outlen: int, backend: str | None) -> list[bytes]:
    rate = _variant(variant)[0]
    blocks = -(-outlen // rate) if outlen else 0
    out = XofBatch(variant, msgs, backend).squeeze_blocks(blocks)
    return [bytes(row[:outlen]) for row in out]


def batch_absorb_squeeze(
    variant: str, msgs: Sequence[bytes], outlen: int | None = None, backend: str | None = None
) -> list[bytes]:
    """Hash N in {1, 8} inputs in lockstep; lane i equals the single-input result."""
    if len(msgs) not in (1, BATCH_WIDTH):
        raise InvalidParameterError(f"batch width must be 1 or {BATCH_WIDTH}, got {len(msgs)}")
    return _squeeze(variant, msgs, _outlen(variant, outlen), backend)


def hash_many(
    variant: str, msgs: Sequence[bytes], outlen: int | None = None, backend: str | None = None
) -> list[bytes]:
    """Any number of inputs, scheduled through :func:`chunks`."""
    n = _outlen(variant, outlen)
    out: list[bytes] = []
    for group in chunks(len(msgs), backend):
        out += _squeeze(variant, [msgs[i] for i in group], n, backend)
    return out


def _one(variant: str, msg: bytes, outlen: int | None, backend: str | None) -> bytes:
    return _squeeze(variant, [bytes(msg)], _outlen(variant, outlen), backend)[0]


def sha3_256(msg: bytes, backend: str | None = None) -> bytes:
    return _one("sha3-256", msg, None, backend)


def sha3_512(msg: bytes, backend: str | None = None) -> bytes:
    return _one("sha3-512", msg, None, backend)


def shake128(msg: bytes, outlen: int, backend: str | None = None) -> bytes:
    return _one("shake128", msg, outlen, backend)


def shake256(msg: bytes, outlen: int, backend: str | None = None) -> bytes:
    return _one("shake256", msg, outlen, backend)


def sha3_digest(variant: int, msg: bytes, backend: str | None = None) -> bytes:
    if variant not in (256, 512):
        raise InvalidParameterError(f"SHA3 variant must be 256 or 512, got {variant}")
    return _one(f"sha3-{variant}", msg, None, backend)


def shake_xof(variant: int, msg: bytes, outlen: int, backend: str | None = None) -> bytes:
    if variant not in (128, 256):
        raise InvalidParameterError(f"SHAKE variant must be 128 or 256, got {variant}")
    return _one(f"shake{variant}", msg, outlen, backend)


def keccak_p1600(state, backend: str | None = None):
    """Apply the 24-round permutation.

    ``state`` is a sequence of 25 ints (returns a list) or a uint64 array of
    shape (25,) or (25, N) (returns a new array of the same shape).
    """
    if not isinstance(state, np.ndarray):
        lanes = [int(v) for v in state]
        if len(lanes) != 25:
            raise InvalidParameterError("Keccak state has 25 lanes")
        if _backend.resolve(backend) == _backend.SCALAR:
            return _scalar.permute(lanes)
        arr = np.array(lanes, dtype=np.uint64).reshape(25, 1)
        _vector().permute(arr)
        return [int(v) for v in arr[:, 0]]
    if state.shape[0] != 25 or state.ndim > 2:
        raise InvalidParameterError("Keccak state array must have shape (25,) or (25, N)")
    arr = np.array(state, dtype=np.uint64).reshape(25, -1)
    if _backend.resolve(backend) == _backend.SCALAR:
        for col in range(arr.shape[1]):
            arr[:, col] = _scalar.permute([int(v) for v in arr[:, col]])
    else:
        _vector().permute(arr)
    return arr.reshape(state.shape)
