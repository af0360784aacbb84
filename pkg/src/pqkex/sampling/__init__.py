"""Uniform and centered-binomial sampling, matrix expansion.

Uniform coefficients come from SHAKE128(rho || j || i): every 3 bytes give two
12-bit candidates, candidates >= q are dropped.  A SHAKE128 block is 168 bytes
(56 whole triples), so streams can be parsed block by block without carrying
partial triples.

The vector path parses a whole block at once: it computes all candidates,
builds the ``< q`` mask and keeps the selected lanes in order (the same
semantics as a masked compress-store).  The scalar path walks triples one at
a time and is the oracle.
"""
from __future__ import annotations

from typing import Sequence

import numpy as np

from .. import backend as _backend
from .. import keccak
from .. import polyring
from ..errors import InvalidParameterError
from ..params import N, Q

__all__ = [
    "XofStream",
    "sample_uniform",
    "parse_uniform",
    "sample_cbd",
    "expand_matrix",
    "expand_matrices",
    "prf",
    "sample_noise",
    "sample_noise_many",
]

SHAKE128_RATE = keccak.VARIANTS["shake128"][0]
_INITIAL_BLOCKS = 3  # 504 bytes, enough for 256 coefficients in ~99.9% of streams


class XofStream:
    """A SHAKE128 (or SHAKE256) stream read greedily, with a consumption counter."""

    def __init__(self, seed: bytes, variant: str = "shake128", backend: str | None = None):
        self._xof = keccak.XofBatch(variant, [bytes(seed)], backend)
        self._buf = b""
        self.bytes_consumed = 0

    def read(self, n: int) -> bytes:
        while len(self._buf) < n:
            self._buf += self._xof.squeeze_blocks(1)[0].tobytes()
        out, self._buf = self._buf[:n], self._buf[n:]
        self.bytes_consumed += n
        return out


def sample_uniform(stream: XofStream) -> np.ndarray:
    """256 coefficients in [0, q), standard (bit-reversed residue) order."""
    coeffs: list[int] = []
    while len(coeffs) < N:
        b0, b1, b2 = stream.read(3)
        d1 = b0 | ((b1 & 0x0F) << 8)
        d2 = (b1 >> 4) | (b2 << 4)
        if d1 < Q:
            coeffs.append(d1)
        if d2 < Q and len(coeffs) < N:
            coeffs.append(d2)
    return np.array(coeffs, dtype=np.int16)


def parse_uniform(buf: np.ndarray, want: int) -> np.ndarray:
    """Accepted candidates of a triple-aligned uint8 buffer, at most ``want`` of them."""
    t = buf.reshape(-1, 3).astype(np.int16)
    cand = np.empty((t.shape[0], 2), dtype=np.int16)
    cand[:, 0] = t[:, 0] | ((t[:, 1] & 0x0F) << 8)
    cand[:, 1] = (t[:, 1] >> 4) | (t[:, 2] << 4)
    cand = cand.reshape(-1)
    return cand[cand < Q][:want]


def _uniform_many(seeds: Sequence[bytes], backend: str | None) -> np.ndarray:
    out = np.empty((len(seeds), N), dtype=np.int16)
    if _backend.resolve(backend) == _backend.SCALAR:
        for i, seed in enumerate(seeds):
            out[i] = sample_uniform(XofStream(seed, backend=backend))
        return out
    for group in keccak.chunks(len(seeds), backend):
        xof = keccak.XofBatch("shake128", [seeds[i] for i in group], backend)
        blocks = xof.squeeze_blocks(_INITIAL_BLOCKS)
        filled = [0] * len(group)
        while True:
            for lane, idx in enumerate(group):
                if filled[lane] < N:
                    got = parse_uniform(blocks[lane], N - filled[lane])
                    out[idx, filled[lane]:filled[lane] + got.size] = got
                    filled[lane] += got.size
            if min(filled) == N:
                break
            blocks = xof.squeeze_blocks(1)  # lockstep: every lane advances
    return out


def _matrix_seeds(rho: bytes, k: int, transposed: bool) -> list[bytes]:
    if len(rho) != 32:
        raise InvalidParameterError("rho must be 32 bytes")
    seeds = []
    for i in range(k):
        for j in range(k):
            row, col = (j, i) if transposed else (i, j)
            seeds.append(bytes(rho) + bytes((col, row)))
    return seeds


def expand_matrices(rhos: Sequence[bytes], k: int, transposed: bool = False, backend: str | None = None) -> np.ndarray:
    """(len(rhos), k, k, 256): all k^2 streams of every seed share the lockstep groups."""
    if k not in (2, 3, 4):
        raise InvalidParameterError(f"k must be 2, 3 or 4, got {k}")
    seeds = [s for rho in rhos for s in _matrix_seeds(rho, k, transposed)]
    a = _uniform_many(seeds, backend).reshape(len(rhos), k, k, N)
    return polyring.from_scalar_order(a, backend=backend)


def expand_matrix(rho: bytes, k: int, transposed: bool = False, backend: str | None = None) -> np.ndarray:
    """(k, k, 256) matrix A-hat with A[i][j] from SHAKE128(rho || j || i).

    With ``transposed`` the entry at [i][j] is A[j][i].  Entries are returned in
    the backend's NTT storage order.
    """
    return expand_matrices([rho], k, transposed, backend)[0]


def sample_cbd(prf_bytes: bytes, eta: int) -> np.ndarray:
    """Centered binomial sample: x - y with x, y sums of ``eta`` input bits each."""
    if eta not in (2, 3):
        raise InvalidParameterError(f"eta must be 2 or 3, got {eta}")
    if len(prf_bytes) != 64 * eta:
        raise InvalidParameterError(f"CBD_{eta} needs {64 * eta} bytes, got {len(prf_bytes)}")
    bits = np.unpackbits(np.frombuffer(bytes(prf_bytes), dtype=np.uint8), bitorder="little")
    halves = bits.reshape(N, 2, eta).sum(axis=2, dtype=np.int16)
    return (halves[:, 0] - halves[:, 1]).astype(np.int16)


def prf(sigma: bytes, nonces: Sequence[int], eta: int, backend: str | None = None) -> list[bytes]:
    """SHAKE256(sigma || nonce) squeezed to 64*eta bytes, for every nonce."""
    return keccak.hash_many("shake256", [bytes(sigma) + bytes((n,)) for n in nonces], 64 * eta, backend)


def sample_noise(sigma: bytes, nonces: Sequence[int], eta: int, backend: str | None = None) -> np.ndarray:
    return sample_noise_many([sigma], nonces, eta, backend)[0]


def sample_noise_many(
    sigmas: Sequence[bytes], nonces: Sequence[int], eta: int, backend: str | None = None
) -> np.ndarray:
    """(len(sigmas), len(nonces), 256) CBD samples; every PRF call goes through one schedule."""
    msgs = [bytes(s) + bytes((n,)) for s in sigmas for n in nonces]
    out = keccak.hash_many("shake256", msgs, 64 * eta, backend)
    polys = [sample_cbd(b, eta) for b in out]
    return np.array(polys, dtype=np.int16).reshape(len(sigmas), len(nonces), N)
