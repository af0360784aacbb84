"""Bit packing, compression and the raw key / ciphertext byte layouts.

All rounding is done on integers: ``compress`` is floor(2^d * x / q + 1/2)
and ``decompress`` is floor(q * y / 2^d + 1/2), both written as exact integer
divisions so there is no floating point anywhere.

Polynomials handed to the encoders are in plain coefficient (or bit-reversed
residue) order; callers on the vector backend normalise first.
"""
from __future__ import annotations

import numpy as np

from .errors import InvalidParameterError, MalformedInputError
from .params import N, Q, ParameterSet

COMPRESS_WIDTHS = (1, 4, 5, 10, 11)
TAG_LEN = 32
SEED_LEN = 32

ROLES = ("ek", "dk_pke", "dk", "ct", "ct_tagged")
# dk = dk_pke || ek || extras; extras per transform
DK_EXTRAS = {"FO": ("h", "z"), "TCH": (), "TRH": ("z",)}


def compress(x, d: int):
    """Map Z_q (0 <= x < q) to [0, 2^d) with round-half-up. Works on ints and arrays."""
    if isinstance(x, np.ndarray):
        x = x.astype(np.int64)
    return (((x << (d + 1)) + Q) // (2 * Q)) & ((1 << d) - 1)


def decompress(y, d: int):
    if isinstance(y, np.ndarray):
        y = y.astype(np.int64)
    return (Q * y + (1 << (d - 1))) >> d


def error_bound(d: int) -> int:
    """round(q / 2^(d+1)), half up."""
    return (Q + (1 << d)) >> (d + 1)


def byte_encode(f: np.ndarray, d: int) -> bytes:
    """256 d-bit values, least significant bit first, into 32*d bytes."""
    f = np.asarray(f, dtype=np.int64).reshape(-1)
    if f.size != N:
        raise InvalidParameterError(f"byte_encode needs {N} coefficients, got {f.size}")
    if f.min() < 0 or f.max() >= (1 << d):
        raise InvalidParameterError(f"coefficient out of range for {d}-bit encoding")
    bits = (f[:, None] >> np.arange(d)) & 1
    return np.packbits(bits.astype(np.uint8).reshape(-1), bitorder="little").tobytes()


def byte_decode(b: bytes, d: int) -> np.ndarray:
    """Inverse of ``byte_encode``; with d = 12 values are reduced mod q."""
    if len(b) != 32 * d:
        raise InvalidParameterError(f"byte_decode({d}) needs {32 * d} bytes, got {len(b)}")
    bits = np.unpackbits(np.frombuffer(bytes(b), dtype=np.uint8), bitorder="little")
    vals = bits.reshape(N, d).astype(np.int64) @ (1 << np.arange(d, dtype=np.int64))
    if d == 12:
        vals %= Q
    return vals.astype(np.int16)


def encode_vec(polys: np.ndarray, d: int) -> bytes:
    return b"".join(byte_encode(p, d) for p in np.asarray(polys).reshape(-1, N))


def decode_vec(b: bytes, d: int, count: int) -> np.ndarray:
    size = 32 * d
    return np.stack([byte_decode(b[i * size:(i + 1) * size], d) for i in range(count)])


def _expect(role: str, data: bytes, length: int) -> None:
    if len(data) != length:
        raise MalformedInputError(role, f"expected {length} bytes, got {len(data)}")


def role_length(role: str, params: ParameterSet, transform: str = "FO") -> int:
    if role == "ek":
        return params.ek_len
    if role == "dk_pke":
        return params.dk_pke_len
    if role == "dk":
        return params.dk_pke_len + params.ek_len + SEED_LEN * len(DK_EXTRAS[transform])
    if role == "ct":
        return params.ct_len
    if role == "ct_tagged":
        return params.ct_tagged_len
    raise InvalidParameterError(f"unknown role {role!r}")


# -- K-PKE pieces ------------------------------------------------------------

def encode_ek(t_hat: np.ndarray, rho: bytes) -> bytes:
    return encode_vec(t_hat, 12) + bytes(rho)


def decode_ek(ek: bytes, params: ParameterSet) -> tuple[np.ndarray, bytes]:
    _expect("ek", ek, params.ek_len)
    split = 384 * params.k
    return decode_vec(ek[:split], 12, params.k), bytes(ek[split:])


def ek_is_canonical(ek: bytes, params: ParameterSet) -> bool:
    """True if every 12-bit value in ek is already below q (no silent reduction)."""
    _expect("ek", ek, params.ek_len)
    split = 384 * params.k
    raw = np.frombuffer(ek[:split], dtype=np.uint8).reshape(-1, 3).astype(np.int64)
    lo = raw[:, 0] | ((raw[:, 1] & 0x0F) << 8)
    hi = (raw[:, 1] >> 4) | (raw[:, 2] << 4)
    return bool((lo < Q).all() and (hi < Q).all())


def encode_dk_pke(s_hat: np.ndarray) -> bytes:
    return encode_vec(s_hat, 12)


def decode_dk_pke(dk_pke: bytes, params: ParameterSet) -> np.ndarray:
    _expect("dk_pke", dk_pke, params.dk_pke_len)
    return decode_vec(dk_pke, 12, params.k)


def encode_ct(u: np.ndarray, v: np.ndarray, params: ParameterSet) -> bytes:
    """u, v in [0, q); compressed with (du, dv) and packed."""
    return encode_vec(compress(np.asarray(u), params.du), params.du) + byte_encode(
        compress(np.asarray(v), params.dv), params.dv
    )


def decode_ct(ct: bytes, params: ParameterSet) -> tuple[np.ndarray, np.ndarray]:
    _expect("ct", ct, params.ct_len)
    split = 32 * params.du * params.k
    u = decompress(decode_vec(ct[:split], params.du, params.k), params.du)
    v = decompress(byte_decode(ct[split:], params.dv), params.dv)
    return u.astype(np.int16), v.astype(np.int16)


def encode_message(m: bytes) -> np.ndarray:
    """32-byte message to a polynomial with coefficients in {0, (q+1)/2}."""
    return decompress(byte_decode(m, 1), 1).astype(np.int16)


def decode_message(w: np.ndarray) -> bytes:
    return byte_encode(compress(np.asarray(w), 1), 1)


# -- composite byte strings --------------------------------------------------

def serialize(role: str, params: ParameterSet, *parts: bytes, transform: str = "FO") -> bytes:
    """Concatenate the parts of a composite byte string and check the total length.

    dk: (dk_pke, ek, *extras) with extras per ``DK_EXTRAS[transform]``;
    ct_tagged: (ct, tag); other roles take a single part.
    """
    out = b"".join(bytes(p) for p in parts)
    _expect(role, out, role_length(role, params, transform))
    return out


def deserialize(role: str, params: ParameterSet, data: bytes, transform: str = "FO") -> tuple[bytes, ...]:
    _expect(role, data, role_length(role, params, transform))
    data = bytes(data)
    if role == "dk":
        sizes = [params.dk_pke_len, params.ek_len] + [SEED_LEN] * len(DK_EXTRAS[transform])
    elif role == "ct_tagged":
        sizes = [params.ct_len, TAG_LEN]
    else:
        return (data,)
    parts, pos = [], 0
    for size in sizes:
        parts.append(data[pos:pos + size])
        pos += size
    return tuple(parts)
