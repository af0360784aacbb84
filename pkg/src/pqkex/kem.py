"""KEM transforms over K-PKE, batch key generation and a hybrid combiner.

Three transforms share one K-PKE:

``FO``   ML-KEM as standardised: de-randomised encryption, re-encryption
         check in decapsulation, implicit rejection with SHAKE256(z || c).
``TCH``  fresh encryption randomness, a 32-byte confirmation tag
         SHA3-256(0x01 || m) appended to the ciphertext, K = SHA3-256(0x02 || m || c);
         decapsulation rejects explicitly (returns ``None``) on a bad tag.
``TRH``  fresh randomness, K = SHA3-256(0x02 || m || c), no tag and no
         re-encryption; decapsulation is total.

Decapsulation key layouts::

    FO   dk_pke || ek || SHA3-256(ek) || z
    TCH  dk_pke || ek
    TRH  dk_pke || ek || z
"""
from __future__ import annotations

import hashlib
import hmac
import os
from dataclasses import dataclass
from typing import Optional, Protocol, Sequence

from . import codec, keccak
from .errors import InvalidParameterError, MalformedInputError
from .params import PARAMETER_SETS, ParameterSet, get_params
from .pke import keygen_many, kpke_decrypt, kpke_encrypt, kpke_keygen

__all__ = [
    "TRANSFORMS",
    "KemKeyPair",
    "EncapsResult",
    "Rng",
    "SystemRng",
    "CounterRng",
    "keygen",
    "batch_keygen",
    "encaps",
    "decaps",
    "params_for_ek",
    "params_for_dk",
    "ek_is_valid",
    "Kem",
    "MlKem",
    "StubKem",
    "ToyDhKem",
    "hybrid_encaps",
    "hybrid_decaps",
]

TRANSFORMS = ("FO", "TCH", "TRH")
TAG_DOMAIN = b"\x01"
KEY_DOMAIN = b"\x02"


# -- randomness -----------------------------------------------------------------

class Rng(Protocol):
    def random_bytes(self, n: int) -> bytes: ...


class SystemRng:
    def random_bytes(self, n: int) -> bytes:
        return os.urandom(n)


class CounterRng:
    """Deterministic stream SHAKE256(seed || counter), for replay and tests."""

    def __init__(self, seed: bytes = b""):
        self._seed = bytes(seed)
        self._counter = 0

    def random_bytes(self, n: int) -> bytes:
        out = hashlib.shake_256(self._seed + self._counter.to_bytes(8, "little")).digest(n)
        self._counter += 1
        return out


_SYSTEM_RNG = SystemRng()


# -- records --------------------------------------------------------------------

@dataclass(frozen=True)
class KemKeyPair:
    transform: str
    params: ParameterSet
    ek: bytes
    dk: bytes


@dataclass(frozen=True)
class EncapsResult:
    ct: bytes
    shared_secret: bytes


def _transform(name: str) -> str:
    if name not in TRANSFORMS:
        raise InvalidParameterError(f"unknown transform {name!r}; expected one of {TRANSFORMS}")
    return name


def _seed(name: str, value: bytes) -> bytes:
    if len(value) != 32:
        raise InvalidParameterError(f"{name} must be 32 bytes, got {len(value)}")
    return bytes(value)


def params_for_ek(ek: bytes) -> ParameterSet:
    for p in PARAMETER_SETS.values():
        if len(ek) == p.ek_len:
            return p
    raise MalformedInputError("ek", f"no parameter set has a {len(ek)}-byte encapsulation key")


def params_for_dk(transform: str, dk: bytes) -> ParameterSet:
    for p in PARAMETER_SETS.values():
        if len(dk) == codec.role_length("dk", p, transform):
            return p
    raise MalformedInputError("dk", f"no parameter set has a {len(dk)}-byte {transform} decapsulation key")


def ek_is_valid(ek: bytes, params: ParameterSet | str | None = None) -> bool:
    """Encapsulation-key modulus check: every packed value already reduced."""
    p = get_params(params) if params is not None else params_for_ek(ek)
    return codec.ek_is_canonical(ek, p)


# -- core operations ------------------------------------------------------------

def _assemble_dk(transform: str, params: ParameterSet, dk_pke: bytes, ek: bytes, h: bytes | None, z: bytes | None) -> bytes:
    extras = {"h": h, "z": z}
    parts = [dk_pke, ek] + [extras[name] for name in codec.DK_EXTRAS[transform]]
    return codec.serialize("dk", params, *parts, transform=transform)


def keygen(
    transform: str,
    params: ParameterSet | str,
    d: bytes | None = None,
    z: bytes | None = None,
    rng: Rng | None = None,
    backend: str | None = None,
) -> KemKeyPair:
    """Deterministic from (d, z); missing seeds are drawn from ``rng``."""
    transform = _transform(transform)
    params = get_params(params)
    rng = rng or _SYSTEM_RNG
    d = _seed("d", d) if d is not None else rng.random_bytes(32)
    if "z" in codec.DK_EXTRAS[transform]:
        z = _seed("z", z) if z is not None else rng.random_bytes(32)
    ek, dk_pke = kpke_keygen(d, params, backend)
    h = keccak.sha3_256(ek, backend) if transform == "FO" else None
    return KemKeyPair(transform, params, ek, _assemble_dk(transform, params, dk_pke, ek, h, z))


def batch_keygen(
    params: ParameterSet | str,
    seeds: Sequence[tuple[bytes, bytes]],
    shared_z: bool = False,
    transform: str = "FO",
    backend: str | None = None,
) -> list[KemKeyPair]:
    """Eight keypairs generated in lockstep.

    The K-PKE key generations are pooled into shared 8-way Keccak groups (see
    ``pke.keygen_many``) and, for FO, the eight H(ek) digests run as one 8-way
    Keccak batch.

    With ``shared_z`` every key uses the first seed's z (one implicit-rejection
    secret for the whole batch); otherwise key i uses z_i and the output equals
    ``keygen(transform, params, d_i, z_i)`` byte for byte.
    """
    transform = _transform(transform)
    params = get_params(params)
    if len(seeds) != keccak.BATCH_WIDTH:
        raise InvalidParameterError(f"batch_keygen takes {keccak.BATCH_WIDTH} seed pairs, got {len(seeds)}")
    ds = [_seed("d", d) for d, _ in seeds]
    zs = [_seed("z", z) for _, z in seeds]
    if shared_z:
        zs = [zs[0]] * len(zs)
    if "z" not in codec.DK_EXTRAS[transform]:
        zs = [None] * len(zs)
    pke_keys = keygen_many(ds, params, backend)
    if transform == "FO":
        hashes = keccak.batch_absorb_squeeze("sha3-256", [ek for ek, _ in pke_keys], backend=backend)
    else:
        hashes = [None] * len(pke_keys)
    return [
        KemKeyPair(transform, params, ek, _assemble_dk(transform, params, dk_pke, ek, h, z))
        for (ek, dk_pke), h, z in zip(pke_keys, hashes, zs)
    ]


def encaps(
    transform: str,
    ek: bytes,
    m: bytes | None = None,
    rng: Rng | None = None,
    r: bytes | None = None,
    backend: str | None = None,
) -> EncapsResult:
    """Encapsulate to ``ek``.  ``m`` (and, for TCH/TRH, the encryption coins
    ``r``) are drawn from ``rng`` when not given."""
    transform = _transform(transform)
    params = params_for_ek(ek)
    rng = rng or _SYSTEM_RNG
    m = _seed("m", m) if m is not None else rng.random_bytes(32)
    if transform == "FO":
        g = keccak.sha3_512(m + keccak.sha3_256(ek, backend), backend)
        c = kpke_encrypt(ek, m, g[32:], params, backend)
        return EncapsResult(c, g[:32])
    r = _seed("r", r) if r is not None else rng.random_bytes(32)
    c = kpke_encrypt(ek, m, r, params, backend)
    key = keccak.sha3_256(KEY_DOMAIN + m + c, backend)
    if transform == "TCH":
        tag = keccak.sha3_256(TAG_DOMAIN + m, backend)
        return EncapsResult(codec.serialize("ct_tagged", params, c, tag), key)
    return EncapsResult(c, key)


def decaps(transform: str, dk: bytes, ct: bytes, backend: str | None = None) -> Optional[bytes]:
    """Shared secret, or ``None`` for an explicit TCH rejection."""
    transform = _transform(transform)
    params = params_for_dk(transform, dk)
    parts = codec.deserialize("dk", params, dk, transform)
    dk_pke, ek = parts[0], parts[1]
    if transform == "TCH":
        c, tag = codec.deserialize("ct_tagged", params, ct)
        m = kpke_decrypt(dk_pke, c, params, backend)
        if not hmac.compare_digest(keccak.sha3_256(TAG_DOMAIN + m, backend), tag):
            return None
        return keccak.sha3_256(KEY_DOMAIN + m + c, backend)
    (c,) = codec.deserialize("ct", params, ct)
    m = kpke_decrypt(dk_pke, c, params, backend)
    if transform == "TRH":
        return keccak.sha3_256(KEY_DOMAIN + m + c, backend)
    h, z = parts[2], parts[3]
    g = keccak.sha3_512(m + h, backend)
    reject = keccak.shake256(z + c, 32, backend)
    c2 = kpke_encrypt(ek, m, g[32:], params, backend)
    return g[:32] if hmac.compare_digest(c, c2) else reject


# -- hybrid ---------------------------------------------------------------------

class Kem(Protocol):
    name: str
    ct_len: int

    def keygen(self, rng: Rng) -> tuple[bytes, bytes]: ...

    def encaps(self, ek: bytes, rng: Rng) -> tuple[bytes, bytes]: ...

    def decaps(self, dk: bytes, ct: bytes) -> Optional[bytes]: ...


class MlKem:
    """Adapter exposing one (transform, parameter set) through the ``Kem`` protocol."""

    def __init__(self, transform: str, params: ParameterSet | str, backend: str | None = None):
        self.transform = _transform(transform)
        self.params = get_params(params)
        self.backend = backend
        self.name = f"{self.params.name}/{self.transform}"
        self.ct_len = self.params.ct_tagged_len if transform == "TCH" else self.params.ct_len

    def keygen(self, rng: Rng) -> tuple[bytes, bytes]:
        kp = keygen(self.transform, self.params, rng=rng, backend=self.backend)
        return kp.ek, kp.dk

    def encaps(self, ek: bytes, rng: Rng) -> tuple[bytes, bytes]:
        res = encaps(self.transform, ek, rng=rng, backend=self.backend)
        return res.ct, res.shared_secret

    def decaps(self, dk: bytes, ct: bytes) -> Optional[bytes]:
        return decaps(self.transform, dk, ct, backend=self.backend)


class StubKem:
    """Deterministic, insecure stand-in for a classical KEM (tests only).

    dk = seed || ek with ek = SHA3-256("stub ek" || seed); the ciphertext is
    32 random bytes and K = SHA3-256(ek || ct).  Anyone holding ek can derive
    K, so this offers no secrecy.
    """

    name = "stub"
    ct_len = 32

    def keygen(self, rng: Rng) -> tuple[bytes, bytes]:
        seed = rng.random_bytes(32)
        ek = hashlib.sha3_256(b"stub ek" + seed).digest()
        return ek, seed + ek

    def encaps(self, ek: bytes, rng: Rng) -> tuple[bytes, bytes]:
        ct = rng.random_bytes(32)
        return ct, hashlib.sha3_256(ek + ct).digest()

    def decaps(self, dk: bytes, ct: bytes) -> Optional[bytes]:
        if len(dk) != 64 or len(ct) != 32:
            raise MalformedInputError("stub ct", "wrong length")
        return hashlib.sha3_256(dk[32:] + ct).digest()


class ToyDhKem:
    """Textbook Diffie-Hellman KEM in Z_p^* with p = 2^521 - 1, generator 3.

    Only here to put a classical-sized modular exponentiation into the hybrid
    handshake cost; p - 1 is smooth, so discrete logs are easy and this is not
    secure.
    """

    name = "toy-dh521"
    P = (1 << 521) - 1
    G = 3
    ELEM = 66  # bytes per group element
    ct_len = ELEM

    def keygen(self, rng: Rng) -> tuple[bytes, bytes]:
        x = int.from_bytes(rng.random_bytes(64), "big") % (self.P - 2) + 1
        ek = pow(self.G, x, self.P).to_bytes(self.ELEM, "big")
        return ek, x.to_bytes(self.ELEM, "big") + ek

    def encaps(self, ek: bytes, rng: Rng) -> tuple[bytes, bytes]:
        y = int.from_bytes(rng.random_bytes(64), "big") % (self.P - 2) + 1
        ct = pow(self.G, y, self.P).to_bytes(self.ELEM, "big")
        shared = pow(int.from_bytes(ek, "big"), y, self.P).to_bytes(self.ELEM, "big")
        return ct, hashlib.sha3_256(shared + ct + ek).digest()

    def decaps(self, dk: bytes, ct: bytes) -> Optional[bytes]:
        if len(dk) != 2 * self.ELEM or len(ct) != self.ELEM:
            raise MalformedInputError("toy-dh ct", "wrong length")
        x, ek = int.from_bytes(dk[: self.ELEM], "big"), dk[self.ELEM:]
        shared = pow(int.from_bytes(ct, "big"), x, self.P).to_bytes(self.ELEM, "big")
        return hashlib.sha3_256(shared + ct + ek).digest()


def _combine(k_a: bytes, k_b: bytes, ct_a: bytes, ct_b: bytes) -> bytes:
    return keccak.sha3_256(k_a + k_b + ct_a + ct_b)


def hybrid_encaps(kem_a: Kem, kem_b: Kem, ek_a: bytes, ek_b: bytes, rng: Rng | None = None) -> tuple[bytes, bytes]:
    """(ct_a || ct_b, SHA3-256(K_a || K_b || ct_a || ct_b))."""
    rng = rng or _SYSTEM_RNG
    ct_a, k_a = kem_a.encaps(ek_a, rng)
    ct_b, k_b = kem_b.encaps(ek_b, rng)
    return ct_a + ct_b, _combine(k_a, k_b, ct_a, ct_b)


def hybrid_decaps(kem_a: Kem, kem_b: Kem, dk_a: bytes, dk_b: bytes, ct: bytes) -> Optional[bytes]:
    if len(ct) != kem_a.ct_len + kem_b.ct_len:
        raise MalformedInputError("hybrid ct", f"expected {kem_a.ct_len + kem_b.ct_len} bytes, got {len(ct)}")
    ct_a, ct_b = ct[: kem_a.ct_len], ct[kem_a.ct_len:]
    k_a = kem_a.decaps(dk_a, ct_a)
    k_b = kem_b.decaps(dk_b, ct_b)
    if k_a is None or k_b is None:
        return None
    return _combine(k_a, k_b, ct_a, ct_b)
