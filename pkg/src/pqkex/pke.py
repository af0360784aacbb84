"""K-PKE: the IND-CPA scheme under every KEM transform.

Key and ciphertext bytes follow the FIPS 203 layouts.  Arithmetic runs on the
selected polyring backend; NTT-domain values are converted to plain residue
order only at the byte boundary.
"""
from __future__ import annotations

import threading
from typing import Sequence

import numpy as np

from . import codec, keccak, polyring
from .errors import InvalidParameterError
from .params import ParameterSet, get_params
from .sampling import expand_matrices, expand_matrix, sample_noise, sample_noise_many

__all__ = ["kpke_keygen", "keygen_many", "kpke_encrypt", "kpke_decrypt", "encrypt_calls"]

_calls_lock = threading.Lock()
_encrypt_calls = 0


def encrypt_calls() -> int:
    """Number of ``kpke_encrypt`` invocations in this process (instrumentation)."""
    return _encrypt_calls


def _seed(name: str, value: bytes) -> bytes:
    if len(value) != 32:
        raise InvalidParameterError(f"{name} must be 32 bytes, got {len(value)}")
    return bytes(value)


def keygen_many(ds: Sequence[bytes], params: ParameterSet | str, backend: str | None = None) -> list[tuple[bytes, bytes]]:
    """K-PKE key generation for several seeds in lockstep.

    G, the matrix XOF streams and the noise PRFs of all keys are pooled into
    shared 8-way Keccak groups and the polynomial arithmetic runs on stacked
    arrays.  Key i is identical to ``kpke_keygen(ds[i])``.
    """
    params = get_params(params)
    impl = polyring.get_impl(backend)
    k = params.k
    gs = keccak.hash_many("sha3-512", [_seed("d", d) + bytes((k,)) for d in ds], backend=backend)
    rhos = [g[:32] for g in gs]
    a_hat = expand_matrices(rhos, k, transposed=False, backend=backend)
    noise = sample_noise_many([g[32:] for g in gs], range(2 * k), params.eta1, backend)
    s_hat = impl.ntt(noise[:, :k])
    e_hat = impl.ntt(noise[:, k:])
    t_hat = impl.add(polyring.basemul_acc(a_hat, s_hat[:, None], backend), e_hat)
    t_enc = impl.to_scalar_order(impl.freeze(t_hat))
    s_enc = impl.to_scalar_order(impl.freeze(s_hat))
    return [(codec.encode_ek(t_enc[i], rhos[i]), codec.encode_dk_pke(s_enc[i])) for i in range(len(ds))]


def kpke_keygen(d: bytes, params: ParameterSet | str, backend: str | None = None) -> tuple[bytes, bytes]:
    """Returns (ek_pke, dk_pke)."""
    return keygen_many([d], params, backend)[0]


def kpke_encrypt(ek: bytes, m: bytes, r: bytes, params: ParameterSet | str, backend: str | None = None) -> bytes:
    global _encrypt_calls
    with _calls_lock:
        _encrypt_calls += 1
    params = get_params(params)
    impl = polyring.get_impl(backend)
    k = params.k
    t_hat, rho = codec.decode_ek(ek, params)
    t_hat = impl.from_scalar_order(t_hat)
    a_t = expand_matrix(rho, k, transposed=True, backend=backend)
    r = _seed("r", r)
    if params.eta1 == params.eta2:
        noise = sample_noise(r, range(2 * k + 1), params.eta1, backend)
        y, e1, e2 = noise[:k], noise[k:2 * k], noise[2 * k:]
    else:
        y = sample_noise(r, range(k), params.eta1, backend)
        e12 = sample_noise(r, range(k, 2 * k + 1), params.eta2, backend)
        e1, e2 = e12[:k], e12[k:]
    y_hat = impl.ntt(y)
    u = impl.add(impl.intt(polyring.basemul_acc(a_t, y_hat[None], backend)), e1)
    mu = codec.encode_message(_seed("m", m))
    v = impl.intt(polyring.basemul_acc(t_hat, y_hat, backend))
    v = impl.add(impl.add(v, e2[0]), mu)
    return codec.encode_ct(impl.freeze(u), impl.freeze(v), params)


def kpke_decrypt(dk: bytes, ct: bytes, params: ParameterSet | str, backend: str | None = None) -> bytes:
    params = get_params(params)
    impl = polyring.get_impl(backend)
    s_hat = impl.from_scalar_order(codec.decode_dk_pke(dk, params))
    u, v = codec.decode_ct(ct, params)
    su = impl.intt(polyring.basemul_acc(s_hat, impl.ntt(u), backend))
    return codec.decode_message(impl.freeze(impl.sub(v, su)))
