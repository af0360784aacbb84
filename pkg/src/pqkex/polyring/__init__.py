"""Arithmetic in Z_q[x]/(x^256 + 1) with interchangeable backends.

Polynomials are numpy ``int16`` arrays whose last axis has length 256; any
leading shape is treated as a batch.  Every function takes an optional
``backend`` name and otherwise uses :func:`pqkex.backend.default_backend`.

NTT-domain arrays are backend-specific in layout: the scalar backend keeps
bit-reversed residue order, the vector backend its storage permutation.  Only
feed an NTT-domain array to the backend that produced it, or normalise with
:func:`to_scalar_order` / :func:`from_scalar_order`.

Montgomery budget: twiddles carry R, so ``ntt`` outputs ordinary-domain
values; ``basemul`` cancels its own R^-1 factors and returns |c| < q; ``intt``
scales by 1/128.  Hence ``intt(ntt(f)) == f`` and
``intt(basemul(ntt(f), ntt(g)))`` is the plain negacyclic product.
``basemul`` needs one operand bounded by q (sampled or decoded data, or a
``reduce``-d NTT output); the other may be a raw ``ntt`` result.
"""
from __future__ import annotations

from types import ModuleType

import numpy as np

from .. import backend as _backend
from ..errors import InvalidParameterError
from . import scalar as _scalar
from .scalar import barrett_reduce, montgomery_reduce
from .tables import INTT_REDUCE, NTT_OUTPUT_BOUND, VECTOR_ORDER

__all__ = [
    "barrett_reduce",
    "montgomery_reduce",
    "ntt",
    "intt",
    "basemul",
    "basemul_acc",
    "ring_mul",
    "poly_arith",
    "freeze",
    "to_scalar_order",
    "from_scalar_order",
    "ntt_trace",
    "intt_trace",
    "get_impl",
    "INTT_REDUCE",
    "NTT_OUTPUT_BOUND",
    "VECTOR_ORDER",
]

_vector: ModuleType | None = None


def get_impl(backend: str | None = None) -> ModuleType:
    global _vector
    name = _backend.resolve(backend)
    if name == _backend.SCALAR:
        return _scalar
    if _vector is None:
        from . import vector

        _vector = vector
    return _vector


def ntt(f: np.ndarray, backend: str | None = None) -> np.ndarray:
    return get_impl(backend).ntt(f)


def intt(fhat: np.ndarray, backend: str | None = None) -> np.ndarray:
    return get_impl(backend).intt(fhat)


def basemul(fhat: np.ndarray, ghat: np.ndarray, backend: str | None = None) -> np.ndarray:
    return get_impl(backend).basemul(fhat, ghat)


def basemul_acc(a: np.ndarray, b: np.ndarray, backend: str | None = None) -> np.ndarray:
    """Inner product of two NTT-domain vectors over their second-to-last axis, Barrett-reduced."""
    impl = get_impl(backend)
    prod = impl.basemul(a, b)
    acc = prod[..., 0, :]
    for i in range(1, prod.shape[-2]):
        acc = impl.add(acc, prod[..., i, :])
    return impl.reduce(acc)


def ring_mul(f: np.ndarray, g: np.ndarray, backend: str | None = None) -> np.ndarray:
    """Negacyclic product of two canonical polynomials, |c| < q on output."""
    impl = get_impl(backend)
    return impl.intt(impl.basemul(impl.ntt(f), impl.reduce(impl.ntt(g))))


_UNARY = ("reduce", "to_mont", "from_mont")
_BINARY = ("add", "sub")


def poly_arith(op: str, a: np.ndarray, b: np.ndarray | None = None, backend: str | None = None) -> np.ndarray:
    impl = get_impl(backend)
    if op in _BINARY:
        if b is None:
            raise InvalidParameterError(f"{op} needs two operands")
        return getattr(impl, op)(a, b)
    if op in _UNARY:
        if b is not None:
            raise InvalidParameterError(f"{op} takes one operand")
        return getattr(impl, op)(a)
    raise InvalidParameterError(f"unknown op {op!r}")


def freeze(a: np.ndarray, backend: str | None = None) -> np.ndarray:
    """Unsigned representative in [0, q)."""
    return get_impl(backend).freeze(a)


def to_scalar_order(fhat: np.ndarray, backend: str | None = None) -> np.ndarray:
    return get_impl(backend).to_scalar_order(fhat)


def from_scalar_order(fhat: np.ndarray, backend: str | None = None) -> np.ndarray:
    return get_impl(backend).from_scalar_order(fhat)


def ntt_trace(f) -> tuple[list[int], list[int]]:
    """Scalar NTT with a 32-bit shadow: (output, per-layer peak magnitude)."""
    peaks: list[int] = []
    return _scalar.ntt_one(list(f), peaks), peaks


def intt_trace(fhat) -> tuple[list[int], list[int]]:
    peaks: list[int] = []
    return _scalar.intt_one(list(fhat), peaks), peaks
