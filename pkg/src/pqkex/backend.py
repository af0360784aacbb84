"""Backend selection.

Two arithmetic backends exist:

``scalar``
    Pure-Python reference, one coefficient (or one Keccak instance) at a
    time.  Always available.

``vector``
    Lane-parallel kernels compiled with numba: 32 signed 16-bit lanes per
    row for polynomial arithmetic and 8 interleaved Keccak states.  The
    kernels are written as fixed-width lane loops so LLVM lowers them to
    512-bit vector code on hosts with AVX-512BW.

The default is picked once at import: ``vector`` when numba imports and the
CPU reports AVX-512BW, ``scalar`` otherwise.  ``PQKEX_BACKEND`` overrides the
choice; ``set_default_backend`` / ``use_backend`` change it at runtime.
"""
from __future__ import annotations

import contextlib
import functools
import os
import platform
from typing import Iterator

from .errors import BackendUnavailableError, InvalidParameterError

SCALAR = "scalar"
VECTOR = "vector"
BACKENDS = (SCALAR, VECTOR)

_REQUIRED_FLAGS = ("avx512f", "avx512bw")


@functools.lru_cache(maxsize=None)
def cpu_flags() -> frozenset[str]:
    try:
        with open("/proc/cpuinfo") as fh:
            for line in fh:
                if line.startswith("flags"):
                    return frozenset(line.split(":", 1)[1].split())
    except OSError:
        pass
    return frozenset()


def has_wide_simd() -> bool:
    return all(flag in cpu_flags() for flag in _REQUIRED_FLAGS)


@functools.lru_cache(maxsize=None)
def numba_available() -> bool:
    try:
        import numba  # noqa: F401
    except ImportError:
        return False
    return True


def vector_unavailable_reason() -> str | None:
    if os.environ.get("PQKEX_DISABLE_VECTOR"):
        return "disabled by PQKEX_DISABLE_VECTOR"
    if not numba_available():
        return "numba is not installed"
    if not has_wide_simd() and not os.environ.get("PQKEX_ALLOW_NARROW_SIMD"):
        return (
            f"CPU lacks {'/'.join(_REQUIRED_FLAGS)} "
            f"(machine={platform.machine()}); set PQKEX_ALLOW_NARROW_SIMD=1 to force"
        )
    return None


def available_backends() -> list[str]:
    out = [SCALAR]
    if vector_unavailable_reason() is None:
        out.append(VECTOR)
    return out


def _check(name: str) -> str:
    if name not in BACKENDS:
        raise InvalidParameterError(f"unknown backend {name!r}; expected one of {BACKENDS}")
    if name == VECTOR:
        reason = vector_unavailable_reason()
        if reason is not None:
            raise BackendUnavailableError(f"vector backend unavailable: {reason}")
    return name


def _initial_default() -> str:
    env = os.environ.get("PQKEX_BACKEND")
    if env:
        return _check(env)
    return VECTOR if vector_unavailable_reason() is None else SCALAR


_default = _initial_default()


def default_backend() -> str:
    return _default


def set_default_backend(name: str) -> None:
    global _default
    _default = _check(name)


def resolve(name: str | None) -> str:
    """Map ``None`` to the current default and validate explicit names."""
    if name is None:
        return _default
    return _check(name)


@contextlib.contextmanager
def use_backend(name: str) -> Iterator[str]:
    global _default
    previous = _default
    _default = _check(name)
    try:
        yield _default
    finally:
        _default = previous
