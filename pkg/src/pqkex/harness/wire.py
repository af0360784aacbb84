"""Handshake wire format and the kem_id registry.

Every message is an 8-byte header followed by the body::

    offset  size  field
    0       1     version      0x01
    1       1     msg_type     1 client_hello, 2 server_hello, 3 finished
    2       2     kem_id       big-endian, see below
    4       4     body_len     big-endian
    8       n     body

Bodies: client_hello carries ek; server_hello carries ct || finished MAC;
finished carries the client's MAC.  Body lengths are fixed by kem_id and
checked on decode.

kem_id layout::

    0x01 s t   ML-KEM only        s = set index (0: 512, 1: 768, 2: 1024)
    0x02 s t   ML-KEM + toy DH    t = transform index (0: FO, 1: TCH, 2: TRH)

e.g. 0x0110 is ML-KEM-768/FO and 0x0222 is hybrid ML-KEM-1024/TRH.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass
from enum import IntEnum

from ..errors import ProtocolError
from ..kem import TRANSFORMS, ToyDhKem
from ..params import PARAMETER_SETS, ParameterSet, get_params

VERSION = 0x01
HEADER = struct.Struct(">BBHI")
HEADER_LEN = HEADER.size
MAC_LEN = 32

SET_NAMES = ("ML-KEM-512", "ML-KEM-768", "ML-KEM-1024")
PQ_ONLY = 0x01
HYBRID = 0x02


class MsgType(IntEnum):
    CLIENT_HELLO = 1
    SERVER_HELLO = 2
    FINISHED = 3


@dataclass(frozen=True)
class KemSpec:
    kem_id: int
    params: ParameterSet
    transform: str
    hybrid: bool

    @property
    def name(self) -> str:
        base = f"{self.params.name}/{self.transform}"
        return f"{base}+{ToyDhKem.name}" if self.hybrid else base

    @property
    def ek_len(self) -> int:
        return self.params.ek_len + (ToyDhKem.ELEM if self.hybrid else 0)

    @property
    def ct_len(self) -> int:
        n = self.params.ct_tagged_len if self.transform == "TCH" else self.params.ct_len
        return n + (ToyDhKem.ct_len if self.hybrid else 0)

    def body_len(self, msg_type: int) -> int:
        if msg_type == MsgType.CLIENT_HELLO:
            return self.ek_len
        if msg_type == MsgType.SERVER_HELLO:
            return self.ct_len + MAC_LEN
        return MAC_LEN


def kem_id_for(set_name: str, transform: str, hybrid: bool = False) -> int:
    s = SET_NAMES.index(get_params(set_name).name)
    return ((HYBRID if hybrid else PQ_ONLY) << 8) | (s << 4) | TRANSFORMS.index(transform)


REGISTRY: dict[int, KemSpec] = {}
for _h in (False, True):
    for _s, _name in enumerate(SET_NAMES):
        for _t in TRANSFORMS:
            _id = kem_id_for(_name, _t, _h)
            REGISTRY[_id] = KemSpec(_id, PARAMETER_SETS[_name], _t, _h)


def lookup(kem_id: int) -> KemSpec:
    try:
        return REGISTRY[kem_id]
    except KeyError:
        raise ProtocolError(f"unregistered kem_id 0x{kem_id:04x}") from None


@dataclass(frozen=True)
class HandshakeMessage:
    msg_type: int
    kem_id: int
    body: bytes
    version: int = VERSION

    def encode(self) -> bytes:
        return HEADER.pack(self.version, self.msg_type, self.kem_id, len(self.body)) + self.body

    @property
    def header(self) -> bytes:
        return self.encode()[:HEADER_LEN]


def parse_header(header: bytes) -> tuple[int, int, int, int]:
    """(version, msg_type, kem_id, body_len) after structural checks."""
    if len(header) != HEADER_LEN:
        raise ProtocolError(f"short header: {len(header)} bytes")
    version, msg_type, kem_id, body_len = HEADER.unpack(header)
    if version != VERSION:
        raise ProtocolError(f"unsupported version 0x{version:02x}")
    if msg_type not in MsgType.__members__.values():
        raise ProtocolError(f"unknown message type {msg_type}")
    spec = lookup(kem_id)
    want = spec.body_len(msg_type)
    if body_len != want:
        raise ProtocolError(f"{MsgType(msg_type).name.lower()} body is {body_len} bytes, {spec.name} needs {want}")
    return version, msg_type, kem_id, body_len


def decode(data: bytes, expect: int | None = None) -> HandshakeMessage:
    data = bytes(data)
    _, msg_type, kem_id, body_len = parse_header(data[:HEADER_LEN])
    if len(data) != HEADER_LEN + body_len:
        raise ProtocolError(f"length field says {body_len} body bytes, got {len(data) - HEADER_LEN}")
    if expect is not None and msg_type != expect:
        raise ProtocolError(f"expected {MsgType(expect).name.lower()}, got {MsgType(msg_type).name.lower()}")
    return HandshakeMessage(msg_type, kem_id, data[HEADER_LEN:])
