"""Known-answer `.rsp` files: parsing and verification.

A file is a sequence of ``key = hexvalue`` records separated by blank lines.
``#`` lines and ``[section]`` headers are ignored, keys are case-insensitive
and so is the hex.  What gets checked depends on the fields a record carries:

    d, z            -> keygen, compared against pk / sk
    pk, msg         -> FO encapsulation, compared against ct / ss
    sk, ct, ss      -> FO decapsulation, compared against ss

A NIST-style record holding all of d, z, msg, pk, sk, ct, ss runs all three.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from . import kem
from .errors import KatError, PqkexError
from .params import PARAMETER_SETS, ParameterSet, get_params

KNOWN_FIELDS = ("count", "d", "z", "msg", "pk", "sk", "ct", "ss")


@dataclass
class KatRecord:
    index: int
    line: int
    fields: dict[str, bytes] = field(default_factory=dict)
    count: int | None = None


@dataclass
class Mismatch:
    record: int
    line: int
    field: str
    expected: str
    actual: str

    def __str__(self) -> str:
        return f"record {self.record} (line {self.line}): {self.field} mismatch"


@dataclass
class KatReport:
    path: str
    params: ParameterSet
    backend: str | None
    records: int = 0
    checks: int = 0
    mismatches: list[Mismatch] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.records > 0 and not self.mismatches

    def summary(self) -> str:
        verdict = "PASS" if self.ok else "FAIL"
        line = f"{verdict} {self.path} [{self.params.name}, backend={self.backend}] {self.records} records, {self.checks} checks"
        if self.mismatches:
            line += f"; first failure: {self.mismatches[0]}"
        return line


def parse_rsp(text: str, source: str = "<rsp>") -> list[KatRecord]:
    records: list[KatRecord] = []
    current: KatRecord | None = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#") or (line.startswith("[") and line.endswith("]")):
            if not line and current is not None:
                records.append(current)
                current = None
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise KatError(f"{source}:{lineno}: expected 'key = value', got {line!r}")
        key, value = key.strip().lower(), value.strip()
        if key not in KNOWN_FIELDS:
            raise KatError(f"{source}:{lineno}: unknown field {key!r}")
        if current is None:
            current = KatRecord(index=len(records), line=lineno)
        if key in current.fields or (key == "count" and current.count is not None):
            raise KatError(f"{source}:{lineno}: duplicate field {key!r} in record")
        if key == "count":
            try:
                current.count = int(value)
            except ValueError:
                raise KatError(f"{source}:{lineno}: count is not an integer: {value!r}") from None
            continue
        try:
            current.fields[key] = bytes.fromhex(value)
        except ValueError:
            raise KatError(f"{source}:{lineno}: field {key!r} is not valid hex") from None
    if current is not None:
        records.append(current)
    if not records:
        raise KatError(f"{source}: no records")
    return records


def infer_params(records: Iterable[KatRecord], source: str = "<rsp>") -> ParameterSet:
    for rec in records:
        f = rec.fields
        for p in PARAMETER_SETS.values():
            if "pk" in f and len(f["pk"]) == p.ek_len:
                return p
            if "sk" in f and len(f["sk"]) == p.dk_len:
                return p
    raise KatError(f"{source}: cannot infer the parameter set from pk/sk lengths")


def _check_record(rec: KatRecord, p: ParameterSet, backend: str | None, report: KatReport) -> None:
    f = rec.fields
    actual: dict[str, bytes] = {}

    def compare(name: str, value: bytes) -> None:
        report.checks += 1
        if value != f[name]:
            report.mismatches.append(Mismatch(rec.index, rec.line, name, f[name].hex(), value.hex()))

    if "d" in f and "z" in f:
        kp = kem.keygen("FO", p, f["d"], f["z"], backend=backend)
        actual["pk"], actual["sk"] = kp.ek, kp.dk
        for name in ("pk", "sk"):
            if name in f:
                compare(name, actual[name])
    ek = f.get("pk", actual.get("pk"))
    if "msg" in f and ek is not None:
        res = kem.encaps("FO", ek, f["msg"], backend=backend)
        actual["ct"], actual["ss_enc"] = res.ct, res.shared_secret
        if "ct" in f:
            compare("ct", res.ct)
        if "ss" in f:
            compare("ss", res.shared_secret)
    dk = f.get("sk", actual.get("sk"))
    ct = f.get("ct", actual.get("ct"))
    if dk is not None and ct is not None and "ss" in f:
        compare("ss", kem.decaps("FO", dk, ct, backend=backend))
    if report.checks == 0:
        raise KatError(f"{report.path}:{rec.line}: record {rec.index} has nothing to verify")


def verify_records(
    records: list[KatRecord],
    params: ParameterSet | str | None = None,
    backend: str | None = None,
    source: str = "<rsp>",
    stop_at_first: bool = False,
) -> KatReport:
    p = get_params(params) if params is not None else infer_params(records, source)
    report = KatReport(path=source, params=p, backend=backend)
    for rec in records:
        before = report.checks
        try:
            _check_record(rec, p, backend, report)
        except KatError:
            raise
        except PqkexError as exc:
            # a field of the wrong length for the set counts as a failed record
            report.checks = before + 1
            report.mismatches.append(Mismatch(rec.index, rec.line, "format", "", str(exc)))
        report.records += 1
        if stop_at_first and report.mismatches:
            break
    return report


def verify_file(
    path: str | Path,
    params: ParameterSet | str | None = None,
    backend: str | None = None,
    stop_at_first: bool = False,
) -> KatReport:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise KatError(f"{path}: {exc.strerror or exc}") from None
    return verify_records(parse_rsp(text, str(path)), params, backend, str(path), stop_at_first)
