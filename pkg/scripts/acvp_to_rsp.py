#!/usr/bin/env python3
"""Convert NIST ACVP ML-KEM (FIPS 203) JSON vectors to .rsp known-answer files.

Usage: acvp_to_rsp.py KEYGEN_DIR ENCAPDECAP_DIR OUT_DIR

Each *_DIR is an ACVP vector-set directory containing internalProjection.json
(prompt plus expected results).  One file per parameter set is written,
``kat_ML-KEM-<n>.rsp``, holding three kinds of record:

    key generation   count, d, z, pk, sk
    encapsulation    count, pk, msg, ct, ss
    decapsulation    count, sk, ct, ss     (includes modified ciphertexts)
"""
import json
import sys
from collections import defaultdict
from pathlib import Path

FIELDS = {
    "keyGen": (("d", "d"), ("z", "z"), ("pk", "ek"), ("sk", "dk")),
    "encapsulation": (("pk", "ek"), ("msg", "m"), ("ct", "c"), ("ss", "k")),
    "decapsulation": (("sk", "dk"), ("ct", "c"), ("ss", "k")),
}


def load(path: Path) -> dict:
    return json.loads((path / "internalProjection.json").read_text())


def main() -> int:
    if len(sys.argv) != 4:
        print(__doc__, file=sys.stderr)
        return 2
    keygen_dir, encdec_dir, out_dir = map(Path, sys.argv[1:])
    records: dict[str, list[dict]] = defaultdict(list)
    sources = []
    for doc in (load(keygen_dir), load(encdec_dir)):
        sources.append(f"vsId {doc['vsId']} {doc['mode']} {doc['revision']}")
        for group in doc["testGroups"]:
            kind = group.get("function", "keyGen")
            for test in group["tests"]:
                merged = {**group, **test}
                records[group["parameterSet"]].append({ours: merged[theirs].lower() for ours, theirs in FIELDS[kind]})
    out_dir.mkdir(parents=True, exist_ok=True)
    for pset, recs in sorted(records.items()):
        lines = [f"# {pset}", f"# source: NIST ACVP ML-KEM {'; '.join(sources)}", ""]
        for count, rec in enumerate(recs):
            lines.append(f"count = {count}")
            lines += [f"{k} = {v}" for k, v in rec.items()]
            lines.append("")
        (out_dir / f"kat_{pset}.rsp").write_text("\n".join(lines))
        print(f"{pset}: {len(recs)} records")
    return 0


if __name__ == "__main__":
    sys.exit(main())
