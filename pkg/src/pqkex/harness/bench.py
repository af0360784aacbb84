"""Closed-loop handshakes-per-second benchmark."""
from __future__ import annotations

import json
import os
import platform
import statistics
import threading
import time
from dataclasses import asdict, dataclass, field
from typing import Sequence

from .. import backend as _backend
from .. import kem
from . import protocol
from .transport import HandshakeServer, handshake_in_memory, handshake_tcp
from .wire import lookup

PHASES = ("keygen", "encaps", "decaps", "transport")


@dataclass
class BenchConfig:
    kem_ids: Sequence[int]
    duration_s: float = 1.0
    connections: int = 1
    transport: str = "in-memory"
    batch_pool: bool = False
    runs: int = 3
    backend: str | None = None
    warmup: int = 2

    def __post_init__(self) -> None:
        if self.transport not in ("in-memory", "tcp"):
            raise ValueError(f"transport must be 'in-memory' or 'tcp', got {self.transport!r}")
        if self.runs < 1 or self.connections < 1 or self.duration_s <= 0:
            raise ValueError("runs and connections must be >= 1 and duration_s > 0")
        for kem_id in self.kem_ids:
            lookup(kem_id)


@dataclass
class BenchRow:
    kem_id: int
    name: str
    transform: str
    transport: str
    batch_pool: bool
    runs: int
    handshakes: list[int]
    conn_per_sec_runs: list[float]
    conn_per_sec: float       # median over runs
    conn_per_sec_mean: float
    p50_us: float
    p99_us: float
    phases_us: dict[str, float] = field(default_factory=dict)


@dataclass
class BenchReport:
    config: BenchConfig
    backend: str
    rows: list[BenchRow]
    host: dict

    def row(self, kem_id: int) -> BenchRow:
        return next(r for r in self.rows if r.kem_id == kem_id)

    def table(self) -> str:
        head = f"{'kem_id':>7} {'suite':<26} {'transport':<9} {'pool':<4} {'conn/s':>9} {'mean':>9} {'p50 us':>9} {'p99 us':>9}  phases us (keygen/encaps/decaps/transport)"
        lines = [head, "-" * len(head)]
        for r in self.rows:
            ph = "/".join(f"{r.phases_us.get(p, 0.0):.0f}" for p in PHASES)
            lines.append(
                f"0x{r.kem_id:04x} {r.name:<26} {r.transport:<9} {'on' if r.batch_pool else 'off':<4} "
                f"{r.conn_per_sec:9.1f} {r.conn_per_sec_mean:9.1f} {r.p50_us:9.0f} {r.p99_us:9.0f}  {ph}"
            )
        return "\n".join(lines)

    def records(self) -> list[str]:
        """One JSON object per row with the machine-readable fields."""
        keys = ("transform", "transport", "conn_per_sec", "p50_us", "p99_us")
        out = []
        for r in self.rows:
            rec = {"kem_id": f"0x{r.kem_id:04x}", **{k: asdict(r)[k] for k in keys}}
            rec["suite"] = r.name
            rec["handshakes"] = r.handshakes
            out.append(json.dumps(rec, sort_keys=True))
        return out


def _percentile(xs: list[float], p: float) -> float:
    if not xs:
        return 0.0
    xs = sorted(xs)
    return xs[min(len(xs) - 1, int(round(p / 100 * (len(xs) - 1))))]


class _Totals:
    def __init__(self) -> None:
        self.count = 0
        self.latencies: list[float] = []
        self.phases = dict.fromkeys(PHASES, 0.0)
        self.lock = threading.Lock()
        self.elapsed = 0.0

    def add(self, timings: dict) -> None:
        with self.lock:
            self.count += 1
            self.latencies.append(timings["total"])
            crypto = 0.0
            for p in ("keygen", "encaps", "decaps"):
                self.phases[p] += timings.get(p, 0.0)
                crypto += timings.get(p, 0.0)
            self.phases["transport"] += max(0.0, timings["total"] - crypto)


def _loop(cfg: BenchConfig, kem_id: int, deadline: float, totals: _Totals, address, seed: int) -> None:
    rng = kem.CounterRng(b"bench client" + seed.to_bytes(4, "big"))
    suite = protocol.Suite(lookup(kem_id), cfg.backend)
    pool = protocol.KeyPool(suite, rng) if cfg.batch_pool else None
    while time.perf_counter() < deadline:
        if address is None:
            res = handshake_in_memory(kem_id, rng, rng, pool, cfg.backend)
        else:
            res = handshake_tcp(address, kem_id, rng, pool, cfg.backend)
        totals.add(res.timings)


def _one_run(cfg: BenchConfig, kem_id: int, server: HandshakeServer | None) -> _Totals:
    totals = _Totals()
    address = server.address if server is not None else None
    encaps_before = server.encaps_time if server is not None else 0.0
    deadline = time.perf_counter() + cfg.duration_s
    threads = [
        threading.Thread(target=_loop, args=(cfg, kem_id, deadline, totals, address, i))
        for i in range(cfg.connections)
    ]
    start = time.perf_counter()
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    totals.elapsed = time.perf_counter() - start
    if server is not None:
        # encapsulation happens on the server; move it out of the transport share
        enc = server.encaps_time - encaps_before
        totals.phases["encaps"] += enc
        totals.phases["transport"] = max(0.0, totals.phases["transport"] - enc)
    return totals


def bench_run(cfg: BenchConfig) -> BenchReport:
    backend = _backend.resolve(cfg.backend)
    server = HandshakeServer(backend=cfg.backend).start() if cfg.transport == "tcp" else None
    rows = []
    try:
        for kem_id in cfg.kem_ids:
            for _ in range(cfg.warmup):
                if server is None:
                    handshake_in_memory(kem_id, backend=cfg.backend)
                else:
                    handshake_tcp(server.address, kem_id, backend=cfg.backend)
        # round-robin so host load drift hits every suite alike
        per_id: dict[int, list[_Totals]] = {kem_id: [] for kem_id in cfg.kem_ids}
        for _ in range(cfg.runs):
            for kem_id in cfg.kem_ids:
                per_id[kem_id].append(_one_run(cfg, kem_id, server))
        for kem_id, runs in per_id.items():
            spec = lookup(kem_id)
            rates = [r.count / r.elapsed for r in runs]
            lat = [x for r in runs for x in r.latencies]
            total = sum(r.count for r in runs) or 1
            phases = {p: sum(r.phases[p] for r in runs) / total * 1e6 for p in PHASES}
            rows.append(BenchRow(
                kem_id=kem_id,
                name=spec.name,
                transform=spec.transform,
                transport=cfg.transport,
                batch_pool=cfg.batch_pool,
                runs=cfg.runs,
                handshakes=[r.count for r in runs],
                conn_per_sec_runs=rates,
                conn_per_sec=statistics.median(rates),
                conn_per_sec_mean=statistics.fmean(rates),
                p50_us=_percentile(lat, 50) * 1e6,
                p99_us=_percentile(lat, 99) * 1e6,
                phases_us=phases,
            ))
    finally:
        if server is not None:
            server.stop()
    return BenchReport(cfg, backend, rows, host_info())


def host_info() -> dict:
    return {
        "python": platform.python_version(),
        "machine": platform.machine(),
        "cpus": os.cpu_count(),
        "backends": _backend.available_backends(),
        "note": "frequency scaling and SMT left as configured by the host",
    }
