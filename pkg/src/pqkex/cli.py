"""Command-line entry point: ``pqkex <subcommand>``.

Exit codes: 0 success, 1 verification or benchmark-check failure, 2 usage
error, 3 environment error (backend unavailable, bind/connect failure).
"""
from __future__ import annotations

import argparse
import json
import statistics
import sys
import time
from typing import Callable, Sequence

from . import backend as _backend
from . import kat, kem
from .errors import BackendUnavailableError, KatError, PqkexError
from .params import PARAMETER_SETS

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_ENV = 0, 1, 2, 3
TIME_UNIT = "ns (perf_counter_ns; no cycle counter exposed to Python)"


class UsageError(Exception):
    pass


def _median_ns(fn: Callable[[], object], runs: int, inner: int = 1) -> float:
    samples = []
    for _ in range(runs):
        t0 = time.perf_counter_ns()
        for _ in range(inner):
            fn()
        samples.append((time.perf_counter_ns() - t0) / inner)
    return statistics.median(samples)


def _backend_arg(name: str | None) -> str:
    """Resolve --backend, mapping an unusable vector backend to exit code 3."""
    try:
        return _backend.resolve(name)
    except BackendUnavailableError:
        raise
    except PqkexError as exc:
        raise UsageError(str(exc)) from None


def _warm(set_name: str, backend: str) -> None:
    kp = kem.keygen("FO", set_name, bytes(32), bytes(32), backend=backend)
    kem.decaps("FO", kp.dk, kem.encaps("FO", kp.ek, bytes(32), backend=backend).ct, backend=backend)


# -- kat ------------------------------------------------------------------------

def cmd_kat(args: argparse.Namespace) -> int:
    backends = [_backend_arg(b) for b in (args.backend or [None])]
    status = EXIT_OK
    for path in args.paths:
        for b in backends:
            try:
                report = kat.verify_file(path, args.set, b, stop_at_first=not args.all)
            except KatError as exc:
                print(f"ERROR {exc}")
                status = EXIT_FAIL
                continue
            print(report.summary())
            for m in report.mismatches[1:] if args.all else []:
                print(f"  {m}")
            if not report.ok:
                status = EXIT_FAIL
    return status


# -- bench ----------------------------------------------------------------------

def _bench_one(set_name: str, transform: str, backend: str, runs: int, inner: int) -> dict:
    _warm(set_name, backend)
    rng = kem.CounterRng(b"bench")
    kp = kem.keygen(transform, set_name, rng=rng, backend=backend)
    enc = kem.encaps(transform, kp.ek, rng=rng, backend=backend)
    return {
        "set": set_name,
        "transform": transform,
        "backend": backend,
        "keygen": _median_ns(lambda: kem.keygen(transform, set_name, rng=rng, backend=backend), runs, inner),
        "encaps": _median_ns(lambda: kem.encaps(transform, kp.ek, rng=rng, backend=backend), runs, inner),
        "decaps": _median_ns(lambda: kem.decaps(transform, kp.dk, enc.ct, backend=backend), runs, inner),
    }


def cmd_bench(args: argparse.Namespace) -> int:
    backends = [_backend_arg(args.backend)]
    if args.compare_backends:
        other = _backend.SCALAR if backends[0] == _backend.VECTOR else _backend.VECTOR
        backends.append(_backend_arg(other))
    rows = [_bench_one(args.set, t, b, args.runs, args.inner) for b in backends for t in args.transform]
    print(f"# {args.set}, median of {args.runs} runs x {args.inner} calls, unit: {TIME_UNIT}")
    print(f"{'backend':<8} {'transform':<9} {'keygen':>12} {'encaps':>12} {'decaps':>12}")
    for r in rows:
        print(f"{r['backend']:<8} {r['transform']:<9} {r['keygen']:12.0f} {r['encaps']:12.0f} {r['decaps']:12.0f}")
    ratios = []
    for b in backends:
        by_t = {r["transform"]: r for r in rows if r["backend"] == b}
        for t in ("TRH", "TCH"):
            if t in by_t and "FO" in by_t:
                ratios.append((f"{b} decaps {t}/FO", by_t[t]["decaps"] / by_t["FO"]["decaps"]))
    if len(backends) == 2:
        vec = {r["transform"]: r for r in rows if r["backend"] == _backend.VECTOR}
        sca = {r["transform"]: r for r in rows if r["backend"] == _backend.SCALAR}
        for t in vec:
            for op in ("keygen", "encaps", "decaps"):
                ratios.append((f"{t} {op} vector/scalar", vec[t][op] / sca[t][op]))
    for name, value in ratios:
        print(f"ratio {name:<28} {value:8.3f}")
    if args.json:
        print(json.dumps({"rows": rows, "ratios": dict(ratios)}, sort_keys=True))
    if args.check:
        bad = [n for n, v in ratios if "TRH/FO" in n and v >= 1]
        if bad:
            print(f"CHECK FAILED: {', '.join(bad)} not below 1")
            return EXIT_FAIL
    return EXIT_OK


def cmd_batch_bench(args: argparse.Namespace) -> int:
    b = _backend_arg(args.backend)
    _warm(args.set, b)
    rng = kem.CounterRng(b"batch-bench")
    seeds = [(rng.random_bytes(32), rng.random_bytes(32)) for _ in range(8)]
    kem.batch_keygen(args.set, seeds, shared_z=args.shared_z, backend=b)
    batch = _median_ns(lambda: kem.batch_keygen(args.set, seeds, shared_z=args.shared_z, backend=b), args.runs)
    single = _median_ns(lambda: kem.keygen("FO", args.set, *seeds[0], backend=b), args.runs, 8)
    ratio = 8 * single / batch
    print(f"# {args.set}, backend {b}, shared_z={args.shared_z}, median of {args.runs} runs, unit: {TIME_UNIT}")
    print(f"batch_keygen(8)      {batch:12.0f}")
    print(f"8 x keygen           {8 * single:12.0f}")
    print(f"speedup              {ratio:12.3f}")
    if args.json:
        print(json.dumps({"set": args.set, "backend": b, "batch8": batch, "single": single, "speedup": ratio}))
    if args.check and b == _backend.VECTOR and batch >= 8 * single:
        print("CHECK FAILED: batch_keygen(8) not faster than 8 sequential keygens")
        return EXIT_FAIL
    return EXIT_OK


# -- handshake --------------------------------------------------------------------

def _kem_ids(args: argparse.Namespace) -> list[int]:
    from .harness import kem_id_for, lookup

    if args.kem_id:
        ids = [int(x, 0) for x in args.kem_id]
        for i in ids:
            try:
                lookup(i)
            except PqkexError as exc:
                raise UsageError(str(exc)) from None
        return ids
    modes = {"pq": [False], "hybrid": [True], "both": [False, True]}[args.mode]
    return [kem_id_for(args.set, t, h) for h in modes for t in args.transform]


def cmd_handshake_bench(args: argparse.Namespace) -> int:
    from .harness import BenchConfig, bench_run

    cfg = BenchConfig(
        kem_ids=_kem_ids(args),
        duration_s=args.duration,
        connections=args.connections,
        transport=args.transport,
        batch_pool=args.batch_pool,
        runs=args.runs,
        backend=_backend_arg(args.backend),
    )
    report = bench_run(cfg)
    print(f"# backend {report.backend}, {cfg.runs} runs x {cfg.duration_s}s, {cfg.connections} client loop(s); conn/s is the median")
    print(report.table())
    for rec in report.records():
        print(rec)
    if args.check:
        rate = {r.kem_id: r.conn_per_sec for r in report.rows}
        failed = []
        for kid in rate:
            if kid & 0x0F == 0 and (kid | 2) in rate and rate[kid | 2] < rate[kid]:
                failed.append(f"TRH < FO for 0x{kid:04x}")
            if kid >> 8 == 2 and (kid & 0xFF | 0x100) in rate and rate[kid] >= rate[kid & 0xFF | 0x100]:
                failed.append(f"hybrid >= PQ-only for 0x{kid:04x}")
        if failed:
            print("CHECK FAILED: " + "; ".join(failed))
            return EXIT_FAIL
    return EXIT_OK


def cmd_serve(args: argparse.Namespace) -> int:
    from .harness import HandshakeServer

    server = HandshakeServer((args.host, args.port), backend=_backend_arg(args.backend))
    host, port = server.address
    print(f"listening on {host}:{port}", flush=True)
    server.start()
    try:
        while args.count is None or server.completed + len(server.failures) < args.count:
            time.sleep(0.05)
    except KeyboardInterrupt:
        pass
    finally:
        server.stop()
    print(f"handshakes completed {server.completed}, failed {len(server.failures)}")
    return EXIT_OK if not server.failures else EXIT_FAIL


def cmd_client(args: argparse.Namespace) -> int:
    from .harness import KeyPool, Suite, handshake_tcp, lookup

    b = _backend_arg(args.backend)
    (kem_id,) = _kem_ids(args)[:1]
    pool = KeyPool(Suite(lookup(kem_id), b)) if args.batch_pool else None
    for i in range(args.count):
        res = handshake_tcp((args.host, args.port), kem_id, pool=pool, backend=b)
        print(f"{i} 0x{kem_id:04x} traffic_secret={res.client.traffic_secret.hex()} {res.timings['total'] * 1e3:.2f} ms")
    return EXIT_OK


# -- argument parsing -------------------------------------------------------------

def _add_backend(p: argparse.ArgumentParser, multi: bool = False) -> None:
    choices = [_backend.SCALAR, _backend.VECTOR]
    if multi:
        p.add_argument("--backend", choices=choices, action="append",
                       help="backend to verify with; repeat for both (default: host default)")
    else:
        p.add_argument("--backend", choices=choices, help="default: host default")


def _add_suite(p: argparse.ArgumentParser, multi_transform: bool = True) -> None:
    p.add_argument("--kem-id", action="append", help="wire kem_id, e.g. 0x0110 (excludes --set/--transform/--mode)")
    p.add_argument("--set", choices=sorted(PARAMETER_SETS), default=None)
    if multi_transform:
        p.add_argument("--transform", choices=kem.TRANSFORMS, nargs="+", default=None)
    else:
        p.add_argument("--transform", choices=kem.TRANSFORMS, nargs=1, default=None)
    p.add_argument("--mode", choices=("pq", "hybrid", "both"), default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pqkex", description="ML-KEM toolkit: KAT checks, benchmarks, handshake harness")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("kat", help="verify .rsp known-answer files")
    p.add_argument("paths", nargs="+")
    p.add_argument("--set", choices=sorted(PARAMETER_SETS), help="default: inferred from key lengths")
    p.add_argument("--all", action="store_true", help="report every mismatch instead of stopping at the first")
    _add_backend(p, multi=True)
    p.set_defaults(func=cmd_kat)

    p = sub.add_parser("bench", help="keygen/encaps/decaps medians per transform")
    p.add_argument("--set", choices=sorted(PARAMETER_SETS), default="ML-KEM-768")
    p.add_argument("--transform", choices=kem.TRANSFORMS, nargs="+", default=list(kem.TRANSFORMS))
    p.add_argument("--runs", type=int, default=5)
    p.add_argument("--inner", type=int, default=20, help="calls per timed run")
    p.add_argument("--compare-backends", action="store_true", help="also time the other backend and print ratios")
    p.add_argument("--check", action="store_true", help="exit 1 unless TRH decaps is faster than FO decaps")
    p.add_argument("--json", action="store_true")
    _add_backend(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("batch-bench", help="batch_keygen(8) against 8 sequential keygens")
    p.add_argument("--set", choices=sorted(PARAMETER_SETS), default="ML-KEM-768")
    p.add_argument("--runs", type=int, default=7)
    p.add_argument("--shared-z", action="store_true", help="one z for all eight keys")
    p.add_argument("--check", action="store_true", help="exit 1 unless the batch is faster (vector backend)")
    p.add_argument("--json", action="store_true")
    _add_backend(p)
    p.set_defaults(func=cmd_batch_bench)

    p = sub.add_parser("handshake-bench", help="closed-loop handshakes per second")
    _add_suite(p)
    p.add_argument("--transport", choices=("in-memory", "tcp"), default="in-memory")
    p.add_argument("--duration", type=float, default=1.0, help="seconds per run")
    p.add_argument("--runs", type=int, default=3)
    p.add_argument("--connections", type=int, default=1, help="concurrent client loops")
    p.add_argument("--batch-pool", action="store_true", help="client keys from an 8-wide batch_keygen pool")
    p.add_argument("--check", action="store_true", help="exit 1 unless TRH >= FO and hybrid < PQ-only")
    _add_backend(p)
    p.set_defaults(func=cmd_handshake_bench)

    p = sub.add_parser("serve", help="run a TCP handshake server")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8443)
    p.add_argument("--count", type=int, default=None, help="exit after this many handshakes")
    _add_backend(p)
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("client", help="run handshakes against a server")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8443)
    _add_suite(p, multi_transform=False)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--batch-pool", action="store_true")
    _add_backend(p)
    p.set_defaults(func=cmd_client)
    return parser


def _validate(args: argparse.Namespace) -> None:
    """Reject conflicting flags before any work starts."""
    for name in ("runs", "inner", "connections", "count"):
        value = getattr(args, name, None)
        if value is not None and value < 1:
            raise UsageError(f"--{name} must be at least 1")
    if getattr(args, "duration", None) is not None and args.duration <= 0:
        raise UsageError("--duration must be positive")
    if getattr(args, "port", None) is not None and not 0 <= args.port <= 65535:
        raise UsageError("--port must be in 0..65535")
    if args.command == "kat" and args.backend and len(set(args.backend)) != len(args.backend):
        raise UsageError("--backend given twice with the same value")
    if args.command in ("handshake-bench", "client"):
        if args.kem_id and (args.set or args.transform or args.mode):
            raise UsageError("--kem-id cannot be combined with --set, --transform or --mode")
        if args.kem_id:
            try:
                [int(x, 0) for x in args.kem_id]
            except ValueError:
                raise UsageError(f"--kem-id must be an integer, got {args.kem_id}") from None
        if args.command == "client" and args.kem_id and len(args.kem_id) > 1:
            raise UsageError("client takes a single --kem-id")
        args.set = args.set or "ML-KEM-768"
        args.transform = args.transform or (["FO", "TRH"] if args.command == "handshake-bench" else ["FO"])
        args.mode = args.mode or "pq"
        if args.command == "client" and args.mode == "both":
            raise UsageError("client takes one mode: pq or hybrid")


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        _validate(args)
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BackendUnavailableError as exc:
        print(f"environment error: {exc}", file=sys.stderr)
        return EXIT_ENV
    except OSError as exc:
        print(f"environment error: {exc}", file=sys.stderr)
        return EXIT_ENV
    except PqkexError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
