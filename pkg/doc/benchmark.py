from __future__ import annotations

import argparse
import csv
import json
import math
import random
import sys
import time
from pathlib import Path
from typing import Callable

from wittdisp import GroupSpec, MatW, PMat, SquareZeroData, WittRing
from wittdisp.deform import enumerate_lifts, gmzcf_solve_trace, psi_a_group
from wittdisp.displays import Display, adjoint_slopes, newton_slopes, phi_orbits
from wittdisp.rings import FiniteField
from wittdisp.rz import BasePoint, adlv_enumerate


def _percentile(values: list[float], p: float) -> float | None:
    if not values:
        return None
    values_sorted = sorted(values)
    k = int(math.ceil((p / 100.0) * len(values_sorted))) - 1
    k = max(0, min(k, len(values_sorted) - 1))
    return values_sorted[k]


def _avg(values: list[float]) -> float | None:
    if not values:
        return None
    return sum(values) / len(values)


def _witt_mul(backend: str, n: int) -> Callable[[], None]:
    W = WittRing.over(FiniteField.of(2, 2), n, backend=backend)
    rng = random.Random(0)
    pairs = [(W.random_element(rng), W.random_element(rng)) for _ in range(50)]

    def run() -> None:
        for x, y in pairs:
            x * y

    return run


def _slopes(n: int) -> Callable[[], None]:
    W = WittRing.over(FiniteField.of(2), n)
    rng = random.Random(1)
    mats = [MatW.random_invertible(W, 3, rng) for _ in range(10)]
    mu = GroupSpec.gl(3, 1).mu_p(W)

    def run() -> None:
        for u in mats:
            newton_slopes(PMat(u * mu))

    return run


def _adjoint(n: int) -> Callable[[], None]:
    W = WittRing.over(FiniteField.of(2), n)
    D = Display(GroupSpec.gl(2, 1), MatW.from_rows(W, [[0, 1], [1, 0]]))
    return lambda: adjoint_slopes(D)


def _orbits(n: int) -> Callable[[], None]:
    W = WittRing.over(FiniteField.of(2), n)
    return lambda: phi_orbits(GroupSpec.gl(2, 1), W)


def _adlv(n: int) -> Callable[[], None]:
    W = WittRing.over(FiniteField.of(2), 1)
    base = BasePoint(MatW.identity(W, 2), GroupSpec.gl(2, 1))
    return lambda: adlv_enumerate(base, 1, n)


def _gmzcf(n: int) -> Callable[[], None]:
    spec = GroupSpec.gl(2, 1)
    data = SquareZeroData.dual_numbers(FiniteField.of(2))
    W = data.witt(n)
    e = data.A.gens()[0]
    U = MatW.from_rows(W, [[0, 1], [1, 0]])
    h0 = MatW.from_rows(W, [[1, W.teichmuller(e)], [0, 1]])
    Uprime = h0.inverse() * U * psi_a_group(h0, spec, data)

    def run() -> None:
        gmzcf_solve_trace(U, Uprime, data, spec)
        enumerate_lifts(MatW.from_rows(data.quotient_witt(n), [[0, 1], [1, 0]]), data, spec)

    return run


KERNELS = {
    "witt_mul_fast": lambda n: _witt_mul("auto", n),
    "witt_mul_generic": lambda n: _witt_mul("generic", n),
    "newton_slopes": _slopes,
    "adjoint_slopes": _adjoint,
    "phi_orbits": _orbits,
    "adlv": _adlv,
    "gmzcf": _gmzcf,
}

# window for adlv, Witt length for the rest
DEFAULT_SIZE = {"adlv": 1, "phi_orbits": 1, "gmzcf": 2, "witt_mul_generic": 3}


def _summary(records: list[dict]) -> dict:
    stats = {}
    for name in sorted({r["kernel"] for r in records}):
        values = [r["elapsed_ms"] for r in records if r["kernel"] == name and r["ok"]]
        stats[name] = {"count": len(values), "avg": _avg(values), "p95": _percentile(values, 95.0)}
    ok_count = sum(1 for r in records if r["ok"])
    return {"total": len(records), "ok": ok_count, "error": len(records) - ok_count, "stats": stats}


def _write_records(records: list[dict], fmt: str, output: str | None, summary: dict | None) -> None:
    if fmt == "json":
        payload = {"results": records}
        if summary is not None:
            payload["summary"] = summary
        text = json.dumps(payload, ensure_ascii=False)
        if output:
            Path(output).write_text(text, encoding="utf-8")
        else:
            print(text)
        return

    if output:
        out = open(output, "w", encoding="utf-8", newline="")
        close_out = True
    else:
        out = sys.stdout
        close_out = False

    try:
        delimiter = "\t" if fmt == "tsv" else ","
        writer = csv.writer(out, delimiter=delimiter, quoting=csv.QUOTE_MINIMAL)
        writer.writerow(["run", "kernel", "size", "ok", "elapsed_ms", "error"])
        for r in records:
            writer.writerow(
                [r["run"], r["kernel"], r["size"], int(r["ok"]), r["elapsed_ms"], r.get("error") or ""]
            )
    finally:
        if close_out:
            out.close()


def main() -> int:
    parser = argparse.ArgumentParser(description="Benchmark wittdisp kernels")
    parser.add_argument("kernels", nargs="*", help=f"subset of {', '.join(KERNELS)}")
    parser.add_argument("--size", type=int, help="Witt length (window for adlv)")
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--format", choices=["tsv", "csv", "json"], default="tsv")
    parser.add_argument("--output", help="write results to a file instead of stdout")
    parser.add_argument("--summary", action="store_true", help="print summary stats")

    args = parser.parse_args()
    names = args.kernels or list(KERNELS)
    unknown = [n for n in names if n not in KERNELS]
    if unknown:
        parser.error(f"unknown kernels: {', '.join(unknown)}")

    records: list[dict] = []
    for name in names:
        size = args.size or DEFAULT_SIZE.get(name, 4)
        try:
            run_kernel = KERNELS[name](size)
        except Exception as exc:
            records.append({"run": 0, "kernel": name, "size": size, "ok": False, "elapsed_ms": None, "error": repr(exc)})
            continue
        for run in range(1, max(1, args.repeat) + 1):
            started = time.perf_counter()
            error = None
            try:
                run_kernel()
            except Exception as exc:
                error = repr(exc)
            elapsed = round((time.perf_counter() - started) * 1000.0, 3)
            records.append(
                {"run": run, "kernel": name, "size": size, "ok": error is None, "elapsed_ms": elapsed, "error": error}
            )

    summary = _summary(records) if args.summary else None
    _write_records(records, args.format, args.output, summary)

    if args.summary and args.format != "json":
        print(json.dumps(summary, ensure_ascii=False), file=sys.stderr)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
