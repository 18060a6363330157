#!/usr/bin/env python3
"""Compare the compiled search kernel against the pure-Python fallback.

Runs the same exact-search queries once per kernel (each in a fresh
interpreter so the import-time kernel selection is exercised), checks that
both kernels return identical values, and prints per-case timings with the
node throughput and overall speedup.

Usage:
    python3 benchmarks/kernel_benchmark.py [--quick]
"""

from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys
import textwrap

CASES = [
    # (moduli, invariant kind, k) -- chosen so pruning does not finish the
    # search instantly and node counts are meaningful.
    ((2, 4, 4), "sd_k", 0),
    ((3, 3, 3), "sd_k", 0),
    ((12,), "sd_k", 2),
    ((5, 5), "olson_k", 0),
]
HEAVY_CASES = [
    ((4, 4, 4), "olson_k", 0),
]

WORKER_SCRIPT = textwrap.dedent(
    """
    import json, sys, time
    from artifact.engine import InvariantQuery, compute, kernel_in_use
    from artifact.groups import make_group

    cases = json.loads(sys.argv[1])
    rows = []
    for moduli, kind, k in cases:
        start = time.perf_counter()
        result = compute(
            InvariantQuery(group=make_group(tuple(moduli)), kind=kind, k=k)
        )
        rows.append(
            {
                "moduli": moduli,
                "kind": kind,
                "k": k,
                "value": result.value,
                "nodes": result.node_count,
                "seconds": time.perf_counter() - start,
            }
        )
    print(json.dumps({"kernel": kernel_in_use(), "rows": rows}))
    """
)


def run_kernel(cases, force_python: bool) -> dict:
    env = dict(os.environ)
    if force_python:
        env["ARTIFACT_FORCE_PY_KERNEL"] = "1"
    else:
        env.pop("ARTIFACT_FORCE_PY_KERNEL", None)
    proc = subprocess.run(
        [sys.executable, "-c", WORKER_SCRIPT, json.dumps(cases)],
        capture_output=True,
        text=True,
        env=env,
        check=True,
    )
    return json.loads(proc.stdout)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument(
        "--quick", action="store_true",
        help="skip the multi-million-node case (pure Python takes ~30 s)",
    )
    args = parser.parse_args()

    cases = [[list(m), kind, k] for m, kind, k in CASES]
    if not args.quick:
        cases += [[list(m), kind, k] for m, kind, k in HEAVY_CASES]

    compiled = run_kernel(cases, force_python=False)
    fallback = run_kernel(cases, force_python=True)
    if compiled["kernel"] == fallback["kernel"]:
        print(
            f"note: both runs used the {compiled['kernel']} kernel; "
            "the compiled extension is unavailable",
            file=sys.stderr,
        )

    header = (
        f"{'case':<22} {'value':>5} {'nodes':>10} "
        f"{compiled['kernel']:>12} {fallback['kernel']:>12} {'speedup':>8}"
    )
    print(header)
    print("-" * len(header))
    total_a = total_b = 0.0
    for row_a, row_b in zip(compiled["rows"], fallback["rows"]):
        if row_a["value"] != row_b["value"]:
            print(
                f"VALUE DISAGREEMENT on {row_a['moduli']}: "
                f"{row_a['value']} vs {row_b['value']}",
                file=sys.stderr,
            )
            return 1
        label = ",".join(str(m) for m in row_a["moduli"])
        case = f"{label} {row_a['kind']} k={row_a['k']}"
        seconds_a, seconds_b = row_a["seconds"], row_b["seconds"]
        total_a += seconds_a
        total_b += seconds_b
        speedup = seconds_b / seconds_a if seconds_a > 0 else float("inf")
        print(
            f"{case:<22} {row_a['value']:>5} {row_a['nodes']:>10} "
            f"{seconds_a:>11.3f}s {seconds_b:>11.3f}s {speedup:>7.1f}x"
        )
    print("-" * len(header))
    overall = total_b / total_a if total_a > 0 else float("inf")
    print(
        f"{'total':<22} {'':>5} {'':>10} {total_a:>11.3f}s "
        f"{total_b:>11.3f}s {overall:>7.1f}x"
    )
    return 0


if __name__ == "__main__":
    sys.exit(main())
