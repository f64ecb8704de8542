#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-Python fallback.

Runs three workloads:
  1. streaming DTW row updates (the per-sample progress-monitor cost),
  2. knapsack refill searches at several candidate counts,
  3. a full canonical scenario simulation, compiled vs pure backend
     (the pure run happens in a subprocess with COBOTCELL_PURE=1).

Usage: python benchmarks/bench_kernels.py [--quick]
"""

from __future__ import annotations

import argparse
import os
import subprocess
import sys
import time
from pathlib import Path

import numpy as np

from cobotcell._kernels import _core, _pure  # type: ignore[attr-defined]

REPO = Path(__file__).resolve().parent.parent


def bench_dtw(impl, n_samples: int, ref_len: int, dims: int, repeats: int) -> float:
    rng = np.random.default_rng(7)
    ref = rng.normal(size=(ref_len, dims))
    samples = rng.normal(size=(n_samples, dims))
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        row = None
        for i in range(n_samples):
            row = impl.dtw_update_row(row, samples[i], ref)
        best = min(best, time.perf_counter() - start)
    return best


def bench_knapsack(impl, n_items: int, instances: int, repeats: int) -> float:
    rng = np.random.default_rng(11)
    cases = [
        (rng.uniform(0.05, 1.0, size=n_items), float(rng.uniform(0.3, 1.5)))
        for _ in range(instances)
    ]
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        for durations, budget in cases:
            impl.knapsack_select(durations, budget)
        best = min(best, time.perf_counter() - start)
    return best


def bench_sim_subprocess(pure: bool) -> float:
    env = dict(os.environ)
    if pure:
        env["COBOTCELL_PURE"] = "1"
    else:
        env.pop("COBOTCELL_PURE", None)
    code = (
        "import time\n"
        "from cobotcell.job import load_job\n"
        "from cobotcell.sim import SimConfig, load_scenario, run_scenario\n"
        "from cobotcell import _kernels\n"
        f"job = load_job(r'{REPO / 'data' / 'assembly11.job'}')\n"
        f"script = load_scenario(r'{REPO / 'data' / 'scenarios' / 'experiment1.scn'}')\n"
        "start = time.perf_counter()\n"
        "run_scenario(job, script, SimConfig(tick=0.005))\n"
        "print(_kernels.BACKEND, time.perf_counter() - start)\n"
    )
    out = subprocess.run(
        [sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True
    )
    backend, seconds = out.stdout.split()
    expected = "pure" if pure else "compiled"
    if backend != expected:
        raise RuntimeError(f"subprocess selected backend {backend!r}, expected {expected!r}")
    return float(seconds)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--quick", action="store_true", help="fewer repeats")
    args = parser.parse_args()
    repeats = 2 if args.quick else 5

    print(f"{'workload':<42} {'compiled':>10} {'pure':>10} {'speedup':>8}")

    c = bench_dtw(_core, n_samples=400, ref_len=200, dims=6, repeats=repeats)
    p = bench_dtw(_pure, n_samples=400, ref_len=200, dims=6, repeats=repeats)
    print(f"{'DTW rows (400 samples x 200 ref x 6d)':<42} {c:>9.4f}s {p:>9.4f}s {p / c:>7.1f}x")

    for n_items in (12, 16, 20):
        c = bench_knapsack(_core, n_items, instances=100, repeats=repeats)
        p = bench_knapsack(_pure, n_items, instances=100, repeats=repeats)
        label = f"knapsack refill (100 x {n_items} items)"
        print(f"{label:<42} {c:>9.4f}s {p:>9.4f}s {p / c:>7.1f}x")

    c = bench_sim_subprocess(pure=False)
    p = bench_sim_subprocess(pure=True)
    print(f"{'full scenario run (experiment1)':<42} {c:>9.4f}s {p:>9.4f}s {p / c:>7.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
