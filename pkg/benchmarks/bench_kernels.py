"""Compiled vs pure-Python kernels: micro timings plus end-to-end solves.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--instances 20]
"""

import argparse
import os
import sys
import time

import numpy as np

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "tests"))

from instances import random_instances  # noqa: E402
from msifm import _backend  # noqa: E402
from msifm.driver import run_colgen, run_oracle  # noqa: E402


def kernel_inputs(rng, n=1 << 14, r=40, p=2, q=2):
    sv = rng.integers(0, 4, size=(n, p), dtype=np.int32)
    mv = rng.integers(0, 1 << 10, size=(n, q), dtype=np.uint64)
    row_sv = rng.integers(-1, 4, size=(r, p), dtype=np.int32)
    row_mv = rng.integers(0, 1 << 10, size=(r, q), dtype=np.uint64) & rng.integers(0, 1 << 10, size=(r, q), dtype=np.uint64)
    row_op = rng.integers(0, 3, size=(r, q), dtype=np.int8)
    row_sign = rng.choice(np.array([-1, 1], dtype=np.int8), size=r)
    return sv, mv, row_sv, row_mv, row_op, row_sign


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--instances", type=int, default=20)
    args = ap.parse_args(argv)

    backends = _backend.available()
    if "cython" not in backends:
        print("compiled kernels not built; timing the fallback only")

    rng = np.random.default_rng(7)
    inc_args = kernel_inputs(rng)
    with _backend.use("python") as k:
        cols = k.row_incidence(*inc_args)
    n, r = cols.shape
    y = rng.integers(-50, 50, size=r, dtype=np.int64)
    # nothing qualifies, so Bland scans every column
    cost = np.abs(cols).astype(np.int64) @ np.abs(y) + 1
    state = np.zeros(n, dtype=np.int8)
    excluded = (rng.random(n) < 0.1).astype(np.uint8)

    micro = {
        "row_incidence": lambda k: k.row_incidence(*inc_args),
        "bland_entering": lambda k: k.bland_entering(cols, y, cost, state),
        "masked_argmin": lambda k: k.masked_argmin(cols, y, excluded),
    }
    insts = random_instances(11, args.instances)
    macro = {
        "colgen x%d" % len(insts): lambda k: [run_colgen(i) for i in insts],
        "oracle x%d" % len(insts): lambda k: [run_oracle(i, 1 << 14) for i in insts],
    }

    print(f"{'case':<20}" + "".join(f"{b:>12}" for b in backends) + ("     speedup" if len(backends) > 1 else ""))
    for label, fn in list(micro.items()) + list(macro.items()):
        reps = args.repeat if label in micro else 1
        row = {}
        for b in backends:
            with _backend.use(b) as k:
                row[b] = best_of(lambda: fn(k), reps)
        line = f"{label:<20}" + "".join(f"{row[b] * 1e3:>10.2f}ms" for b in backends)
        if len(backends) > 1:
            line += f"{row['python'] / row['cython']:>11.1f}x"
        print(line)
    print(f"(micro kernels on {n} transactions x {r} rows, best of {args.repeat})")


if __name__ == "__main__":
    main()
