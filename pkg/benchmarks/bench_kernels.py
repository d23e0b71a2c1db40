#!/usr/bin/env python3
"""Benchmark the compiled sweep kernel against the pure-Python fallback.

The d^2 full-thermalization sweep is the package's hot loop: each step reads
the previous step's result, so it cannot be vectorized and the speedup has
to come from JIT compilation.  This script times both paths on the same
inputs and prints the ratio.

Usage: python benchmarks/bench_kernels.py [--dims 100,200,400] [--repeats 5]
"""

import argparse
import time

import numpy as np

from thermoproc._kernels import _memory_sweep_py, backend_name, memory_sweep


def time_call(fn, vec, d, repeats):
    best = float("inf")
    for _ in range(repeats):
        work = vec.copy()
        t0 = time.perf_counter()
        fn(work, d, 0.75, 0, d)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--dims", default="50,100,200,400",
                        help="comma-separated memory dimensions")
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()
    dims = [int(v) for v in args.dims.split(",")]

    print(f"active backend: {backend_name()}")
    if backend_name() != "numba":
        print("numba path unavailable (missing or disabled); timing the "
              "fallback against itself is meaningless, exiting")
        return

    # trigger compilation outside the timed region
    warm = np.full(4, 0.25)
    memory_sweep(warm, 2, 0.75, 0, 2)

    print(f"{'d':>6} {'steps':>10} {'numba [ms]':>12} {'python [ms]':>13} {'speedup':>9}")
    for d in dims:
        vec = np.empty(2 * d)
        vec[:d] = 0.2 / d
        vec[d:] = 0.8 / d
        t_jit = time_call(memory_sweep, vec, d, args.repeats)
        t_py = time_call(_memory_sweep_py, vec, d, args.repeats)
        # identical arithmetic: the two paths must agree bitwise
        a, b = vec.copy(), vec.copy()
        memory_sweep(a, d, 0.75, 0, d)
        _memory_sweep_py(b, d, 0.75, 0, d)
        assert np.array_equal(a, b), "backends disagree"
        print(f"{d:>6} {d * d:>10} {t_jit * 1e3:>12.3f} {t_py * 1e3:>13.3f} "
              f"{t_py / t_jit:>9.1f}x")


if __name__ == "__main__":
    main()
