"""Benchmark the numba kernels against their pure-numpy twins.

Times the three hot kernels (polynomial circle sums, exponential circle
sums, d2 scan) at several grid sizes and prints a comparison table.
Run as a script:

    python benchmarks/bench_kernels.py [--repeats 7]

The numba column is absent when numba is not importable.
"""

from __future__ import annotations

import argparse
import math
import time

import numpy as np

from gaussmeans import kernels


def _best_of(fn, repeats: int) -> float:
    best = math.inf
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def _cases(n: int):
    c0 = np.array([1.0 + 0j, 0.5 + 0.25j, 0.0, 2.0 + 0j])
    c1 = np.array([0.5 + 0.25j, 0.0, 6.0 + 0j, 0.0])
    c2 = np.array([0.0 + 0j, 12.0, 0.0, 0.0])
    y = np.linspace(0.0, 10.0, n)
    return {
        "poly_circle_sums": lambda f: f(c0, c1, c2, 1.25, 1.0, n, 0, 1),
        "exp_circle_sums": lambda f: f(1.0, 0.5, 1.25, 2.0, n, 0, 1),
        "d2_scan": lambda f: f(y, 2.0, 3.0, -0.5, -1.5),
    }


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=7)
    parser.add_argument("--sizes", type=int, nargs="+",
                        default=[1 << 10, 1 << 13, 1 << 16])
    args = parser.parse_args()

    jitted = kernels.numba_variants()
    header = f"{'kernel':<18} {'n':>8} {'numpy (ms)':>12}"
    if jitted:
        header += f" {'numba (ms)':>12} {'speedup':>9}"
    print(header)
    print("-" * len(header))
    for n in args.sizes:
        cases = _cases(n)
        numpy_impls = {
            "poly_circle_sums": kernels.poly_circle_sums_numpy,
            "exp_circle_sums": kernels.exp_circle_sums_numpy,
            "d2_scan": kernels.d2_scan_numpy,
        }
        for name, call in cases.items():
            call(numpy_impls[name])  # warm any lazy allocations
            t_np = _best_of(lambda: call(numpy_impls[name]), args.repeats)
            line = f"{name:<18} {n:>8} {t_np * 1e3:>12.3f}"
            if jitted:
                call(jitted[name])  # trigger compilation outside the timing
                t_nb = _best_of(lambda: call(jitted[name]), args.repeats)
                line += f" {t_nb * 1e3:>12.3f} {t_np / t_nb:>8.1f}x"
            print(line)


if __name__ == "__main__":
    main()
