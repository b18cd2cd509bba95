"""Benchmark the exact-DP kernels: numba-jitted vs pure numpy fallback.

The DP dominates sweep runtime (every copy-budget probe inside every
binary search is one full DP evaluation), so this is the path worth
jitting. Run from the repo root:

    python3 benchmarks/bench_dp.py

The numpy fallback is what you get with PUREBUDGET_DISABLE_NUMBA=1.
"""

import time

import numpy as np

from purebudget import _kernels

WORKLOADS = [
    # (label, n0, level probabilities, r)
    ("worked example k=2", 216, [0.2318, 0.4188], 4),
    ("deep bbpssw k=6", 600, [0.55, 0.62, 0.71, 0.82, 0.91, 0.97], 2),
    ("large budget k=3", 5000, [0.3, 0.5, 0.8], 2),
    ("wide blocks k=2", 4000, [0.25, 0.6], 7),
]


def timeit(fn, *args, repeat=5):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    if _kernels.dp_success_numba is None:
        print("numba path unavailable (PUREBUDGET_DISABLE_NUMBA set or numba missing);")
        print("timing the numpy fallback only.\n")

    print(f"{'workload':<22} {'numpy':>12} {'numba':>12} {'speedup':>9}")
    for label, n0, ps, r in WORKLOADS:
        ps = np.asarray(ps, dtype=np.float64)
        t_np = timeit(_kernels.dp_success_numpy, n0, ps, r)
        if _kernels.dp_success_numba is not None:
            _kernels.dp_success_numba(n0, ps, r)  # warm the JIT outside timing
            t_nb = timeit(_kernels.dp_success_numba, n0, ps, r)
            check = abs(
                _kernels.dp_success_numba(n0, ps, r)
                - _kernels.dp_success_numpy(n0, ps, r)
            )
            assert check < 1e-10, f"paths disagree by {check}"
            print(
                f"{label:<22} {t_np * 1e3:>10.3f}ms {t_nb * 1e3:>10.3f}ms "
                f"{t_np / t_nb:>8.1f}x"
            )
        else:
            print(f"{label:<22} {t_np * 1e3:>10.3f}ms {'-':>12} {'-':>9}")


if __name__ == "__main__":
    main()
