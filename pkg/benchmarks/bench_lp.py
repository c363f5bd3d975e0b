"""Compare the compiled and pure-Python simplex kernels on solver workloads.

    python3 benchmarks/bench_lp.py [--repeat 3]

Both kernels must return identical results; the script checks that before
reporting times.
"""

import argparse
import statistics
import time

from lipsel import lp
from lipsel.lab import counterexample_m2, quasimetric_grid, random_instance, restriction_scan
from lipsel.solver import min_lipschitz


def workloads():
    insts = [random_instance(s, 6, 3, 2, box=4, metric="tree") for s in range(12)]
    return {
        "min_lipschitz x12 (6 points, Q^3)": lambda: [min_lipschitz(i)[0] for i in insts],
        "scan quasimetric N=5 n=12": lambda: restriction_scan(quasimetric_grid(5, 12), 5).global_,
        "scan m2 N=7": lambda: restriction_scan(counterexample_m2(2), 7).local,
    }


def timed(fn, repeat):
    times, result = [], None
    for _ in range(repeat):
        t = time.perf_counter()
        result = fn()
        times.append(time.perf_counter() - t)
    return statistics.median(times), result


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if not lp.compiled_available():
        raise SystemExit("compiled kernel is not built; run pip install -e . first")
    print(f"{'workload':<36} {'python s':>10} {'compiled s':>11} {'speedup':>8}")
    for name, fn in workloads().items():
        row = {}
        for kernel in ("python", "compiled"):
            lp.use_kernel(kernel)
            row[kernel] = timed(fn, args.repeat)
        if row["python"][1] != row["compiled"][1]:
            raise SystemExit(f"kernels disagree on {name}")
        py, cc = row["python"][0], row["compiled"][0]
        print(f"{name:<36} {py:>10.3f} {cc:>11.3f} {py / cc:>7.2f}x")
    lp.use_kernel("compiled")


if __name__ == "__main__":
    main()
