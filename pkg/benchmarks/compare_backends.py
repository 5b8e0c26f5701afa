#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-Python fallback.

Runs the hot scalar kernels and a full tariff solve loop under both
implementations and prints a timing table.  Usage:

    python benchmarks/compare_backends.py [repeats]
"""

import sys
import time

from cpt_sense._core import _pure

try:
    from cpt_sense._core import _speed
except ImportError:
    _speed = None

S1 = dict(u0=8.17, x_low=2.46, x_high=15.45, b=-0.14)
NOM = dict(alpha=0.82, beta=0.8, lam=2.25, p_worst=0.75)


def bench(label, fn, n):
    t0 = time.perf_counter()
    for _ in range(n):
        fn()
    dt = time.perf_counter() - t0
    print("  %-28s %10.0f calls/s  (%.3f s / %d)" % (label, n / dt, dt, n))
    return dt


def kernel_workload(mod, n):
    rev = mod.bestcase_revenue
    grad = mod.bestcase_revenue_gradient
    parts = mod.bestcase_partials
    acc = mod.acceptance_from_utilities
    args = (6.0, S1["u0"], S1["x_low"], S1["x_high"], S1["b"],
            NOM["alpha"], NOM["beta"], NOM["lam"], NOM["p_worst"])
    print("revenue:")
    bench("bestcase_revenue", lambda: rev(*args), n)
    print("gradient:")
    bench("bestcase_revenue_gradient", lambda: grad(*args), n)
    print("partials:")
    bench("bestcase_partials", lambda: parts(*args), n // 4)
    print("general acceptance chain:")
    bench("acceptance_from_utilities",
          lambda: acc(1.62, 14.61, 8.17, 14.61, NOM["alpha"], NOM["beta"],
                      NOM["lam"], NOM["p_worst"]), n)


def solve_workload(n):
    import importlib
    import os

    results = {}
    for backend in ("python", "compiled"):
        if backend == "compiled" and _speed is None:
            continue
        os.environ["CPT_SENSE_BACKEND"] = backend
        for m in [m for m in list(sys.modules) if m.startswith("cpt_sense")]:
            del sys.modules[m]
        cs = importlib.import_module("cpt_sense")
        assert cs.kernel_backend() == backend
        s1 = cs.fixtures()[0]
        t0 = time.perf_counter()
        for _ in range(n):
            cs.solve(s1, cs.NOMINAL_PARAMS)
        results[backend] = time.perf_counter() - t0
        print("  %-28s %10.1f solves/s  (%.3f s / %d)"
              % ("full solve [%s]" % backend, n / results[backend],
                 results[backend], n))
    if len(results) == 2:
        print("  speedup: %.1fx" % (results["python"] / results["compiled"]))
    os.environ.pop("CPT_SENSE_BACKEND", None)


def main():
    n = int(sys.argv[1]) if len(sys.argv) > 1 else 200_000
    print("== pure-Python kernels")
    kernel_workload(_pure, n)
    if _speed is None:
        print("== compiled kernels: NOT BUILT")
    else:
        print("== compiled kernels")
        kernel_workload(_speed, n)
    print("== end-to-end solve (%d repeats)" % max(200, n // 1000))
    solve_workload(max(200, n // 1000))


if __name__ == "__main__":
    main()
