#!/usr/bin/env python3
"""Compare the numba-jitted kernels against their plain-Python/numpy
fallbacks on realistic workloads.

The flag QGA_PURE_NUMPY=1 switches the package itself to the fallback path;
this script imports both implementations directly so a single run reports
both sides.
"""

import time

import numpy as np

from qga import kernels


def timeit(fn, *args, repeat=5):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def bench_sgd(items=2000, dim=100, triples=20000):
    rng = np.random.default_rng(0)
    pos = rng.integers(0, items, size=(triples, 3)).astype(np.int64)
    neg = pos.copy()
    neg[:, 2] = rng.integers(0, items, size=triples)

    base = rng.normal(size=(items, dim))
    rows = [("interpreted loop", kernels._sgd_epoch_impl)]
    if kernels.NUMBA_ENABLED:
        rows.append(("numba njit", kernels.sgd_epoch))
    print(f"\nsgd_epoch: {triples} triples, {items} items, dim={dim}")
    results = {}
    for name, fn in rows:
        vec = base.copy()
        fn(vec, pos[:10], neg[:10], 0.01, 1.0)  # warm up / compile
        vec = base.copy()
        dt = timeit(fn, vec, pos, neg, 0.01, 1.0, repeat=3)
        results[name] = dt
        print(f"  {name:18s} {dt*1e3:9.1f} ms")
    if len(results) == 2:
        a, b = results["interpreted loop"], results["numba njit"]
        print(f"  speedup: {a / b:.0f}x")


def bench_pair_costs(items=2000, dim=100, rows=200000):
    rng = np.random.default_rng(1)
    vec = rng.normal(size=(items, dim))
    v1 = rng.integers(0, items, size=rows).astype(np.int64)
    v2 = rng.integers(0, items, size=rows).astype(np.int64)
    p = rng.integers(0, items, size=rows).astype(np.int64)
    costs = np.empty(rows)
    dirs = np.empty(rows, dtype=np.int8)

    impls = [("numpy vectorized", kernels._pair_costs_numpy)]
    if kernels.NUMBA_ENABLED:
        impls.append(("numba njit", kernels._pair_costs_active))
    print(f"\npair_costs: {rows} rows, dim={dim}")
    results = {}
    for name, fn in impls:
        fn(vec, v1[:10], v2[:10], p[:10], costs[:10], dirs[:10])
        dt = timeit(fn, vec, v1, v2, p, costs, dirs)
        results[name] = dt
        print(f"  {name:18s} {dt*1e3:9.1f} ms")
    if len(results) == 2:
        a, b = results["numpy vectorized"], results["numba njit"]
        faster = "njit" if b < a else "numpy"
        print(f"  ratio numpy/njit: {a / b:.2f} ({faster} faster)")


def main():
    print(f"numba enabled: {kernels.NUMBA_ENABLED}")
    bench_sgd()
    bench_pair_costs()


if __name__ == "__main__":
    main()
