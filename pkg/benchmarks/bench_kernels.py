#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure NumPy fallbacks.

Runs the Gibbs chain and the bootstrap partial-R^2 loop at the sizes the
model suite actually uses and prints a timing table. Invoke from the repo
root after an editable install:

    python3 benchmarks/bench_kernels.py
"""

from __future__ import annotations

import time

import numpy as np

from fgdkit._kernels import pure

try:
    from fgdkit._kernels import _fast
except ImportError:
    _fast = None


def timeit(fn, repeats=3):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def bench_gibbs(n, k, iterations):
    rng = np.random.default_rng(0)
    x = np.column_stack([np.ones(n), rng.standard_normal((n, k - 1))])
    y = x @ rng.uniform(-2, 2, k) + rng.standard_normal(n)
    z = rng.standard_normal((iterations, k))
    g = rng.gamma(1e-3 + n / 2.0, 1.0, iterations)
    rows = []
    t_pure = timeit(lambda: pure.gibbs_chain(x, y, 1e-6, 1e-3, z, g))
    rows.append(("pure", t_pure))
    if _fast is not None:
        t_fast = timeit(lambda: _fast.gibbs_chain(x, y, 1e-6, 1e-3, z, g))
        rows.append(("compiled", t_fast))
        a = pure.gibbs_chain(x, y, 1e-6, 1e-3, z, g)
        b = _fast.gibbs_chain(x, y, 1e-6, 1e-3, z, g)
        assert np.allclose(a[0], b[0], atol=1e-9), "backends disagree"
    return rows


def bench_bootstrap(n, kc, resamples):
    rng = np.random.default_rng(1)
    y = rng.standard_normal(n)
    xc = np.column_stack([np.ones(n), rng.standard_normal((n, kc - 1))])
    z = rng.standard_normal(n)
    idx = rng.integers(0, n, size=(resamples, n))
    rows = []
    t_pure = timeit(lambda: pure.bootstrap_partial_r2(y, xc, z, idx))
    rows.append(("pure", t_pure))
    if _fast is not None:
        t_fast = timeit(lambda: _fast.bootstrap_partial_r2(y, xc, z, idx))
        rows.append(("compiled", t_fast))
        a = pure.bootstrap_partial_r2(y, xc, z, idx)
        b = _fast.bootstrap_partial_r2(y, xc, z, idx)
        keep = ~a[1]
        assert np.allclose(a[0][keep], b[0][keep], atol=1e-10), "backends disagree"
    return rows


def print_table(title, rows):
    print(f"\n{title}")
    base = dict(rows).get("pure")
    for backend, seconds in rows:
        speedup = f"  ({base / seconds:4.1f}x vs pure)" if backend == "compiled" else ""
        print(f"  {backend:9s} {seconds * 1000:9.1f} ms{speedup}")


def main():
    if _fast is None:
        print("compiled kernel not built; timing the pure fallback only")
    print_table(
        "Gibbs chain, n=142 k=10, 10000 iterations (divide-model posterior)",
        bench_gibbs(142, 10, 10_000),
    )
    print_table(
        "Gibbs chain, n=422 k=4, 10000 iterations (scaling-model posterior)",
        bench_gibbs(422, 4, 10_000),
    )
    print_table(
        "bootstrap partial R^2, n=140 controls=3, B=10000 (changes models)",
        bench_bootstrap(140, 3, 10_000),
    )
    print_table(
        "bootstrap partial R^2, n=140 controls=8, B=10000 (full-controls variant)",
        bench_bootstrap(140, 8, 10_000),
    )


if __name__ == "__main__":
    main()
