"""Benchmark the compiled kernels against the pure-NumPy fallback.

Times the two hot kernels in isolation and the full bootstrap loop that
motivates them. Run from the repository root:

    python benchmarks/bench_kernels.py [--reps 500]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

import cci_toolkit._kernels as kernels
from cci_toolkit._kernels import available_backends, get_backend
from cci_toolkit.simlab import Dgp, simulate
from cci_toolkit.svar import mbb_bands
from cci_toolkit.var import VarSpec


def time_call(fn, *args, repeat=200):
    best = float("inf")
    for _ in range(5):
        fn(*args)  # warm up
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def bench_kernels(backend_name: str, cases) -> dict[str, float]:
    backend = get_backend(backend_name)
    out = {}
    for label, (phi, intercept, shocks, y_init) in cases.items():
        out[f"recursion {label}"] = time_call(
            backend.var_recursion, phi, intercept, shocks, y_init
        )
        y = backend.var_recursion(phi, intercept, shocks, y_init)
        p = y_init.shape[0]
        out[f"fit {label}"] = time_call(backend.fit_var_ls, y, p, True)
    return out


def bench_bootstrap(backend_name: str, reps: int) -> float:
    backend = get_backend(backend_name)
    saved = (kernels.var_recursion, kernels.fit_var_ls)
    kernels.var_recursion = backend.var_recursion
    kernels.fit_var_ls = backend.fit_var_ls
    try:
        dgp = Dgp(
            n=2, p=1,
            phi_true=np.array([[0.7, 0.1], [0.0, 0.6]]),
            b_true=np.array([[1.0, 0.0], [0.5, 1.0]]),
        )
        panel, z = simulate(dgp, 240, seed=0)
        t0 = time.perf_counter()
        mbb_bands(panel, VarSpec(lags=1), z, horizon=12, reps=reps, seed=0)
        return time.perf_counter() - t0
    finally:
        kernels.var_recursion, kernels.fit_var_ls = saved


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--reps", type=int, default=500, help="bootstrap replicates")
    args = parser.parse_args()

    backends = available_backends()
    if len(backends) < 2:
        print("compiled backend not built; benchmarking the fallback only")

    rng = np.random.default_rng(0)
    cases = {}
    for label, (n, p, steps) in {
        "small (n=2, p=1, T=240)": (2, 1, 240),
        "large (n=5, p=6, T=240)": (5, 6, 240),
    }.items():
        cases[label] = (
            rng.normal(scale=0.1, size=(n, n * p)),
            np.zeros(n),
            rng.normal(size=(steps, n)),
            np.zeros((p, n)),
        )

    results = {name: bench_kernels(name, cases) for name in backends}
    boot = {name: bench_bootstrap(name, args.reps) for name in backends}

    width = max(len(k) for k in next(iter(results.values())))
    header = f"{'kernel':<{width}}" + "".join(f"  {b:>12}" for b in backends)
    if len(backends) == 2:
        header += f"  {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for key in results[backends[0]]:
        row = f"{key:<{width}}"
        for b in backends:
            row += f"  {results[b][key] * 1e6:>10.1f}us"
        if len(backends) == 2:
            row += f"  {results['python'][key] / results['compiled'][key]:>7.1f}x"
        print(row)
    label = f"mbb_bands ({args.reps} reps)"
    row = f"{label:<{width}}"
    for b in backends:
        row += f"  {boot[b] * 1e3:>10.1f}ms"
    if len(backends) == 2:
        row += f"  {boot['python'] / boot['compiled']:>7.1f}x"
    print(row)


if __name__ == "__main__":
    main()
