"""Benchmark the numba chain-product kernels against the numpy fallback.

Run after installing the package:

    python benchmarks/bench_tmm.py

The workload is the hot path of every sweep and optimisation: the ordered
2x2 complex matrix product over a stack, evaluated across a grid of
thicknesses for one swept layer.
"""

import time

import numpy as np

from stripcavity import _kernels

K0 = 2 * np.pi / 1550.0


def time_function(func, *args, n_runs=20):
    times = []
    result = None
    for _ in range(n_runs):
        start = time.perf_counter()
        result = func(*args)
        times.append(time.perf_counter() - start)
    return np.mean(times), np.std(times), result


def make_stack(n_layers, rng):
    n = (rng.uniform(1.0, 4.0, n_layers) - 1j * rng.uniform(0.0, 5.0, n_layers)).astype(np.complex128)
    d = rng.uniform(5.0, 300.0, n_layers)
    return n, d


def main():
    print("=" * 64)
    print("chain-product kernel benchmark (numba vs numpy fallback)")
    print("=" * 64)
    print(f"numba enabled: {_kernels.NUMBA_ENABLED}")
    if not _kernels.NUMBA_ENABLED:
        print(f"(set {_kernels.ENV_FLAG}=0 or install numba to compare both paths)")

    rng = np.random.default_rng(7)

    if _kernels.NUMBA_ENABLED:
        # Trigger compilation outside the timed region.
        n, d = make_stack(3, rng)
        values = np.linspace(1.0, 30.0, 8)
        _kernels.chain_product_numba(n, d, K0)
        _kernels.chain_sweep_numba(n, d, 0, values, K0)

    for n_layers, n_points in ((3, 2_001), (13, 2_001), (13, 50_001)):
        n, d = make_stack(n_layers, rng)
        values = np.linspace(1.0, 30.0, n_points)

        print("-" * 64)
        print(f"sweep: {n_layers} layers x {n_points} thickness points")
        mean_np, std_np, ref = time_function(_kernels.chain_sweep_numpy, n, d, 0, values, K0)
        print(f"  numpy: {mean_np * 1e3:8.3f} +/- {std_np * 1e3:.3f} ms")
        if _kernels.NUMBA_ENABLED:
            mean_nb, std_nb, out = time_function(_kernels.chain_sweep_numba, n, d, 0, values, K0)
            print(f"  numba: {mean_nb * 1e3:8.3f} +/- {std_nb * 1e3:.3f} ms")
            print(f"  speedup: {mean_np / mean_nb:.2f}x")
            worst = max(
                np.max(np.abs(a - b) / np.maximum(1.0, np.abs(a))) for a, b in zip(ref, out)
            )
            print(f"  max relative |numpy - numba|: {worst:.3e}")

    n, d = make_stack(13, rng)
    print("-" * 64)
    print("single chain product: 13 layers x 10_000 calls")
    mean_np, _, ref = time_function(
        lambda: [_kernels.chain_product_numpy(n, d, K0) for _ in range(10_000)], n_runs=3
    )
    print(f"  numpy: {mean_np * 1e3:8.1f} ms")
    if _kernels.NUMBA_ENABLED:
        mean_nb, _, out = time_function(
            lambda: [_kernels.chain_product_numba(n, d, K0) for _ in range(10_000)], n_runs=3
        )
        print(f"  numba: {mean_nb * 1e3:8.1f} ms")
        print(f"  speedup: {mean_np / mean_nb:.2f}x")


if __name__ == "__main__":
    main()
