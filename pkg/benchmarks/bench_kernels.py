#!/usr/bin/env python3
"""Time the numba and numpy paths of each hot kernel and check they agree.

    python3 benchmarks/bench_kernels.py [--repeat 5]

The numba column reads "n/a" when numba is missing or FRACFILM_DISABLE_NUMBA
is set.  First-call compile time is reported separately.
"""

import argparse
import time

import numpy as np

from fracfilm import _kernels


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def cases(rng):
    x, y = rng.uniform(0.01, 0.99, (2, 64))
    s = np.concatenate([np.linspace(-0.5, 0.9, 200), np.linspace(1.1, 10, 200)])
    series = np.cumsum(rng.standard_normal((2000, 16)), axis=0)
    return [
        ("image_sum (64 pairs, k_max=1e4)",
         lambda nb: _kernels.image_sum(x, y, 1.0, 10_000, use_numba=nb)),
        ("entropy_quadrature (400 values, n=3, eps=1e-4)",
         lambda nb: _kernels.entropy_quadrature(s, 3.0, 1e-4, use_numba=nb)),
        ("max_lag_increments (2000x16, 10 lags)",
         lambda nb: _kernels.max_lag_increments(series, 10, use_numba=nb)),
    ]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    print(f"numba available: {_kernels.HAS_NUMBA}")
    print(f"{'kernel':50s} {'numpy [s]':>11s} {'numba [s]':>11s} {'compile [s]':>12s} "
          f"{'speedup':>8s} {'max rel diff':>13s}")
    for name, run in cases(np.random.default_rng(args.seed)):
        t_np, ref = best_of(lambda: run(False), args.repeat)
        if _kernels.HAS_NUMBA:
            t0 = time.perf_counter()
            run(True)
            compile_t = time.perf_counter() - t0
            t_nb, out = best_of(lambda: run(True), args.repeat)
            diff = float(np.max(np.abs(out - ref) / np.maximum(np.abs(ref), 1e-300)))
            print(f"{name:50s} {t_np:11.4g} {t_nb:11.4g} {compile_t:12.4g} "
                  f"{t_np / t_nb:8.1f} {diff:13.2e}")
        else:
            print(f"{name:50s} {t_np:11.4g} {'n/a':>11s} {'n/a':>12s} {'n/a':>8s} {'n/a':>13s}")


if __name__ == "__main__":
    main()
