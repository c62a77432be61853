"""Time the numba and numpy kernel backends side by side.

Usage: python3 benchmarks/bench_kernels.py [--repeat R]

Both backends are imported from the same module, so the environment flag does
not matter here.  Outputs are compared first.  The forward recurrence at x = 1
amplifies rounding differences over thousands of steps, so that case gets a
looser tolerance.
"""

import argparse
import time

import numpy as np

from hyperconnect import kernels
from hyperconnect.frobenius import DeltaOperator, recurrence_at_one
from hyperconnect.params import ParameterSet

ALPHA = np.array([0.3, 0.5, 0.7, 0.45], dtype=complex)
BETA = np.array([1.4, 2.15, 1.85], dtype=complex)


def cases():
    params = ParameterSet(tuple(ALPHA), tuple(BETA))
    stencil = recurrence_at_one(DeltaOperator.from_params(params), 0.0, 4096)
    coeffs = kernels.numpy_backend.hyp_coefficients(ALPHA, BETA, 0, 1 + 0j, 4096)
    init = np.array([1, 0, 0], dtype=complex)
    return {
        "hyp_coefficients (2^16)": ("hyp_coefficients", (ALPHA, BETA, 0, 1 + 0j, 2**16)),
        "series_chunk at x=1 (2^18)": ("series_chunk", (ALPHA, BETA, 1 + 0j, 0, 1 + 0j, 2**18)),
        "falling_weighted_cumsum (4096, j=2)": ("falling_weighted_cumsum", (coeffs, 2)),
        "horner_tail (4096)": ("horner_tail", (coeffs, 0.6 + 0j)),
        "solve_recurrence (4096 x 5)": ("solve_recurrence", (stencil, init, 4096), 1e-4),
        "derivative_sums (4096, k<=4)": ("derivative_sums", (coeffs, 0.25 + 0j, 0.6 + 0j, 4)),
    }


def best_of(fn, args, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    if kernels.numba_backend is None:
        raise SystemExit("numba is not importable; nothing to compare")

    print(f"{'kernel':40s} {'numpy [ms]':>12s} {'numba [ms]':>12s} {'speedup':>8s}")
    for label, (name, fargs, *tol) in cases().items():
        rtol = tol[0] if tol else 1e-9
        np_fn = getattr(kernels.numpy_backend, name)
        nb_fn = getattr(kernels.numba_backend, name)
        a, b = np_fn(*fargs), nb_fn(*fargs)  # also triggers compilation
        a = a if isinstance(a, tuple) else (a,)
        b = b if isinstance(b, tuple) else (b,)
        for x, y in zip(a, b):
            x, y = np.atleast_1d(x), np.atleast_1d(y)
            scale = max(np.abs(x).max(), 1e-300)
            assert np.allclose(x, y, rtol=rtol, atol=rtol * scale), label
        t_np = best_of(np_fn, fargs, args.repeat)
        t_nb = best_of(nb_fn, fargs, args.repeat)
        print(f"{label:40s} {1e3 * t_np:12.3f} {1e3 * t_nb:12.3f} {t_np / t_nb:8.1f}x")


if __name__ == "__main__":
    main()
