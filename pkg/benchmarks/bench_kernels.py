"""Numba vs NumPy timings for the operator-assembly kernels.

Run: python3 benchmarks/bench_kernels.py [--sizes 500 1000 2000] [--repeat 5]

Each kernel pair is checked for agreement before timing.  Dense
diagonalization is LAPACK in both paths and is not benchmarked here.
"""
import argparse
import time

import numpy as np

from phsolve import kernels
from phsolve._accel import HAVE_NUMBA
from phsolve.grid import diff_matrix, make_grid
from phsolve.model import make_model
from phsolve.operators import build_pseudo


def best_of(fn, args, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - t0)
    return min(times)


def kernel_cases(n):
    grid = make_grid(-8.0, 8.0, n)
    x = grid.points
    d1 = np.ascontiguousarray(diff_matrix(grid, "first").matrix)
    d2 = np.ascontiguousarray(diff_matrix(grid, "second").matrix)
    f = -0.5 * x ** 2
    fp = -x
    w = np.exp(2.0 * f)
    offsets = np.array([-1, 0, 1])
    weights = np.array([1.0, -2.0, 1.0]) / grid.h ** 2
    return {
        "band_matrix": (n, offsets, weights),
        "symmetrized_product": (d1, fp),
        "similarity_scale": (d2, f),
        "column_scale": (d2, w),
        "congruence": (d2, f),
    }


def _first(out):
    return out[0] if isinstance(out, tuple) else out


def run(sizes, repeat):
    print(f"numba available: {HAVE_NUMBA}")
    if not HAVE_NUMBA:
        print("numba disabled or missing; only numpy timings are meaningful")
    print(f"{'kernel':<22}{'n':>6}{'numpy [ms]':>13}{'numba [ms]':>13}{'speedup':>10}")
    for n in sizes:
        for name, args in kernel_cases(n).items():
            f_np = getattr(kernels, f"{name}_numpy")
            f_nb = getattr(kernels, f"{name}_numba")
            ref, got = _first(f_np(*args)), _first(f_nb(*args))  # also triggers compilation
            if not np.allclose(ref, got, rtol=1e-13, atol=0.0):
                raise SystemExit(f"{name}: numba and numpy results disagree at n={n}")
            t_np = best_of(f_np, args, repeat)
            t_nb = best_of(f_nb, args, repeat)
            print(f"{name:<22}{n:>6}{t_np * 1e3:>13.3f}{t_nb * 1e3:>13.3f}{t_np / t_nb:>9.1f}x")
    model = make_model("harmonic_gauge")
    print(f"\nend-to-end build_pseudo ({'numba' if HAVE_NUMBA else 'numpy'} backend)")
    for n in sizes:
        grid = make_grid(-8.0, 8.0, n)
        for mode in ("continuum", "similarity"):
            build_pseudo(grid, model, mode=mode)
            t = best_of(build_pseudo, (grid, model, "central2", mode), repeat)
            print(f"  {mode:<11} n={n:<6} {t * 1e3:9.3f} ms")


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--sizes", type=int, nargs="+", default=[500, 1000, 2000])
    p.add_argument("--repeat", type=int, default=5)
    args = p.parse_args(argv)
    run(args.sizes, args.repeat)


if __name__ == "__main__":
    main()
