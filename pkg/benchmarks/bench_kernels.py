"""Compare the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--sizes 10 20 40]

Prints per-kernel best-of-repeat times and the speedup, then one full
CutMatch solve per backend.
"""

import argparse
import timeit

import numpy as np

from cutmatch import kernels
from cutmatch.affinity import build_affinity, build_similarity
from cutmatch.projections import CUTMATCH, bregman_project_zero_diag, direction_bounds
from cutmatch.solver import cutmatch_solve
from cutmatch.synthetic import SyntheticConfig, generate_joint

KERNELS = ("center", "bregman_zero_diag", "alternate_direction", "newton_direction")


def _feasible(rng, n):
    R = rng.random((n, n))
    X = bregman_project_zero_diag(R + R.T, 1e-12, 100000).X
    X = 0.5 * (X + X.T)
    np.fill_diagonal(X, 0.0)
    return X


def _calls(mod, n, rng):
    X = _feasible(rng, n)
    U = rng.standard_normal((n, n))
    U = np.ascontiguousarray(U + U.T)
    lo, hi = direction_bounds(X, 0.1, CUTMATCH)
    R = rng.random((n, n))
    return {
        "center": lambda: mod.center(U),
        "bregman_zero_diag": lambda: mod.bregman_zero_diag(R, 1e-8, 10000),
        "alternate_direction": lambda: mod.alternate_direction(U, lo, hi, 1e-8, 1000, False),
        "newton_direction": lambda: mod.newton_direction(U, lo, hi, 1e-12, 60, True),
    }


def _best(fn, repeat):
    number = max(1, int(0.05 / max(timeit.timeit(fn, number=1), 1e-7)))
    return min(timeit.repeat(fn, number=number, repeat=repeat)) / number


def _solve_time(mod, repeat):
    g, _ = generate_joint(SyntheticConfig(gamma=0.2, sigma=0.1, mu=0.3, rho=0.1, seed=0))
    A, W = build_affinity(g, 0.5), build_similarity(g, 5.0, 0.5)
    saved = {k: getattr(kernels, k) for k in KERNELS}
    try:
        for k in KERNELS:
            setattr(kernels, k, getattr(mod, k))
        return min(timeit.repeat(lambda: cutmatch_solve(A, W), number=1, repeat=repeat))
    finally:
        for k, v in saved.items():
            setattr(kernels, k, v)


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=5)
    p.add_argument("--sizes", type=int, nargs="+", default=[10, 20, 40])
    args = p.parse_args()

    py = kernels.get_backend("python")
    try:
        cy = kernels.get_backend("cython")
    except ImportError:
        print("compiled extension not built; run `python3 setup.py build_ext --inplace`")
        return 1

    print(f"{'kernel':<22}{'n':>4}{'python ms':>12}{'cython ms':>12}{'speedup':>9}")
    for n in args.sizes:
        cp = _calls(py, n, np.random.default_rng(n))
        cc = _calls(cy, n, np.random.default_rng(n))
        for name in KERNELS:
            tp = _best(cp[name], args.repeat)
            tc = _best(cc[name], args.repeat)
            print(f"{name:<22}{n:>4}{1e3 * tp:>12.4f}{1e3 * tc:>12.4f}{tp / tc:>8.1f}x")

    tp = _solve_time(py, max(1, args.repeat // 2))
    tc = _solve_time(cy, max(1, args.repeat // 2))
    print(f"\nfull CutMatch solve (n=40): python {tp:.3f} s, cython {tc:.3f} s, {tp / tc:.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
