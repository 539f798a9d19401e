"""Time the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Also reports an end-to-end pipeline timing (norms on the depth-9 disk and
the grid-128 square eigensolve) under each backend, run in subprocesses so
that the backend switch is made at import time as in normal use.
"""

import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from poincare_dyadic import _pykernels

try:
    from poincare_dyadic import _ckernels
except ImportError:
    _ckernels = None


def cases(rng):
    terms = rng.standard_normal(200_000) * 10.0 ** rng.integers(-8, 8, 200_000)
    values = rng.standard_normal((4096, 64))
    weights = rng.random(64)
    grid = rng.standard_normal((255, 255))
    mask = (rng.random((255, 255)) < 0.9).astype(np.uint8)
    return [
        ("neumaier_sum (2e5 terms)", lambda k: k.neumaier_sum(terms)),
        ("weighted_power_rows (4096x64, e=3.5)", lambda k: k.weighted_power_rows(values, weights, 3.5)),
        ("weighted_power_rows (4096x64, e=2)", lambda k: k.weighted_power_rows(values, weights, 2.0)),
        ("laplacian_2d (255x255 masked)", lambda k: k.laplacian_2d(grid, mask, 16384.0, 16384.0)),
    ]


PIPELINE = """
import time
from poincare_dyadic import Domain, NormSpec, decompose, global_norms
from poincare_dyadic.geometry import unit_ball, unit_square
from poincare_dyadic.fields import bump
from poincare_dyadic.kernels import BACKEND
from poincare_dyadic.oracles import dirichlet_lambda1
t = time.perf_counter()
global_norms(bump(2), decompose(Domain(unit_ball()), 9), NormSpec(2.0, 4.0))
t1 = time.perf_counter()
dirichlet_lambda1(Domain(unit_square()), 128)
t2 = time.perf_counter()
print(BACKEND, t1 - t, t2 - t1)
"""


def pipeline(pure):
    env = dict(os.environ, POINCARE_DYADIC_PURE="1" if pure else "0")
    out = subprocess.run([sys.executable, "-c", PIPELINE], capture_output=True, text=True,
                         env=env, check=True).stdout.split()
    return out[0], float(out[1]), float(out[2])


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    rng = np.random.default_rng(0)
    if _ckernels is None:
        print("compiled extension not built; only the fallback is available")
    print(f"{'kernel':40s} {'python [ms]':>12s} {'cython [ms]':>12s} {'speedup':>8s}")
    for name, fn in cases(rng):
        t_py = min(timeit.repeat(lambda: fn(_pykernels), number=1, repeat=args.repeat)) * 1e3
        if _ckernels is None:
            print(f"{name:40s} {t_py:12.3f} {'-':>12s} {'-':>8s}")
            continue
        t_c = min(timeit.repeat(lambda: fn(_ckernels), number=1, repeat=args.repeat)) * 1e3
        print(f"{name:40s} {t_py:12.3f} {t_c:12.3f} {t_py / t_c:8.2f}")

    print()
    print(f"{'pipeline':40s} {'norms [s]':>12s} {'eigen [s]':>12s}")
    for pure in (True, False):
        backend, t_norms, t_eig = pipeline(pure)
        print(f"{'backend=' + backend:40s} {t_norms:12.3f} {t_eig:12.3f}")


if __name__ == "__main__":
    main()
