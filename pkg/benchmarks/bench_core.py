"""Compare the compiled extended-precision core with the numpy fallback.

Run with ``python3 benchmarks/bench_core.py [--sizes 20,40,80] [--repeat 3]``.
Prints one CSV row per (kernel, size, backend) with the best wall time in
seconds and the speedup of the compiled core over the fallback.
"""

from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from kernstab import _core_py
from kernstab._backend import COMPILED, core
from kernstab.gram import REL_TOL, assemble
from kernstab.kernels import make_sobolev
from kernstab.pointsets import generate


def _jacobi(mod, a):
    m = a.copy()
    v = np.eye(a.shape[0], dtype=np.longdouble)
    mod.jacobi_eigh(m, v, np.longdouble(REL_TOL), np.longdouble(0), 100)


def _cholesky_solve(mod, a):
    lower = a.copy()
    mod.cholesky(lower)
    b = np.eye(a.shape[0], dtype=np.longdouble)
    mod.forward_solve(lower, b)
    mod.back_solve_t(lower, b)


def best_time(fn, mod, a, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(mod, a)
        times.append(time.perf_counter() - t0)
    return min(times)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", default="20,40,80")
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args(argv)
    if not COMPILED:
        print("compiled core not built; run `pip install -e . --no-build-isolation`", file=sys.stderr)
        return 1
    kernel = make_sobolev(2.0, 1)
    print("routine,n,compiled_s,fallback_s,speedup")
    for n in (int(s) for s in args.sizes.split(",")):
        a = np.ascontiguousarray(assemble(kernel, generate("grid", n, 1)).extended)
        for name, fn in (("jacobi", _jacobi), ("cholesky_solve", _cholesky_solve)):
            fast = best_time(fn, core, a, args.repeat)
            slow = best_time(fn, _core_py, a, args.repeat)
            print(f"{name},{n},{fast:.4g},{slow:.4g},{slow / fast:.1f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
