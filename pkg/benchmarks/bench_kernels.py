"""Benchmark the numba kernels against the pure-numpy fallback.

Two representative workloads:

1. batched row reduction mod p (the inner loop of Hom/Ext computations and
   submodule scans),
2. orbit closure under the base-change group on the Kronecker moduli space
   of dimension (2, 2) (the class-enumeration validator).

Run:  python benchmarks/bench_kernels.py
Force one backend for the whole package with HALLCRYS_BACKEND=numpy|numba.
"""

import time

import numpy as np

from hallcrys._kernels import BACKEND, orbit_fill, rref_mod
from hallcrys.classtable import ClassTable
from hallcrys.quivers import quiver_kronecker


def bench_rref(backend, reps=4000, seed=0):
    rng = np.random.default_rng(seed)
    mats = [rng.integers(0, 5, (6, 8)) for _ in range(reps)]
    rref_mod(mats[0], 5, backend=backend)      # jit warm-up
    start = time.perf_counter()
    for m in mats:
        rref_mod(m, 5, backend=backend)
    return time.perf_counter() - start


def bench_orbits(backend, q=3):
    quiver = quiver_kronecker()
    table = ClassTable(quiver, q, (2, 2))
    dim = (2, 2)
    npoints = table._point_count(dim)
    machinery = table._orbit_machinery(dim)
    # warm-up on a single orbit
    visited = np.zeros(npoints, dtype=bool)
    orbit_fill([0], visited, *machinery, q, backend=backend)
    start = time.perf_counter()
    visited = np.zeros(npoints, dtype=bool)
    covered = 0
    code = 0
    orbits = 0
    while covered < npoints:
        while visited[code]:
            code += 1
        covered += orbit_fill([code], visited, *machinery, q, backend=backend)
        orbits += 1
    elapsed = time.perf_counter() - start
    return elapsed, orbits, npoints


def main():
    print(f"default backend: {BACKEND}")
    print(f"{'workload':<34}{'numba':>10}{'numpy':>10}{'speedup':>9}")
    t_nb = bench_rref("numba")
    t_np = bench_rref("numpy")
    print(f"{'rref mod 5, 4000 x (6x8)':<34}{t_nb:>9.3f}s{t_np:>9.3f}s"
          f"{t_np / t_nb:>8.1f}x")
    o_nb, orbits, pts = bench_orbits("numba")
    o_np, _, _ = bench_orbits("numpy")
    label = f"orbit partition E(2,2) q=3 ({pts} pts)"
    print(f"{label:<34}{o_nb:>9.3f}s{o_np:>9.3f}s{o_np / o_nb:>8.1f}x")
    print(f"({orbits} orbits found; both backends must agree exactly)")


if __name__ == "__main__":
    main()
