"""Compare the numba and numpy kernel paths.

Usage: python3 benchmarks/bench_kernels.py [--repeat N]
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from nandwalk import _kernels
from nandwalk.dynamics import basis_state, hamiltonian_from_graph
from nandwalk.graph import NandTreeSpec, build_system


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    g = build_system(20, 31, 0.48, NandTreeSpec(2, (1, 1, 1, 1)))
    h = hamiltonian_from_graph(g)
    src, dst, w = h.edge_list()
    psi0 = basis_state(g.n_sites, 1)
    dz = 0.01 / np.abs(w).max()
    nsteps = int(np.ceil(72.0 / dz))
    dz = 72.0 / nsteps

    rng = np.random.default_rng(0)
    probs = rng.random((2000, 501))
    labels = rng.integers(0, 5, 501)

    t0 = time.perf_counter()
    _kernels.rk4_integrate_numba(src, dst, w, psi0, dz, 1)
    _kernels.region_sums_numba(probs[:1], labels, 5)
    compile_s = time.perf_counter() - t0

    cases = [
        (
            f"rk4 {g.n_sites} sites x {nsteps} steps",
            lambda: _kernels.rk4_integrate_numpy(src, dst, w, psi0, dz, nsteps),
            lambda: _kernels.rk4_integrate_numba(src, dst, w, psi0, dz, nsteps),
        ),
        (
            "region sums 2000 x 501",
            lambda: _kernels.region_sums_numpy(probs, labels, 5),
            lambda: _kernels.region_sums_numba(probs, labels, 5),
        ),
    ]
    print(f"numba first-call overhead (compile or cache load): {compile_s:.3f} s")
    print(f"{'kernel':<32}{'numpy [ms]':>12}{'numba [ms]':>12}{'speedup':>10}")
    for name, f_np, f_nb in cases:
        a, b = best_of(f_np, args.repeat), best_of(f_nb, args.repeat)
        print(f"{name:<32}{a * 1e3:>12.2f}{b * 1e3:>12.2f}{a / b:>9.1f}x")


if __name__ == "__main__":
    main()
