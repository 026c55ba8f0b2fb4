#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-numpy fallback.

Times the two hot paths that dominate experiment runtime: full state-vector
circuit execution and noisy density-matrix execution.  Run:

    python3 benchmarks/bench_kernels.py [--n 5] [--depth 6] [--repeat 2000]

The package-wide selection is controlled by QAOA_MVC_PURE_NUMPY; this script
imports both implementations directly, so it measures both regardless of the
environment flag.
"""

import argparse
import time

import numpy as np

from qaoa_mvc import _kernels_numpy
from qaoa_mvc.circuits import QaoaParams, build_qaoa_circuit
from qaoa_mvc.graphs import enumerate_connected_graphs
from qaoa_mvc.hamiltonian import PenaltyWeights, build_ising
from qaoa_mvc.noise import NoiseModel

try:
    from qaoa_mvc import _kernels_numba
except ImportError:
    _kernels_numba = None


def bench(fn, args, repeat):
    fn(*args)  # warm-up / JIT compile
    start = time.perf_counter()
    for _ in range(repeat):
        fn(*args)
    return (time.perf_counter() - start) / repeat


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, default=5, help="qubit count (graph vertices)")
    parser.add_argument("--depth", type=int, default=6, help="ansatz layers")
    parser.add_argument("--repeat", type=int, default=2000, help="timed iterations (statevector)")
    args = parser.parse_args()

    graphs = [g for g in enumerate_connected_graphs(args.n) if g.is_connected()]
    g = graphs[len(graphs) // 2]
    h = build_ising(g, PenaltyWeights())
    rng = np.random.Generator(np.random.PCG64(1))
    params = QaoaParams(tuple(rng.uniform(0, 2 * np.pi, args.depth)),
                        tuple(rng.uniform(0, 2 * np.pi, args.depth)))
    kinds, qa, qb, thetas = build_qaoa_circuit(h, params).to_arrays()
    ch = NoiseModel.default().channel_arrays(args.n)
    sv_args = (args.n, kinds, qa, qb, thetas)
    dm_args = (args.n, kinds, qa, qb, thetas,
               ch["p1q"], ch["gad1"], ch["f1"], ch["p2"], ch["gad2"], ch["f2"])
    dm_repeat = max(1, args.repeat // 10)

    print(f"graph: {args.n} vertices, {len(g.edges)} edges; depth {args.depth}; "
          f"{kinds.size} gates")
    rows = [("kernel", "statevector run", "noisy density run")]
    t_np_sv = bench(_kernels_numpy.sv_run, sv_args, args.repeat)
    t_np_dm = bench(_kernels_numpy.dm_run, dm_args, dm_repeat)
    rows.append(("numpy", f"{t_np_sv * 1e6:9.1f} us", f"{t_np_dm * 1e6:9.1f} us"))
    if _kernels_numba is not None:
        t_nb_sv = bench(_kernels_numba.sv_run, sv_args, args.repeat)
        t_nb_dm = bench(_kernels_numba.dm_run, dm_args, dm_repeat)
        rows.append(("numba", f"{t_nb_sv * 1e6:9.1f} us", f"{t_nb_dm * 1e6:9.1f} us"))
        rows.append(("speedup", f"{t_np_sv / t_nb_sv:8.1f}x", f"{t_np_dm / t_nb_dm:8.1f}x"))
    else:
        rows.append(("numba", "unavailable", "unavailable"))

    widths = [max(len(r[i]) for r in rows) for i in range(3)]
    for r in rows:
        print("  ".join(c.rjust(w) for c, w in zip(r, widths)))


if __name__ == "__main__":
    main()
