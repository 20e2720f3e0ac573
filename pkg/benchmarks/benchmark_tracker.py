"""Compare the numba and numpy tracking backends on identical workloads.

Both backends run the same path-tracking code; the numba one compiles it
with ``numba.njit`` (cached, so the first run pays a one-time cost that
is reported separately).  Usage:

    python3 benchmarks/benchmark_tracker.py [--buses N] [--cases K] [--threads T]
"""

import argparse
import os
import time

from gridroots._kernels import get_kernels, numba_available
from gridroots.casegen import GenConfig, generate_case_on_topology
from gridroots.cliques import Graph
from gridroots.homotopy import TrackerConfig, solve_all
from gridroots.pfmodel import build_pf_system


def complete_graph(n):
    return Graph(n, frozenset((i, j) for i in range(1, n + 1)
                              for j in range(i + 1, n + 1)))


def run(backend, systems, threads):
    os.environ["GRIDROOTS_BACKEND"] = backend
    results = []
    t0 = time.perf_counter()
    for seed, sys_ in systems:
        results.append(solve_all(sys_, TrackerConfig(seed=seed),
                                 threads=threads))
    elapsed = time.perf_counter() - t0
    return elapsed, results


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--buses", type=int, default=4)
    ap.add_argument("--cases", type=int, default=10)
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()

    graph = complete_graph(args.buses)
    systems = []
    for seed in range(args.cases):
        net = generate_case_on_topology(GenConfig(n_buses=args.buses,
                                                  seed=seed), graph)
        systems.append((seed, build_pf_system(net)))
    paths = args.cases * 4 ** (args.buses - 1)
    print(f"{args.cases} complete {args.buses}-bus cases, "
          f"{paths} paths total, {args.threads} thread(s)")

    saved = os.environ.get("GRIDROOTS_BACKEND")
    try:
        if numba_available():
            t0 = time.perf_counter()
            get_kernels("numba")
            warm = time.perf_counter() - t0
            print(f"numba compile/load (one-time, cached): {warm:.2f} s")
            numba_time, numba_results = run("numba", systems, args.threads)
            print(f"numba backend: {numba_time:.3f} s "
                  f"({1e3 * numba_time / paths:.2f} ms/path)")
        else:
            numba_results = None
            print("numba backend: unavailable")

        numpy_time, numpy_results = run("numpy", systems, args.threads)
        print(f"numpy backend: {numpy_time:.3f} s "
              f"({1e3 * numpy_time / paths:.2f} ms/path)")

        if numba_results is not None:
            agree = all(a.num_finite_complex == b.num_finite_complex
                        and a.num_real == b.num_real
                        for a, b in zip(numba_results, numpy_results))
            print(f"speedup numpy/numba: {numpy_time / numba_time:.1f}x, "
                  f"solution counts agree: {agree}")
    finally:
        if saved is None:
            os.environ.pop("GRIDROOTS_BACKEND", None)
        else:
            os.environ["GRIDROOTS_BACKEND"] = saved


if __name__ == "__main__":
    main()
