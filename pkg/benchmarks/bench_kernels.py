"""Compare the tour-construction backends on one pheromone snapshot.

Builds a pheromone table for the bundled berlin52 instance (or a seeded
random one), draws identical uniforms for every backend, then times batches
of tour constructions per backend. The numba kernel pays its compilation
cost in a warmup pass, so the timings reflect steady-state throughput.

Usage:
    python3 benchmarks/bench_kernels.py
    python3 benchmarks/bench_kernels.py --cities 100 --ants 200 --repeats 7
"""

import argparse
import time

import numpy as np

from antsweep.aco import PheromoneTable
from antsweep.kernels import construct_tour_with
from antsweep.tsp import DistanceMatrix, bundled_instance_path, parse_tsplib_file


def build_table(cities: int | None, seed: int) -> PheromoneTable:
    if cities is None:
        inst = parse_tsplib_file(bundled_instance_path())
        dmat = DistanceMatrix.from_instance(inst).d
    else:
        rng = np.random.default_rng(seed)
        pts = rng.uniform(0.0, 1000.0, size=(cities, 2))
        dx = pts[:, 0][:, None] - pts[:, 0][None, :]
        dy = pts[:, 1][:, None] - pts[:, 1][None, :]
        dmat = np.floor(np.sqrt(dx * dx + dy * dy) + 0.5).astype(np.int64)
        np.fill_diagonal(dmat, 0)
    return PheromoneTable.initial(dmat, 1.0)


def bench_backend(backend, table, uniforms, alpha, beta, repeats):
    log_tau, log_eta = table.log_arrays()
    args = (log_tau, log_eta, alpha, beta, table.dmat)
    construct_tour_with(backend, *args, uniforms[0])  # warmup / JIT
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        for u in uniforms:
            construct_tour_with(backend, *args, u)
        best = min(best, time.perf_counter() - start)
    return best / uniforms.shape[0]


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--cities", type=int, default=None,
                    help="random instance size (default: bundled berlin52)")
    ap.add_argument("--ants", type=int, default=150, help="tours per timed batch")
    ap.add_argument("--repeats", type=int, default=5, help="batches per backend; best wins")
    ap.add_argument("--alpha", type=float, default=1.0)
    ap.add_argument("--beta", type=float, default=3.0)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()

    table = build_table(args.cities, args.seed)
    n = table.dmat.shape[0]
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(args.seed)))
    uniforms = rng.random((args.ants, n))

    backends = ["numpy", "python"]
    try:
        construct_tour_with("numba", *table.log_arrays(), args.alpha, args.beta,
                            table.dmat, uniforms[0])
        backends.insert(0, "numba")
    except RuntimeError:
        print("numba backend unavailable; timing the fallbacks only")

    print(f"{n} cities, {args.ants} tours per batch, best of {args.repeats} batches")
    results = {}
    for backend in backends:
        per_tour = bench_backend(backend, table, uniforms, args.alpha, args.beta, args.repeats)
        results[backend] = per_tour
        print(f"  {backend:<7} {per_tour * 1e6:10.1f} us/tour  {1.0 / per_tour:10.0f} tours/s")
    slowest = max(results.values())
    for backend, per_tour in results.items():
        print(f"  {backend:<7} speedup vs slowest: {slowest / per_tour:6.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
