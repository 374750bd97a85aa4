"""In-process map/combine/reduce engine for ACO iterations.

One job covers one colony iteration. The map phase emits, per ant, a
best-tour candidate record plus one deposit record per tour edge; an
optional combiner folds each partition's records into one candidate and one
partial sum per edge; the reducer takes the global minimum and applies
tau' = rho * tau + sum(deposits).

Determinism contract: ants are split into a fixed number of contiguous
partitions that does not depend on the worker-thread count, partition
outputs are consumed in partition order, and every per-ant random stream is
derived from (run entropy, iteration, ant index). Outputs therefore depend
only on the job definition, never on scheduling. Combiner on/off changes
floating-point grouping only (per-edge sums agree to ~1e-12 relative).

Persist mode externalizes the loop state: each iteration reads the
pheromone table from CSV and writes its successor, an ants file fixes the
colony size, and a log records every improvement of the best tour.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .aco import AcoParams, PheromoneTable, RunRecord, delta_tau, encode_path
from .tsp import DistanceMatrix, Instance

DEFAULT_PARTITIONS = 8

BEST_KEY = ("best",)

PHEROMONE_HEADER = ["source", "destination", "distance", "pheromones"]
ANTS_HEADER = "ant"
LOG_HEADER = "iteration,best_length,encoded_path"

Record = tuple[tuple, object]


@dataclass
class JobSpec:
    """One iteration's inputs. The pheromone table and the ant count may be
    given in memory or as file paths (persist mode uses the latter)."""

    params: AcoParams
    iteration: int
    entropy: tuple[int, ...]
    table: PheromoneTable | None = None
    table_path: str | Path | None = None
    n_ants: int | None = None
    ants_path: str | Path | None = None

    def resolve_table(self) -> PheromoneTable:
        if self.table is not None:
            return self.table
        if self.table_path is not None:
            return read_pheromone_csv(self.table_path)
        raise ValueError("job has neither an in-memory table nor a table path")

    def resolve_ants(self) -> int:
        if self.n_ants is not None:
            n = self.n_ants
        elif self.ants_path is not None:
            n = read_ants_file(self.ants_path)
        else:
            n = self.params.m
        if n < 1:
            raise ValueError(f"ant count must be >= 1, got {n}")
        return n


@dataclass(frozen=True)
class JobResult:
    best_length: int
    best_path: tuple[int, ...]
    table: PheromoneTable


def _ant_uniforms(entropy: tuple[int, ...], iteration: int, ant_index: int, n: int) -> np.ndarray:
    """Counter-derived uniforms for one ant: a pure function of
    (entropy, iteration, ant), independent of scheduling."""
    ss = np.random.SeedSequence(entropy=list(entropy), spawn_key=(iteration, ant_index))
    return np.random.Generator(np.random.Philox(ss)).random(n)


def map_ant(ant_index: int, job: JobSpec, table: PheromoneTable) -> list[Record]:
    """Construct one tour; emit its best-tour candidate and n edge deposits."""
    log_tau, log_eta = table.log_arrays()
    n = table.n
    uniforms = _ant_uniforms(job.entropy, job.iteration, ant_index, n)
    path, length = kernels.construct_tour(
        log_tau, log_eta, job.params.alpha, job.params.beta, table.dmat, uniforms
    )
    tour = tuple(int(c) for c in path)
    records: list[Record] = [(BEST_KEY, (length, tour))]
    for key, val in delta_tau(path, length, job.params.q_deposit).items():
        records.append((("edge", key[0], key[1]), val))
    return records


def combine(records: Iterable[Record]) -> list[Record]:
    """Partition-local fold: min best-tour candidate, per-edge partial sums.

    Edge partials are accumulated and emitted in first-seen (ant) order, so
    the fold is a pure regrouping of the reducer's own arithmetic.
    """
    best = None
    sums: dict[tuple, float] = {}
    order: list[tuple] = []
    for key, val in records:
        if key == BEST_KEY:
            if best is None or val < best:
                best = val
        else:
            if key not in sums:
                sums[key] = 0.0
                order.append(key)
            sums[key] += val
    out: list[Record] = []
    if best is not None:
        out.append((BEST_KEY, best))
    out.extend((key, sums[key]) for key in order)
    return out


def reduce_records(
    records: Iterable[Record], table: PheromoneTable, rho: float
) -> tuple[int, tuple[int, ...], PheromoneTable]:
    """Global fold: minimum tour (ties broken by path, lexicographically)
    and the pheromone update tau' = rho * tau + sum(deposits)."""
    best = None
    sums: dict[tuple, float] = {}
    for key, val in records:
        if key == BEST_KEY:
            if best is None or val < best:
                best = val
        else:
            sums[key] = sums.get(key, 0.0) + val
    if best is None:
        raise ValueError("no best-tour records reached the reducer")
    tau = rho * table.tau
    for key in sorted(sums):
        _, a, b = key
        tau[a, b] += sums[key]
        if a != b:
            tau[b, a] += sums[key]
    return best[0], best[1], PheromoneTable(table.dmat, tau)


def _partition_bounds(n_ants: int, n_partitions: int) -> list[tuple[int, int]]:
    """Contiguous ant-index ranges; a function of counts only, never of the
    worker pool, so outputs cannot depend on thread scheduling."""
    if n_partitions < 1:
        raise ValueError(f"partition count must be >= 1, got {n_partitions}")
    bounds = []
    base, extra = divmod(n_ants, n_partitions)
    lo = 0
    for p in range(n_partitions):
        hi = lo + base + (1 if p < extra else 0)
        if hi > lo:
            bounds.append((lo, hi))
        lo = hi
    return bounds


def run_job(
    job: JobSpec,
    *,
    workers: int = 1,
    use_combiner: bool = True,
    n_partitions: int = DEFAULT_PARTITIONS,
) -> JobResult:
    """Execute one iteration: map over ants, optionally combine per
    partition, reduce globally."""
    table = job.resolve_table()
    n_ants = job.resolve_ants()
    bounds = _partition_bounds(n_ants, n_partitions)

    def run_partition(span: tuple[int, int]) -> list[Record]:
        lo, hi = span
        records: list[Record] = []
        for k in range(lo, hi):
            records.extend(map_ant(k, job, table))
        return combine(records) if use_combiner else records

    if workers <= 1:
        partition_outputs = [run_partition(span) for span in bounds]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            partition_outputs = list(pool.map(run_partition, bounds))

    merged: list[Record] = []
    for out in partition_outputs:  # partition order, not completion order
        merged.extend(out)
    length, path, new_table = reduce_records(merged, table, job.params.rho)
    return JobResult(best_length=length, best_path=path, table=new_table)


def run_iterations(
    instance: Instance | DistanceMatrix | np.ndarray,
    params: AcoParams,
    entropy: int | tuple[int, ...],
    *,
    workers: int = 1,
    use_combiner: bool = True,
    n_partitions: int = DEFAULT_PARTITIONS,
    persist_dir: str | Path | None = None,
    tuple_index: int = -1,
    run_index: int = 0,
) -> RunRecord:
    """Chain params.iterations jobs from a fresh tau0 table.

    With ``persist_dir`` the pheromone state round-trips through CSV between
    iterations and improvements are appended to ``shortest.log``; results are
    identical to the in-memory chain.
    """
    if isinstance(instance, Instance):
        dmat = DistanceMatrix.from_instance(instance).d
    elif isinstance(instance, DistanceMatrix):
        dmat = instance.d
    else:
        dmat = np.asarray(instance)
    if isinstance(entropy, int):
        entropy = (entropy,)
    table = PheromoneTable.initial(dmat, params.tau0)

    persist = Path(persist_dir) if persist_dir is not None else None
    log_fh = None
    if persist is not None:
        persist.mkdir(parents=True, exist_ok=True)
        write_ants_file(persist / "ants.csv", params.m)
        write_pheromone_csv(table, persist / "pheromone_0000.csv")
        log_fh = open(persist / "shortest.log", "w")
        log_fh.write(LOG_HEADER + "\n")

    best_length: int | None = None
    best_path: tuple[int, ...] = ()
    iteration_bests: list[int] = []
    try:
        for it in range(params.iterations):
            if persist is not None:
                job = JobSpec(
                    params=params,
                    iteration=it,
                    entropy=entropy,
                    table_path=persist / f"pheromone_{it:04d}.csv",
                    ants_path=persist / "ants.csv",
                )
            else:
                job = JobSpec(params=params, iteration=it, entropy=entropy, table=table)
            result = run_job(
                job, workers=workers, use_combiner=use_combiner, n_partitions=n_partitions
            )
            iteration_bests.append(result.best_length)
            if best_length is None or result.best_length < best_length:
                best_length = result.best_length
                best_path = result.best_path
                if log_fh is not None:
                    log_fh.write(f"{it},{best_length},{encode_path(best_path)}\n")
            if persist is not None:
                write_pheromone_csv(result.table, persist / f"pheromone_{it + 1:04d}.csv")
            table = result.table
    finally:
        if log_fh is not None:
            log_fh.close()

    assert best_length is not None
    return RunRecord(
        tuple_index=tuple_index,
        run_index=run_index,
        iteration_bests=tuple(iteration_bests),
        best_length=best_length,
        best_path=best_path,
    )


def write_pheromone_csv(table: PheromoneTable, path: str | Path) -> None:
    """One row per undirected edge (source < destination), row-major order.
    Pheromone values use 17 significant digits so float64 round-trips
    exactly."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(PHEROMONE_HEADER)
        n = table.n
        for a in range(n):
            for b in range(a + 1, n):
                writer.writerow([a, b, int(table.dmat[a, b]), "%.17g" % table.tau[a, b]])


def read_pheromone_csv(path: str | Path) -> PheromoneTable:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != PHEROMONE_HEADER:
            raise ValueError(f"bad pheromone CSV header {header!r}")
        rows = []
        for row in reader:
            if not row:
                continue
            if len(row) != 4:
                raise ValueError(f"pheromone CSV row has {len(row)} fields: {row!r}")
            a, b = int(row[0]), int(row[1])
            if a >= b:
                raise ValueError(f"pheromone CSV edge must have source < destination: {row!r}")
            rows.append((a, b, int(row[2]), float(row[3])))
    if not rows:
        raise ValueError("pheromone CSV has no edges")
    n = max(b for _, b, _, _ in rows) + 1
    expected = n * (n - 1) // 2
    if len(rows) != expected:
        raise ValueError(f"pheromone CSV has {len(rows)} edges, expected {expected} for n={n}")
    dmat = np.zeros((n, n), dtype=np.int64)
    tau = np.zeros((n, n))
    for a, b, d, t in rows:
        dmat[a, b] = dmat[b, a] = d
        tau[a, b] = tau[b, a] = t
    return PheromoneTable(dmat, tau)  # constructor pins the unused diagonal


def write_ants_file(path: str | Path, n_ants: int) -> None:
    """Header plus one row per ant; the engine only counts the rows."""
    with open(path, "w") as fh:
        fh.write(ANTS_HEADER + "\n")
        for k in range(n_ants):
            fh.write(f"{k}\n")


def read_ants_file(path: str | Path) -> int:
    with open(path) as fh:
        lines = [ln for ln in (raw.strip() for raw in fh) if ln]
    if not lines or lines[0] != ANTS_HEADER:
        raise ValueError(f"ants file must start with '{ANTS_HEADER}' header")
    n = len(lines) - 1
    if n < 1:
        raise ValueError("ants file lists no ants")
    return n


def read_shortest_log(path: str | Path) -> list[tuple[int, int, tuple[int, ...]]]:
    """Parsed improvement log rows: (iteration, best_length, path)."""
    from .aco import decode_path

    out = []
    with open(path) as fh:
        header = fh.readline().strip()
        if header != LOG_HEADER:
            raise ValueError(f"bad shortest log header {header!r}")
        for raw in fh:
            raw = raw.strip()
            if not raw:
                continue
            it, length, enc = raw.split(",")
            out.append((int(it), int(length), decode_path(enc)))
    return out
