"""Three-stage evaluation pipeline: explore, exploit, evaluate.

Exploration screens every sampled parameter tuple with a few short runs and
ranks tuples by mean best length. Exploitation reruns the top tuples longer,
fits the four candidate families to each tuple's best-length sample, and
ranks tuples by the AICc winner's P(X <= optimum). Evaluation bootstraps
that probability for an uncertainty interval.

Every stage writes CSV artifacts plus a report.json under its own
subdirectory of the output root, and stages can be rerun individually from
those files. All randomness derives from (seed, stage, tuple, run), so a
repeated invocation with one seed reproduces the output tree byte for byte.
"""

from __future__ import annotations

import csv
import hashlib
import json
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import bootstrap as bs
from . import engine, fitstats, kernels, tsp
from .aco import AcoParams, RunRecord, encode_path
from .sampling import (
    ParameterSpace,
    ParameterTuple,
    default_space,
    read_tuples_csv,
    saltelli_sample,
    write_tuples_csv,
)

STAGE_EXPLORATION = 1
STAGE_EXPLOITATION = 2
STAGE_EVALUATION = 3


class PipelineError(RuntimeError):
    """A stage failed at runtime."""


class MissingInputError(Exception):
    """A stage prerequisite (instance or earlier-stage artifact) is absent."""


@dataclass
class EEEConfig:
    """Full study configuration; defaults reproduce the desk-scale berlin52
    sweep (48 tuples, 3x10 screening, 10x30 on the top 5, 10000 resamples)."""

    out: Path
    instance: Path | None = None  # None: bundled berlin52
    optimum: int = 7542
    seed: int = 1
    space: ParameterSpace = field(default_factory=default_space)
    n_base: int = 8
    exploration_runs: int = 3
    exploration_iterations: int = 10
    top_count: int = 5
    exploitation_runs: int = 10
    exploitation_iterations: int = 30
    bootstrap_resamples: int = 10000
    bootstrap_size: int | None = None  # None: the exploitation sample size
    ci_level: float = 0.95
    tau0: float = 1.0
    q_deposit: float = 1000.0
    workers: int = 1
    use_combiner: bool = True
    n_partitions: int = engine.DEFAULT_PARTITIONS
    persist_pheromones: bool = False
    dump_probabilities: bool = False

    def __post_init__(self):
        self.out = Path(self.out)
        if self.instance is not None:
            self.instance = Path(self.instance)
        for name in (
            "n_base",
            "exploration_runs",
            "exploration_iterations",
            "top_count",
            "exploitation_runs",
            "exploitation_iterations",
            "bootstrap_resamples",
            "workers",
            "n_partitions",
        ):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.exploitation_runs < 3:
            raise ValueError("exploitation_runs must be >= 3 to support fitting")

    def apply_smoke_profile(self) -> None:
        """Shrink every knob for a seconds-long end-to-end check."""
        self.n_base = 2
        self.exploration_runs = 1
        self.exploration_iterations = 2
        self.exploitation_runs = 3
        self.exploitation_iterations = 2
        self.bootstrap_resamples = 50
        self.top_count = min(self.top_count, 2 * (self.space.dimension + 2))


def config_hash(cfg: EEEConfig) -> str:
    """SHA-256 over the scientific knobs. The output directory and worker
    count are excluded: neither may influence results."""
    lines = [
        f"instance={cfg.instance if cfg.instance is not None else 'bundled:berlin52'}",
        f"optimum={cfg.optimum}",
        f"seed={cfg.seed}",
        f"n_base={cfg.n_base}",
        f"exploration={cfg.exploration_runs}x{cfg.exploration_iterations}",
        f"top={cfg.top_count}",
        f"exploitation={cfg.exploitation_runs}x{cfg.exploitation_iterations}",
        f"bootstrap={cfg.bootstrap_resamples},{cfg.bootstrap_size},{cfg.ci_level}",
        f"tau0={cfg.tau0!r}",
        f"q_deposit={cfg.q_deposit!r}",
        f"combiner={cfg.use_combiner}",
        f"partitions={cfg.n_partitions}",
        f"persist={cfg.persist_pheromones}",
        f"dump_probabilities={cfg.dump_probabilities}",
    ]
    for dim in cfg.space.dims:
        lines.append(f"space.{dim.name}={dim.low!r},{dim.high!r},{dim.kind}")
    return hashlib.sha256("\n".join(sorted(lines)).encode()).hexdigest()


def provenance(cfg: EEEConfig) -> dict:
    return {"seed": cfg.seed, "config_sha256": config_hash(cfg), "backend": kernels.BACKEND}


def load_instance(cfg: EEEConfig) -> tsp.Instance:
    path = cfg.instance if cfg.instance is not None else tsp.bundled_instance_path()
    if not Path(path).exists():
        raise MissingInputError(f"instance file not found: {path}")
    return tsp.parse_tsplib_file(path)


@dataclass
class TupleRuns:
    """All runs of one parameter tuple within one stage."""

    params: ParameterTuple
    records: list[RunRecord]
    error: str | None = None

    @property
    def tuple_index(self) -> int:
        return self.params.index

    @property
    def ok(self) -> bool:
        return self.error is None

    def bests(self) -> np.ndarray:
        return np.array([r.best_length for r in self.records], dtype=np.float64)


def _aco_params(cfg: EEEConfig, t: ParameterTuple, iterations: int) -> AcoParams:
    return AcoParams(
        alpha=t.alpha,
        beta=t.beta,
        rho=t.rho,
        m=t.ants,
        iterations=iterations,
        tau0=cfg.tau0,
        q_deposit=cfg.q_deposit,
    )


def _run_tuple(
    cfg: EEEConfig,
    dmat: np.ndarray,
    t: ParameterTuple,
    stage_id: int,
    runs: int,
    iterations: int,
    persist_root: Path | None,
) -> TupleRuns:
    try:
        params = _aco_params(cfg, t, iterations)
        records = []
        for r in range(runs):
            persist_dir = None
            if persist_root is not None:
                persist_dir = persist_root / f"tuple_{t.index:02d}" / f"run_{r:02d}"
            records.append(
                engine.run_iterations(
                    dmat,
                    params,
                    (cfg.seed, stage_id, t.index, r),
                    workers=cfg.workers,
                    use_combiner=cfg.use_combiner,
                    n_partitions=cfg.n_partitions,
                    persist_dir=persist_dir,
                    tuple_index=t.index,
                    run_index=r,
                )
            )
        return TupleRuns(params=t, records=records)
    except Exception as exc:  # a broken tuple must not sink the sweep
        return TupleRuns(params=t, records=[], error=f"{type(exc).__name__}: {exc}")


# ---------------------------------------------------------------- sampling


def run_sampling(cfg: EEEConfig) -> list[ParameterTuple]:
    tuples = saltelli_sample(cfg.space, cfg.n_base)
    cfg.out.mkdir(parents=True, exist_ok=True)
    write_tuples_csv(tuples, cfg.out / "tuples.csv")
    return tuples


def load_tuples(cfg: EEEConfig) -> list[ParameterTuple]:
    path = cfg.out / "tuples.csv"
    if not path.exists():
        raise MissingInputError(f"{path} not found; run the sample stage first")
    return read_tuples_csv(path)


# -------------------------------------------------------------- exploration


@dataclass
class ExplorationReport:
    entries: list[TupleRuns]
    ranking: list[int]  # tuple indices, best first, failed tuples last

    def entry(self, tuple_index: int) -> TupleRuns:
        for e in self.entries:
            if e.tuple_index == tuple_index:
                return e
        raise KeyError(tuple_index)


def _rank_exploration(entries: list[TupleRuns]) -> list[int]:
    ok = [e for e in entries if e.ok]
    failed = [e for e in entries if not e.ok]
    ok.sort(key=lambda e: (float(e.bests().mean()), e.tuple_index))
    failed.sort(key=lambda e: e.tuple_index)
    return [e.tuple_index for e in ok + failed]


def run_exploration(
    cfg: EEEConfig, tuples: list[ParameterTuple], dmat: np.ndarray
) -> ExplorationReport:
    stage_dir = cfg.out / "exploration"
    stage_dir.mkdir(parents=True, exist_ok=True)
    persist_root = stage_dir / "pheromones" if cfg.persist_pheromones else None
    entries = [
        _run_tuple(
            cfg, dmat, t, STAGE_EXPLORATION, cfg.exploration_runs, cfg.exploration_iterations,
            persist_root,
        )
        for t in tuples
    ]
    report = ExplorationReport(entries=entries, ranking=_rank_exploration(entries))
    _write_runs_csv(stage_dir / "runs.csv", entries)
    _write_boxplot_csv(stage_dir / "boxplot.csv", entries)
    _write_exploration_ranking(stage_dir / "ranking.csv", report)
    rows = []
    for e in entries:
        row = {"tuple_index": e.tuple_index, "status": "ok" if e.ok else f"failed:{e.error}"}
        if e.ok:
            b = e.bests()
            row.update(
                mean_best=float(b.mean()),
                median_best=float(np.median(b)),
                min_best=int(b.min()),
            )
        rows.append(row)
    _write_report_json(
        stage_dir / "report.json", "exploration", report.ranking, rows, provenance(cfg)
    )
    return report


def _write_exploration_ranking(path: Path, report: ExplorationReport) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(
            ["rank", "tuple_index", "alpha", "beta", "rho", "ants",
             "mean_best", "median_best", "min_best", "status"]
        )
        for rank, idx in enumerate(report.ranking):
            e = report.entry(idx)
            t = e.params
            if e.ok:
                b = e.bests()
                stats = [repr(float(b.mean())), repr(float(np.median(b))), int(b.min()), "ok"]
            else:
                stats = ["", "", "", f"failed:{e.error}"]
            writer.writerow([rank, idx, repr(t.alpha), repr(t.beta), repr(t.rho), t.ants, *stats])


def select_top(cfg: EEEConfig, tuples: list[ParameterTuple], ranking_ok: list[int]) -> list[ParameterTuple]:
    """The top tuples (by exploration rank) to carry into exploitation."""
    if not ranking_ok:
        raise PipelineError("exploration produced no successful tuples")
    if len(ranking_ok) < cfg.top_count:
        print(
            f"warning: only {len(ranking_ok)} tuples succeeded; "
            f"carrying all of them instead of {cfg.top_count}",
            file=sys.stderr,
        )
    chosen = ranking_ok[: cfg.top_count]
    by_index = {t.index: t for t in tuples}
    return [by_index[i] for i in chosen]


def load_top_tuples(cfg: EEEConfig) -> list[ParameterTuple]:
    """Rebuild the exploitation input from exploration's ranking file."""
    path = cfg.out / "exploration" / "ranking.csv"
    if not path.exists():
        raise MissingInputError(f"{path} not found; run the explore stage first")
    ranking_ok = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            if row["status"] == "ok":
                ranking_ok.append(int(row["tuple_index"]))
    return select_top(cfg, load_tuples(cfg), ranking_ok)


# ------------------------------------------------------------- exploitation


@dataclass
class ExploitationEntry:
    runs: TupleRuns
    fits: list[fitstats.FamilyFit]  # AICc order; empty when runs failed

    @property
    def tuple_index(self) -> int:
        return self.runs.tuple_index

    @property
    def winner(self) -> fitstats.FamilyFit | None:
        for ff in self.fits:
            if ff.ok:
                return ff
        return None

    @property
    def status(self) -> str:
        if not self.runs.ok:
            return f"failed:{self.runs.error}"
        if self.winner is None:
            reasons = "; ".join(f"{ff.family}: {ff.error}" for ff in self.fits)
            return f"failed:no family could be fit ({reasons})"
        return "ok"


@dataclass
class ExploitationReport:
    entries: list[ExploitationEntry]
    ranking: list[int]

    def entry(self, tuple_index: int) -> ExploitationEntry:
        for e in self.entries:
            if e.tuple_index == tuple_index:
                return e
        raise KeyError(tuple_index)


def _rank_exploitation(entries: list[ExploitationEntry]) -> list[int]:
    ok = [e for e in entries if e.status == "ok"]
    failed = [e for e in entries if e.status != "ok"]
    ok.sort(key=lambda e: (-e.winner.metrics.p_le_optimum, e.tuple_index))
    failed.sort(key=lambda e: e.tuple_index)
    return [e.tuple_index for e in ok + failed]


def run_exploitation(
    cfg: EEEConfig, top_tuples: list[ParameterTuple], dmat: np.ndarray
) -> ExploitationReport:
    stage_dir = cfg.out / "exploitation"
    (stage_dir / "fits").mkdir(parents=True, exist_ok=True)
    (stage_dir / "qq").mkdir(parents=True, exist_ok=True)
    persist_root = stage_dir / "pheromones" if cfg.persist_pheromones else None
    entries = []
    for t in top_tuples:
        runs = _run_tuple(
            cfg, dmat, t, STAGE_EXPLOITATION, cfg.exploitation_runs,
            cfg.exploitation_iterations, persist_root,
        )
        fits: list[fitstats.FamilyFit] = []
        if runs.ok:
            fits = fitstats.rank_families(runs.bests(), float(cfg.optimum))
            _write_tuple_fit_outputs(stage_dir, t.index, runs.bests(), fits)
        entries.append(ExploitationEntry(runs=runs, fits=fits))
    report = ExploitationReport(entries=entries, ranking=_rank_exploitation(entries))
    _write_runs_csv(stage_dir / "runs.csv", [e.runs for e in entries])
    _write_boxplot_csv(stage_dir / "boxplot.csv", [e.runs for e in entries])
    _write_exploitation_ranking(stage_dir / "ranking.csv", report)
    rows = []
    for e in entries:
        row = {"tuple_index": e.tuple_index, "status": e.status}
        if e.status == "ok":
            w = e.winner
            row.update(
                family=w.family,
                params=list(w.fit.params),
                p_le_optimum=w.metrics.p_le_optimum,
                aicc=w.metrics.aicc,
            )
        rows.append(row)
    _write_report_json(
        stage_dir / "report.json", "exploitation", report.ranking, rows, provenance(cfg)
    )
    return report


def _write_tuple_fit_outputs(
    stage_dir: Path, tuple_index: int, sample: np.ndarray, fits: list[fitstats.FamilyFit]
) -> None:
    fitstats.write_fit_report(fits, stage_dir / "fits" / f"tuple_{tuple_index:02d}.csv")
    for ff in fits:
        if not ff.ok:
            continue
        theo, emp = fitstats.qq_points(sample, ff.fit)
        fitstats.write_qq_csv(theo, emp, stage_dir / "qq" / f"tuple_{tuple_index:02d}_{ff.family}.csv")


def _write_exploitation_ranking(path: Path, report: ExploitationReport) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(
            ["rank", "tuple_index", "family", "p_le_optimum", "param1", "param2", "aicc", "status"]
        )
        for rank, idx in enumerate(report.ranking):
            e = report.entry(idx)
            if e.status == "ok":
                w = e.winner
                writer.writerow(
                    [rank, idx, w.family, repr(w.metrics.p_le_optimum),
                     repr(w.fit.params[0]), repr(w.fit.params[1]), repr(w.metrics.aicc), "ok"]
                )
            else:
                writer.writerow([rank, idx, "", "", "", "", "", e.status])


def load_exploitation_results(cfg: EEEConfig) -> list[tuple[int, str, np.ndarray]]:
    """(tuple_index, winning family, best-length sample) in rank order,
    reloaded from the exploitation artifacts."""
    ranking_path = cfg.out / "exploitation" / "ranking.csv"
    runs_path = cfg.out / "exploitation" / "runs.csv"
    for p in (ranking_path, runs_path):
        if not p.exists():
            raise MissingInputError(f"{p} not found; run the exploit stage first")
    samples: dict[int, list[tuple[int, int]]] = {}
    with open(runs_path, newline="") as fh:
        for row in csv.DictReader(fh):
            idx = int(row["tuple_index"])
            samples.setdefault(idx, []).append((int(row["run_index"]), int(row["best_length"])))
    out = []
    with open(ranking_path, newline="") as fh:
        for row in csv.DictReader(fh):
            if row["status"] != "ok":
                continue
            idx = int(row["tuple_index"])
            bests = [b for _, b in sorted(samples.get(idx, []))]
            if not bests:
                raise MissingInputError(f"exploitation runs.csv has no runs for tuple {idx}")
            out.append((idx, row["family"], np.array(bests, dtype=np.float64)))
    if not out:
        raise PipelineError("exploitation ranking contains no successful tuples")
    return out


# --------------------------------------------------------------- evaluation


@dataclass
class EvaluationReport:
    rows: list[tuple[int, bs.BootstrapResult]]  # (tuple_index, result), rank order


def run_evaluation(
    cfg: EEEConfig, inputs: list[tuple[int, str, np.ndarray]]
) -> EvaluationReport:
    stage_dir = cfg.out / "evaluation"
    stage_dir.mkdir(parents=True, exist_ok=True)
    config = bs.BootstrapConfig(
        n_resamples=cfg.bootstrap_resamples,
        resample_size=cfg.bootstrap_size,
        level=cfg.ci_level,
    )
    rows = []
    for tuple_index, family, sample in inputs:
        result = bs.bootstrap_probability(
            sample, family, float(cfg.optimum), config, (cfg.seed, STAGE_EVALUATION, tuple_index)
        )
        rows.append((tuple_index, result))
    report = EvaluationReport(rows=rows)
    _write_bootstrap_csv(stage_dir / "bootstrap.csv", rows)
    _write_ten_run_csv(stage_dir / "ten_run.csv", rows)
    _write_histogram_csv(stage_dir / "histogram.csv", rows)
    if cfg.dump_probabilities:
        prob_dir = stage_dir / "probabilities"
        prob_dir.mkdir(exist_ok=True)
        for tuple_index, result in rows:
            with open(prob_dir / f"tuple_{tuple_index:02d}.csv", "w", newline="") as fh:
                writer = csv.writer(fh, lineterminator="\n")
                writer.writerow(["p_le_optimum"])
                for p in result.probabilities:
                    writer.writerow([repr(float(p))])
    json_rows = [
        {
            "tuple_index": idx,
            "family": r.family,
            "mean_p": r.mean_p,
            "ci_low": r.ci_low,
            "ci_high": r.ci_high,
            "failed_refits": r.failed_refits,
            "unreliable": r.unreliable,
            "ten_run_of_mean": r.ten_run_of_mean,
            "mean_of_ten_run": r.mean_of_ten_run,
        }
        for idx, r in rows
    ]
    _write_report_json(
        stage_dir / "report.json", "evaluation", [idx for idx, _ in rows], json_rows,
        provenance(cfg),
    )
    return report


def _write_bootstrap_csv(path: Path, rows: list[tuple[int, bs.BootstrapResult]]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["tuple_index", "family", "mean_p", "ci_low", "ci_high", "failed_refits"])
        for idx, r in rows:
            writer.writerow(
                [idx, r.family, repr(r.mean_p), repr(r.ci_low), repr(r.ci_high), r.failed_refits]
            )


def _write_ten_run_csv(path: Path, rows: list[tuple[int, bs.BootstrapResult]]) -> None:
    """Ten-run aggregates, both orderings of mean and transform labeled."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["tuple_index", "family", "ten_run_of_mean", "mean_of_ten_run", "unreliable"])
        for idx, r in rows:
            writer.writerow(
                [idx, r.family, repr(r.ten_run_of_mean), repr(r.mean_of_ten_run), int(r.unreliable)]
            )


def _write_histogram_csv(path: Path, rows: list[tuple[int, bs.BootstrapResult]], bins: int = 20) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["tuple_index", "bin_low", "bin_high", "count"])
        for idx, r in rows:
            if r.probabilities.size == 0:
                continue
            counts, edges = np.histogram(r.probabilities, bins=bins)
            for b in range(bins):
                writer.writerow([idx, repr(float(edges[b])), repr(float(edges[b + 1])), int(counts[b])])


# ------------------------------------------------------------ shared output


def _write_runs_csv(path: Path, entries: list[TupleRuns]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(
            ["tuple_index", "run_index", "best_length", "encoded_path", "iteration_bests"]
        )
        for e in entries:
            for rec in e.records:
                writer.writerow(
                    [
                        rec.tuple_index,
                        rec.run_index,
                        rec.best_length,
                        encode_path(rec.best_path),
                        ";".join(str(b) for b in rec.iteration_bests),
                    ]
                )


def _write_boxplot_csv(path: Path, entries: list[TupleRuns]) -> None:
    """Five-number summary per tuple (linear-interpolation quartiles) plus
    the raw per-run points for box plots."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["tuple_index", "min", "q1", "median", "q3", "max", "points"])
        for e in entries:
            if not e.ok:
                continue
            b = e.bests()
            q0, q1, q2, q3, q4 = np.percentile(b, [0, 25, 50, 75, 100])
            writer.writerow(
                [
                    e.tuple_index,
                    repr(float(q0)),
                    repr(float(q1)),
                    repr(float(q2)),
                    repr(float(q3)),
                    repr(float(q4)),
                    ";".join(str(int(v)) for v in b),
                ]
            )


def _write_report_json(path: Path, stage: str, ranking: list[int], rows: list[dict], prov: dict) -> None:
    payload = {"stage": stage, "ranking": ranking, "rows": rows, "provenance": prov}
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_summary(
    cfg: EEEConfig,
    instance: tsp.Instance,
    exploration: ExplorationReport,
    exploitation: ExploitationReport,
    evaluation: EvaluationReport,
) -> dict:
    best_idx = exploration.ranking[0]
    best_entry = exploration.entry(best_idx)
    summary = {
        "provenance": provenance(cfg),
        "instance": {"name": instance.name, "n": instance.n, "optimum": cfg.optimum},
        "counts": {
            "tuples": len(exploration.entries),
            "exploration_runs": cfg.exploration_runs,
            "exploration_iterations": cfg.exploration_iterations,
            "top": cfg.top_count,
            "exploitation_runs": cfg.exploitation_runs,
            "exploitation_iterations": cfg.exploitation_iterations,
            "bootstrap_resamples": cfg.bootstrap_resamples,
        },
        "exploration": {
            "ranking_head": exploration.ranking[: cfg.top_count],
            "best_tuple": best_idx,
            "best_mean": float(best_entry.bests().mean()) if best_entry.ok else None,
        },
        "exploitation": [
            {
                "tuple_index": e.tuple_index,
                "status": e.status,
                "family": e.winner.family if e.winner else None,
                "p_le_optimum": e.winner.metrics.p_le_optimum if e.winner else None,
            }
            for e in (exploitation.entry(i) for i in exploitation.ranking)
        ],
        "evaluation": [
            {
                "tuple_index": idx,
                "family": r.family,
                "mean_p": r.mean_p,
                "ci_low": r.ci_low,
                "ci_high": r.ci_high,
                "failed_refits": r.failed_refits,
                "unreliable": r.unreliable,
                "ten_run_of_mean": r.ten_run_of_mean,
                "mean_of_ten_run": r.mean_of_ten_run,
            }
            for idx, r in evaluation.rows
        ],
    }
    with open(cfg.out / "summary.json", "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return summary


def run_all(cfg: EEEConfig) -> dict:
    """Sample, explore, exploit, evaluate; returns the summary dict."""
    instance = load_instance(cfg)
    dmat = tsp.DistanceMatrix.from_instance(instance).d
    tuples = run_sampling(cfg)
    exploration = run_exploration(cfg, tuples, dmat)
    ranking_ok = [i for i in exploration.ranking if exploration.entry(i).ok]
    top = select_top(cfg, tuples, ranking_ok)
    exploitation = run_exploitation(cfg, top, dmat)
    inputs = [
        (e.tuple_index, e.winner.family, e.runs.bests())
        for e in (exploitation.entry(i) for i in exploitation.ranking)
        if e.status == "ok"
    ]
    if not inputs:
        raise PipelineError("no tuple survived exploitation fitting")
    evaluation = run_evaluation(cfg, inputs)
    return write_summary(cfg, instance, exploration, exploitation, evaluation)


# ------------------------------------------------------------------ budget


def estimate_budget_seconds(seconds_per_run: float, runs: int, n_tuples: int) -> float:
    """Wall-clock projection: one run's duration times runs times tuples."""
    if seconds_per_run < 0 or runs < 1 or n_tuples < 1:
        raise ValueError("budget inputs must be positive")
    return seconds_per_run * runs * n_tuples


def format_duration(seconds: float) -> str:
    if seconds < 120.0:
        return f"{seconds:.1f} seconds"
    if seconds < 7200.0:
        return f"{seconds / 60.0:.1f} minutes"
    return f"{seconds / 3600.0:.1f} hours"


def time_one_run(cfg: EEEConfig, dmat: np.ndarray, iterations: int) -> float:
    """Wall time of one mid-range run at the given iteration count (after a
    small warmup so kernel compilation is not billed)."""
    mid = ParameterTuple(
        index=-1,
        alpha=(cfg.space.alpha.low + cfg.space.alpha.high) / 2.0,
        beta=(cfg.space.beta.low + cfg.space.beta.high) / 2.0,
        rho=(cfg.space.rho.low + cfg.space.rho.high) / 2.0,
        ants=int((cfg.space.ants.low + cfg.space.ants.high) // 2),
    )
    warm = _aco_params(cfg, ParameterTuple(-1, mid.alpha, mid.beta, mid.rho, 2), 1)
    engine.run_iterations(dmat, warm, (cfg.seed, 0, 0, 0), n_partitions=cfg.n_partitions)
    params = _aco_params(cfg, mid, iterations)
    start = time.perf_counter()
    engine.run_iterations(
        dmat,
        params,
        (cfg.seed, 0, 0, 1),
        workers=cfg.workers,
        use_combiner=cfg.use_combiner,
        n_partitions=cfg.n_partitions,
    )
    return time.perf_counter() - start
