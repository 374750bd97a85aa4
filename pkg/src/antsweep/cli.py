"""Command-line front end.

Subcommands mirror the pipeline stages (sample, explore, exploit, evaluate),
plus run-all and estimate. Configuration comes from an INI file selected
with --config; command-line flags override it. Exit codes: 0 success,
2 configuration problems, 3 missing inputs, 4 runtime failures.
"""

from __future__ import annotations

import argparse
import configparser
import sys
from pathlib import Path

from . import pipeline, tsp
from .pipeline import EEEConfig, MissingInputError, PipelineError
from .sampling import DimSpec, ParameterSpace, default_space

EXIT_CONFIG = 2
EXIT_MISSING_INPUT = 3
EXIT_RUNTIME = 4


class ConfigError(Exception):
    pass


# every key the INI file may define, by section
_KNOWN_KEYS = {
    "instance": {"path", "optimum"},
    "space": {"alpha", "beta", "rho", "ants"},
    "exploration": {"base_samples", "runs", "iterations"},
    "exploitation": {"top", "runs", "iterations"},
    "evaluation": {"resamples", "resample_size", "level", "dump_probabilities"},
    "engine": {"seed", "workers", "combiner", "partitions", "tau0", "q", "persist_pheromones"},
}


def _parse_range(raw: str, name: str) -> tuple[float, float]:
    parts = raw.split()
    if len(parts) != 2:
        raise ConfigError(f"[space] {name} must be 'low high', got {raw!r}")
    try:
        lo, hi = float(parts[0]), float(parts[1])
    except ValueError:
        raise ConfigError(f"[space] {name} has non-numeric bounds: {raw!r}")
    return lo, hi


def _parse_bool(raw: str, where: str) -> bool:
    lowered = raw.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"{where} must be a boolean, got {raw!r}")


def _get(parser: configparser.ConfigParser, section: str, key: str, cast, where: str):
    raw = parser.get(section, key)
    try:
        return cast(raw)
    except ConfigError:
        raise
    except ValueError:
        raise ConfigError(f"{where} has invalid value {raw!r}")


def load_config(path: Path | None, out: Path) -> EEEConfig:
    """Build an EEEConfig from defaults plus an optional INI file. Unknown
    sections or keys are rejected."""
    cfg = EEEConfig(out=out)
    if path is None:
        return cfg
    if not Path(path).exists():
        raise MissingInputError(f"config file not found: {path}")
    parser = configparser.ConfigParser()
    try:
        with open(path) as fh:
            parser.read_file(fh)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config file: {exc}")

    for section in parser.sections():
        if section not in _KNOWN_KEYS:
            raise ConfigError(f"unknown config section [{section}]")
        for key in parser.options(section):
            if key not in _KNOWN_KEYS[section]:
                raise ConfigError(f"unknown key {key!r} in section [{section}]")

    if parser.has_option("instance", "path"):
        cfg.instance = Path(parser.get("instance", "path"))
    if parser.has_option("instance", "optimum"):
        cfg.optimum = _get(parser, "instance", "optimum", int, "[instance] optimum")
    elif cfg.instance is not None:
        raise ConfigError("[instance] path requires an explicit optimum")

    if parser.has_section("space"):
        dims = {}
        try:
            for name in ("alpha", "beta", "rho", "ants"):
                if parser.has_option("space", name):
                    lo, hi = _parse_range(parser.get("space", name), name)
                    kind = "integer" if name == "ants" else "real"
                    if kind == "integer" and (lo != int(lo) or hi != int(hi)):
                        raise ConfigError(
                            f"[space] {name} bounds must be integers, got {lo} {hi}"
                        )
                    dims[name] = DimSpec(name, lo, hi, kind)
            base = default_space()
            cfg.space = ParameterSpace(
                alpha=dims.get("alpha", base.alpha),
                beta=dims.get("beta", base.beta),
                rho=dims.get("rho", base.rho),
                ants=dims.get("ants", base.ants),
            )
        except ValueError as exc:
            raise ConfigError(f"invalid [space] ranges: {exc}")

    mapping = [
        ("exploration", "base_samples", "n_base", int),
        ("exploration", "runs", "exploration_runs", int),
        ("exploration", "iterations", "exploration_iterations", int),
        ("exploitation", "top", "top_count", int),
        ("exploitation", "runs", "exploitation_runs", int),
        ("exploitation", "iterations", "exploitation_iterations", int),
        ("evaluation", "resamples", "bootstrap_resamples", int),
        ("evaluation", "resample_size", "bootstrap_size", int),
        ("evaluation", "level", "ci_level", float),
        ("engine", "seed", "seed", int),
        ("engine", "workers", "workers", int),
        ("engine", "partitions", "n_partitions", int),
        ("engine", "tau0", "tau0", float),
        ("engine", "q", "q_deposit", float),
    ]
    for section, key, attr, cast in mapping:
        if parser.has_option(section, key):
            setattr(cfg, attr, _get(parser, section, key, cast, f"[{section}] {key}"))
    for section, key, attr in [
        ("evaluation", "dump_probabilities", "dump_probabilities"),
        ("engine", "combiner", "use_combiner"),
        ("engine", "persist_pheromones", "persist_pheromones"),
    ]:
        if parser.has_option(section, key):
            setattr(cfg, attr, _parse_bool(parser.get(section, key), f"[{section}] {key}"))
    return cfg


def _validate(cfg: EEEConfig) -> None:
    try:
        EEEConfig(**{f: getattr(cfg, f) for f in cfg.__dataclass_fields__})
    except ValueError as exc:
        raise ConfigError(str(exc))
    if not 0.0 < cfg.ci_level < 1.0:
        raise ConfigError(f"confidence level must lie in (0, 1), got {cfg.ci_level}")
    if cfg.bootstrap_size is not None and cfg.bootstrap_size < 1:
        raise ConfigError("resample_size must be >= 1")
    if cfg.seed < 0:
        raise ConfigError(f"seed must be a nonnegative integer, got {cfg.seed}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, default=None, help="INI configuration file")
    common.add_argument("--seed", type=int, default=None, help="master seed override")
    common.add_argument("--workers", type=int, default=None, help="engine worker threads")
    common.add_argument("--out", type=Path, default=Path("antsweep-out"), help="output directory")
    common.add_argument(
        "--smoke", action="store_true", help="tiny end-to-end profile for quick checks"
    )
    common.add_argument(
        "--persist-pheromones", action="store_true",
        help="round-trip pheromone state through CSV between iterations",
    )
    parser = argparse.ArgumentParser(
        prog="antsweep",
        description="Parameter sweeps for ant-system TSP solvers: sample, run, fit, bootstrap.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("sample", parents=[common], help="generate the parameter tuples CSV")
    sub.add_parser("explore", parents=[common], help="screen every tuple with short runs")
    sub.add_parser("exploit", parents=[common], help="rerun top tuples and fit distributions")
    sub.add_parser("evaluate", parents=[common], help="bootstrap the success probabilities")
    sub.add_parser("run-all", parents=[common], help="all four stages in sequence")
    sub.add_parser("estimate", parents=[common], help="project the study's wall-clock budget")
    return parser


def _assemble_config(args: argparse.Namespace) -> EEEConfig:
    cfg = load_config(args.config, args.out)
    if args.seed is not None:
        cfg.seed = args.seed
    if args.workers is not None:
        cfg.workers = args.workers
    cfg.out = args.out
    if args.persist_pheromones:
        cfg.persist_pheromones = True
    if args.smoke:
        cfg.apply_smoke_profile()
    _validate(cfg)
    return cfg


def _cmd_sample(cfg: EEEConfig) -> int:
    tuples = pipeline.run_sampling(cfg)
    print(f"wrote {len(tuples)} tuples to {cfg.out / 'tuples.csv'}")
    return 0


def _cmd_explore(cfg: EEEConfig) -> int:
    instance = pipeline.load_instance(cfg)
    dmat = tsp.DistanceMatrix.from_instance(instance).d
    tuples = pipeline.load_tuples(cfg)
    report = pipeline.run_exploration(cfg, tuples, dmat)
    head = report.ranking[: cfg.top_count]
    print(f"explored {len(tuples)} tuples on {instance.name}; best by mean: {head}")
    return 0


def _cmd_exploit(cfg: EEEConfig) -> int:
    instance = pipeline.load_instance(cfg)
    dmat = tsp.DistanceMatrix.from_instance(instance).d
    top = pipeline.load_top_tuples(cfg)
    report = pipeline.run_exploitation(cfg, top, dmat)
    for idx in report.ranking:
        e = report.entry(idx)
        if e.status == "ok":
            w = e.winner
            print(
                f"tuple {idx}: {w.family} fit, "
                f"P(X <= {cfg.optimum}) = {w.metrics.p_le_optimum:.3e}"
            )
        else:
            print(f"tuple {idx}: {e.status}")
    return 0


def _cmd_evaluate(cfg: EEEConfig) -> int:
    inputs = pipeline.load_exploitation_results(cfg)
    report = pipeline.run_evaluation(cfg, inputs)
    for idx, r in report.rows:
        flag = " (unreliable)" if r.unreliable else ""
        print(
            f"tuple {idx}: mean P = {r.mean_p:.3e}, "
            f"CI [{r.ci_low:.3e}, {r.ci_high:.3e}], {r.failed_refits} failed refits{flag}"
        )
    return 0


def _cmd_run_all(cfg: EEEConfig) -> int:
    summary = pipeline.run_all(cfg)
    print(f"summary written to {cfg.out / 'summary.json'}")
    best = summary["exploration"]["best_tuple"]
    print(f"exploration winner: tuple {best}")
    for row in summary["evaluation"]:
        print(
            f"tuple {row['tuple_index']}: {row['family']}, mean P = {row['mean_p']:.3e}, "
            f"CI [{row['ci_low']:.3e}, {row['ci_high']:.3e}]"
        )
    return 0


def _cmd_estimate(cfg: EEEConfig) -> int:
    instance = pipeline.load_instance(cfg)
    dmat = tsp.DistanceMatrix.from_instance(instance).d
    n_tuples = cfg.n_base * (cfg.space.dimension + 2)
    t_explore = pipeline.time_one_run(cfg, dmat, cfg.exploration_iterations)
    explore_total = pipeline.estimate_budget_seconds(t_explore, cfg.exploration_runs, n_tuples)
    # scale the trial by the iteration ratio instead of timing a second run
    t_exploit = t_explore * cfg.exploitation_iterations / cfg.exploration_iterations
    exploit_total = pipeline.estimate_budget_seconds(t_exploit, cfg.exploitation_runs, cfg.top_count)
    print(f"one {cfg.exploration_iterations}-iteration run: {t_explore:.2f} s")
    print(
        f"exploration ({n_tuples} tuples x {cfg.exploration_runs} runs): "
        f"{pipeline.format_duration(explore_total)}"
    )
    print(
        f"exploitation ({cfg.top_count} tuples x {cfg.exploitation_runs} runs): "
        f"{pipeline.format_duration(exploit_total)}"
    )
    print(f"total: {pipeline.format_duration(explore_total + exploit_total)}")
    return 0


_COMMANDS = {
    "sample": _cmd_sample,
    "explore": _cmd_explore,
    "exploit": _cmd_exploit,
    "evaluate": _cmd_evaluate,
    "run-all": _cmd_run_all,
    "estimate": _cmd_estimate,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _assemble_config(args)
        return _COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except MissingInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MISSING_INPUT
    except (PipelineError, tsp.TsplibParseError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
