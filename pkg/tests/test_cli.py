import csv
import subprocess
import sys

import pytest

from antsweep.cli import (
    EXIT_CONFIG,
    EXIT_MISSING_INPUT,
    EXIT_RUNTIME,
    _assemble_config,
    build_parser,
    main,
)


def write_ini(path, text):
    path.write_text(text)
    return str(path)


SMOKE_INI = """\
[exploration]
base_samples = 2
runs = 1
iterations = 2

[exploitation]
top = 2
runs = 3
iterations = 2

[evaluation]
resamples = 50

[engine]
seed = 9
"""


class TestConfigErrors:
    def run_expecting(self, argv, code, capsys, needle=None):
        assert main(argv) == code
        err = capsys.readouterr().err
        assert err.startswith("error:")
        if needle:
            assert needle in err

    def test_unknown_section(self, tmp_path, capsys):
        ini = write_ini(tmp_path / "c.ini", "[surprises]\nx = 1\n")
        self.run_expecting(
            ["sample", "--config", ini, "--out", str(tmp_path / "o")],
            EXIT_CONFIG, capsys, "unknown config section",
        )

    def test_unknown_key(self, tmp_path, capsys):
        ini = write_ini(tmp_path / "c.ini", "[exploration]\nbase_samples = 2\nturbo = yes\n")
        self.run_expecting(
            ["sample", "--config", ini, "--out", str(tmp_path / "o")],
            EXIT_CONFIG, capsys, "unknown key 'turbo'",
        )

    def test_non_numeric_value(self, tmp_path, capsys):
        ini = write_ini(tmp_path / "c.ini", "[exploration]\nruns = banana\n")
        self.run_expecting(
            ["sample", "--config", ini, "--out", str(tmp_path / "o")],
            EXIT_CONFIG, capsys, "invalid value",
        )

    def test_instance_path_requires_optimum(self, tmp_path, capsys):
        ini = write_ini(tmp_path / "c.ini", "[instance]\npath = some.tsp\n")
        self.run_expecting(
            ["sample", "--config", ini, "--out", str(tmp_path / "o")],
            EXIT_CONFIG, capsys, "optimum",
        )

    def test_space_range_shape(self, tmp_path, capsys):
        ini = write_ini(tmp_path / "c.ini", "[space]\nalpha = 0.5\n")
        self.run_expecting(
            ["sample", "--config", ini, "--out", str(tmp_path / "o")],
            EXIT_CONFIG, capsys, "'low high'",
        )

    def test_ants_bounds_must_be_integers(self, tmp_path, capsys):
        ini = write_ini(tmp_path / "c.ini", "[space]\nants = 50.5 250\n")
        self.run_expecting(
            ["sample", "--config", ini, "--out", str(tmp_path / "o")],
            EXIT_CONFIG, capsys,
        )

    def test_inverted_range_rejected(self, tmp_path, capsys):
        ini = write_ini(tmp_path / "c.ini", "[space]\nbeta = 5.0 1.0\n")
        self.run_expecting(
            ["sample", "--config", ini, "--out", str(tmp_path / "o")],
            EXIT_CONFIG, capsys, "invalid [space] ranges",
        )

    def test_bad_bool(self, tmp_path, capsys):
        ini = write_ini(tmp_path / "c.ini", "[engine]\ncombiner = maybe\n")
        self.run_expecting(
            ["sample", "--config", ini, "--out", str(tmp_path / "o")],
            EXIT_CONFIG, capsys, "boolean",
        )

    def test_negative_seed(self, tmp_path, capsys):
        self.run_expecting(
            ["sample", "--seed", "-4", "--out", str(tmp_path / "o")],
            EXIT_CONFIG, capsys, "seed",
        )

    def test_too_few_exploitation_runs(self, tmp_path, capsys):
        ini = write_ini(tmp_path / "c.ini", "[exploitation]\nruns = 2\n")
        self.run_expecting(
            ["sample", "--config", ini, "--out", str(tmp_path / "o")],
            EXIT_CONFIG, capsys, "exploitation_runs",
        )

    def test_level_out_of_range(self, tmp_path, capsys):
        ini = write_ini(tmp_path / "c.ini", "[evaluation]\nlevel = 1.5\n")
        self.run_expecting(
            ["sample", "--config", ini, "--out", str(tmp_path / "o")],
            EXIT_CONFIG, capsys, "confidence level",
        )


class TestMissingInputs:
    def test_absent_config_file(self, tmp_path, capsys):
        code = main(
            ["sample", "--config", str(tmp_path / "no.ini"), "--out", str(tmp_path / "o")]
        )
        assert code == EXIT_MISSING_INPUT
        assert "config file not found" in capsys.readouterr().err

    def test_explore_before_sample(self, tmp_path, capsys):
        code = main(["explore", "--smoke", "--out", str(tmp_path / "o")])
        assert code == EXIT_MISSING_INPUT
        assert "tuples.csv" in capsys.readouterr().err

    def test_evaluate_before_exploit(self, tmp_path, capsys):
        code = main(["evaluate", "--smoke", "--out", str(tmp_path / "o")])
        assert code == EXIT_MISSING_INPUT

    def test_absent_instance_file(self, tmp_path, capsys):
        ini = write_ini(
            tmp_path / "c.ini", "[instance]\npath = gone.tsp\noptimum = 1\n"
        )
        out = tmp_path / "o"
        assert main(["sample", "--smoke", "--config", ini, "--out", str(out)]) == 0
        code = main(["explore", "--smoke", "--config", ini, "--out", str(out)])
        assert code == EXIT_MISSING_INPUT
        assert "instance file not found" in capsys.readouterr().err


class TestRuntimeErrors:
    def test_malformed_instance_file(self, tmp_path, capsys):
        bad = tmp_path / "bad.tsp"
        bad.write_text("NAME: broken\nNODE_COORD_SECTION\n1 0 0\nEOF\n")
        ini = write_ini(
            tmp_path / "c.ini", f"[instance]\npath = {bad}\noptimum = 1\n"
        )
        out = tmp_path / "o"
        assert main(["sample", "--smoke", "--config", ini, "--out", str(out)]) == 0
        code = main(["explore", "--smoke", "--config", ini, "--out", str(out)])
        assert code == EXIT_RUNTIME


class TestOverridesAndParsing:
    def test_flags_override_ini(self, tmp_path):
        ini = write_ini(tmp_path / "c.ini", SMOKE_INI)
        args = build_parser().parse_args(
            ["run-all", "--config", ini, "--seed", "3", "--workers", "2",
             "--out", str(tmp_path / "o")]
        )
        cfg = _assemble_config(args)
        assert cfg.seed == 3  # flag beats [engine] seed = 9
        assert cfg.workers == 2
        assert cfg.n_base == 2
        assert cfg.bootstrap_resamples == 50

    def test_ini_values_land_in_config(self, tmp_path):
        ini = write_ini(
            tmp_path / "c.ini",
            SMOKE_INI
            + "combiner = off\npartitions = 4\ntau0 = 2.0\nq = 500\n"
            + "[space]\nalpha = 1.0 2.0\nants = 10 20\n",
        )
        args = build_parser().parse_args(["sample", "--config", ini, "--out", str(tmp_path / "o")])
        cfg = _assemble_config(args)
        assert cfg.seed == 9
        assert cfg.use_combiner is False
        assert cfg.n_partitions == 4
        assert (cfg.tau0, cfg.q_deposit) == (2.0, 500.0)
        assert (cfg.space.alpha.low, cfg.space.alpha.high) == (1.0, 2.0)
        assert (cfg.space.ants.low, cfg.space.ants.high) == (10, 20)
        assert cfg.space.beta.low == 1.0  # untouched dims keep defaults

    def test_custom_space_respected_in_tuples(self, tmp_path):
        ini = write_ini(
            tmp_path / "c.ini",
            "[exploration]\nbase_samples = 2\n[space]\nalpha = 1.0 1.5\nants = 10 20\n",
        )
        out = tmp_path / "o"
        assert main(["sample", "--config", ini, "--out", str(out)]) == 0
        with open(out / "tuples.csv", newline="") as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == 12  # 2 * (4 + 2)
        for row in rows:
            assert 1.0 <= float(row["alpha"]) < 1.5
            assert 10 <= int(row["ants"]) <= 20


class TestStages:
    def test_sample_then_stages_match_run_all(self, tmp_path, capsys):
        staged = tmp_path / "staged"
        argv = ["--smoke", "--seed", "7", "--out", str(staged)]
        assert main(["sample", *argv]) == 0
        assert "wrote 12 tuples" in capsys.readouterr().out
        assert main(["explore", *argv]) == 0
        assert "explored 12 tuples on berlin52" in capsys.readouterr().out
        assert main(["exploit", *argv]) == 0
        assert "P(X <= 7542)" in capsys.readouterr().out
        assert main(["evaluate", *argv]) == 0
        assert "failed refits" in capsys.readouterr().out

        mono = tmp_path / "mono"
        assert main(["run-all", "--smoke", "--seed", "7", "--out", str(mono)]) == 0
        out = capsys.readouterr().out
        assert "summary written" in out and "exploration winner" in out
        for rel in ("tuples.csv", "exploration/ranking.csv", "evaluation/bootstrap.csv"):
            assert (staged / rel).read_bytes() == (mono / rel).read_bytes(), rel

    def test_persist_flag(self, tmp_path):
        out = tmp_path / "o"
        argv = ["--smoke", "--out", str(out), "--persist-pheromones"]
        assert main(["sample", *argv]) == 0
        assert main(["explore", *argv]) == 0
        assert list((out / "exploration" / "pheromones").glob("tuple_*/run_*/pheromone_0000.csv"))

    def test_estimate_prints_budget(self, tmp_path, capsys):
        assert main(["estimate", "--smoke", "--out", str(tmp_path / "o")]) == 0
        out = capsys.readouterr().out
        assert "one 2-iteration run:" in out
        assert "exploration (12 tuples x 1 runs):" in out
        assert "total:" in out
        assert out.rstrip().endswith(("seconds", "minutes", "hours"))


def test_module_entry_point(tmp_path):
    out = tmp_path / "o"
    proc = subprocess.run(
        [sys.executable, "-m", "antsweep", "sample", "--smoke", "--out", str(out)],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert (out / "tuples.csv").exists()


def test_missing_subcommand_is_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 2
    assert "usage" in capsys.readouterr().err
