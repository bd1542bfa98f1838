"""Command-line interface: verbs, exit codes, artifact round trips."""

import numpy as np
import pytest

from pelve.casestudy import benchmark_config, write_config
from pelve.cli import main
from pelve.measures import read_es_table
from pelve.risks import load_samples_csv


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


@pytest.fixture(scope="module")
def config_path(tmp_path_factory):
    path = tmp_path_factory.mktemp("config") / "casestudy.json"
    write_config(path, benchmark_config(model=1, paths=3000, seed=77))
    return path


@pytest.fixture(scope="module")
def samples_path(tmp_path_factory, config_path):
    path = tmp_path_factory.mktemp("samples") / "samples.csv"
    assert main(["simulate", "--config", str(config_path), "--out", str(path)]) == 0
    return path


class TestPelveVerb:
    def test_pareto(self, capsys):
        code, out, _ = run(capsys, "pelve", "--dist", "pareto", "--gamma", "2", "--level", "0.1")
        assert code == 0
        assert float(out) == pytest.approx(4.0, abs=1e-6)

    def test_constant(self, capsys):
        code, out, _ = run(capsys, "pelve", "--dist", "constant", "--value", "5", "--level", "0.1")
        assert code == 0
        assert float(out) == 1.0

    def test_infinite_prints_sentinel(self, capsys):
        code, out, _ = run(capsys, "pelve", "--dist", "pareto", "--gamma", "2", "--level", "0.3")
        assert code == 0
        assert out.strip() == "inf"

    def test_seventeen_digit_output(self, capsys):
        code, out, _ = run(capsys, "pelve", "--dist", "normal", "--mu", "0", "--sigma", "1", "--level", "0.05")
        assert code == 0
        assert len(out.strip().replace(".", "")) >= 16

    def test_missing_family_parameter(self, capsys):
        code, _, err = run(capsys, "pelve", "--dist", "normal", "--level", "0.05")
        assert code == 2
        assert "requires" in err

    def test_bad_level_is_validation_failure(self, capsys):
        code, _, _ = run(capsys, "pelve", "--dist", "constant", "--value", "1", "--level", "1.5")
        assert code == 2


class TestUsageErrors:
    def test_unknown_verb(self, capsys):
        assert run(capsys, "frobnicate")[0] == 64

    def test_unknown_flag(self, capsys):
        assert run(capsys, "pelve", "--dist", "constant", "--value", "1", "--level", "0.1", "--bogus", "3")[0] == 64

    def test_no_verb(self, capsys):
        assert run(capsys)[0] == 64


class TestCurveVerbs:
    def test_curve_then_validate_roundtrip(self, capsys, tmp_path, samples_path):
        out_csv = tmp_path / "curve.csv"
        code, _, _ = run(
            capsys, "curve", "--input", str(samples_path), "--col", "insurer_3",
            "--levels", "0.01:0.9:30", "--out", str(out_csv),
        )
        assert code == 0
        table = read_es_table(out_csv)
        assert len(table) == 30
        code, out, _ = run(capsys, "validate-curve", "--input", str(out_csv), "--tol", "0.05")
        assert code == 0
        assert "accepted" in out

    def test_validate_rejects_nonconcave_scaled_curve(self, capsys, tmp_path):
        t = np.linspace(0.001, 1.0, 1000)
        path = tmp_path / "bad.csv"
        lines = ["level,es"] + [f"{x:.17g},{(1 - x) ** 2:.17g}" for x in t]
        path.write_text("\n".join(lines) + "\n")
        code, out, _ = run(capsys, "validate-curve", "--input", str(path))
        assert code == 2
        assert "rejected" in out
        assert "slope" in out
        # the named failure locations sit in (2/3, 1]
        levels = [float(line.split("level ")[1].split(":")[0])
                  for line in out.splitlines() if "slope" in line]
        assert levels and min(levels) > 0.66

    def test_missing_column(self, capsys, samples_path, tmp_path):
        code, _, err = run(
            capsys, "curve", "--input", str(samples_path), "--col", "nope",
            "--levels", "0.01:0.9:10", "--out", str(tmp_path / "x.csv"),
        )
        assert code == 2
        assert "nope" in err

    def test_bad_level_range(self, capsys, samples_path, tmp_path):
        code, _, _ = run(
            capsys, "curve", "--input", str(samples_path), "--col", "insurer_1",
            "--levels", "0.5:0.1:10", "--out", str(tmp_path / "x.csv"),
        )
        assert code == 2


class TestSimulateVerb:
    def test_byte_identical_reruns(self, capsys, config_path, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert run(capsys, "simulate", "--config", str(config_path), "--out", str(a))[0] == 0
        assert run(capsys, "simulate", "--config", str(config_path), "--out", str(b), "--workers", "4")[0] == 0
        assert a.read_bytes() == b.read_bytes()

    def test_missing_config(self, capsys, tmp_path):
        code, _, _ = run(capsys, "simulate", "--config", str(tmp_path / "nope.json"), "--out", str(tmp_path / "o.csv"))
        assert code == 2


class TestMultiVerb:
    @pytest.mark.parametrize("method", ["a", "wc", "mse", "sys"])
    def test_methods_run(self, capsys, config_path, method):
        code, out, _ = run(
            capsys, "multi", "--config", str(config_path), "--method", method, "--level", "0.05"
        )
        assert code == 0
        value = float(out)
        assert 1.0 <= value <= 20.0

    def test_weight_choices(self, capsys, config_path):
        values = {}
        for weights in ("equal", "assets", "inverse-assets"):
            code, out, _ = run(
                capsys, "multi", "--config", str(config_path), "--method", "a",
                "--level", "0.05", "--weights", weights,
            )
            assert code == 0
            values[weights] = float(out)
        assert len(set(values.values())) > 1


class TestReportVerb:
    def test_writes_expected_files(self, capsys, config_path, samples_path, tmp_path):
        outdir = tmp_path / "report"
        code, out, _ = run(
            capsys, "report", "--samples", str(samples_path), "--config", str(config_path),
            "--outdir", str(outdir), "--levels", "0.02:0.1:4",
        )
        assert code == 0
        names = {p.name for p in outdir.iterdir()}
        expected = {"pelve_curves.csv", "multi_curves.csv", "total_change.csv", "abs_change.csv"}
        expected |= {f"relative_change_{m}.csv" for m in ("a", "a_weighted", "wc", "mse", "mse_weighted", "sys")}
        assert names == expected
        # re-readable by the package's own readers
        columns = load_samples_csv(outdir / "pelve_curves.csv")
        assert "insurer_1" in columns and columns["level"].size == 4
