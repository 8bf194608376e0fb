import hashlib
import json
import logging
import os

import numpy as np
import pytest
from numpy.testing import assert_allclose

from lp_euler.cli import consolidate, dispatch, ReportError
from lp_euler.core import (
    Grid,
    SpectralField,
    VectorField,
    gradient,
    read_field,
    read_vector_field,
    write_field,
    write_vector_field,
)
from lp_euler.errors import BlowUpError
from lp_euler.euler2d import preset
from lp_euler.version import version
import lp_euler.euler2d.simulation as simulation


@pytest.fixture(autouse=True)
def restore_logging():
    root = logging.getLogger()
    handlers = list(root.handlers)
    level = root.level
    yield
    logging.captureWarnings(False)
    root.handlers[:] = handlers
    root.setLevel(level)


@pytest.fixture
def grid():
    return Grid(d=2, n=16, L=1.0)


@pytest.fixture
def cos_file(grid, tmp_path):
    x, y = grid.coordinates
    f = SpectralField.from_samples(np.cos(x) + 0.25 * np.sin(3 * y), grid)
    path = tmp_path / "f.fld"
    write_field(f, path)
    return f, str(path)


def _sha256(path):
    with open(path, "rb") as file:
        return hashlib.sha256(file.read()).hexdigest()


def test_version(capsys):
    assert dispatch(["--version"]) == 0
    assert version in capsys.readouterr().out


@pytest.mark.parametrize("argv", [
    pytest.param([], id="no command"),
    pytest.param(["verify", "--id", "hoelder"], id="unknown id"),
    pytest.param(["verify", "--id", "leray", "--trials", "0"], id="trials"),
    pytest.param(["norm", "--in", "missing.fld"], id="missing file"),
    pytest.param(["simulate", "--n", "12"], id="bad grid"),
])
def test_invalid_input(argv, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert dispatch(argv) == 2


def test_corrupted_field_file(cos_file, capsys):
    _, path = cos_file
    with open(path, "r+b") as file:
        file.seek(-1, os.SEEK_END)
        last = file.read(1)[0]
        file.seek(-1, os.SEEK_END)
        file.write(bytes([last ^ 0xFF]))
    assert dispatch(["norm", "--in", path]) == 2
    assert "checksum" in capsys.readouterr().err


class TestFieldCommands:
    def test_decompose(self, cos_file, tmp_path):
        f, path = cos_file
        out = tmp_path / "bands"
        assert dispatch(["decompose", "--in", path, "--out-dir", str(out)]) == 0
        with open(out / "manifest.json") as file:
            summary = json.load(file)
        assert (summary["j_min"], summary["j_max"]) == (-1, 4)
        assert summary["reconstruction_error"] < 1e-12
        total = sum(
            (read_field(out / name) for name in summary["bands"].values()),
            SpectralField.zeros(f.grid),
        )
        assert_allclose(total.coeffs, f.coeffs, atol=1e-15)
        with open(out / "run_manifest.json") as file:
            manifest = json.load(file)
        assert manifest["command"] == "decompose"
        assert manifest["grid"] == {"d": 2, "n": 16, "L": 1.0}
        for output, digest in manifest["outputs"].items():
            assert _sha256(output) == digest

    def test_norm_to_stdout(self, cos_file, capsys):
        _, path = cos_file
        assert dispatch(["norm", "--in", path, "--space", "linf"]) == 0
        data = json.loads(capsys.readouterr().out)
        assert data["value"] == pytest.approx(1.25, rel=1e-3)
        assert data["spec"]["space"] == "Linf"

    def test_norm_to_file(self, cos_file, tmp_path):
        _, path = cos_file
        out = tmp_path / "norm.json"
        argv = ["norm", "--in", path, "--space", "besov", "--s", "1",
                "--p", "inf", "--q", "1", "--json", str(out)]
        assert dispatch(argv) == 0
        with open(out) as file:
            data = json.load(file)
        assert data["spec"] == {"space": "Besov", "s": 1.0, "p": "inf",
                                "q": 1.0}
        assert os.path.exists(str(out) + ".manifest.json")

    def test_project(self, grid, tmp_path):
        x, y = grid.coordinates
        phi = SpectralField.from_samples(np.sin(x) * np.cos(2 * y), grid)
        swirl = VectorField.from_samples([np.sin(y), np.cos(x)], grid)
        write_vector_field(gradient(phi) + swirl, tmp_path / "u")
        out = tmp_path / "pu"
        argv = ["project", "--in", str(tmp_path / "u"), "--out", str(out)]
        assert dispatch(argv) == 0
        projected = read_vector_field(out)
        assert projected.divergence_residual() < 1e-14
        for got, expected in zip(projected, swirl):
            assert_allclose(got.coeffs, expected.coeffs, atol=1e-15)
        assert os.path.exists(out / "run_manifest.json")

    def test_norm_of_vector_field(self, grid, tmp_path, capsys):
        x, y = grid.coordinates
        u = VectorField.from_samples([np.sin(y), np.cos(x)], grid)
        write_vector_field(u, tmp_path / "u")
        argv = ["norm", "--in", str(tmp_path / "u"), "--space", "w1inf"]
        assert dispatch(argv) == 0
        data = json.loads(capsys.readouterr().out)
        assert data["value"] > 1.0

    def test_bony(self, cos_file, grid, tmp_path):
        _, path = cos_file
        x, y = grid.coordinates
        g = SpectralField.from_samples(np.sin(2 * x + y), grid)
        write_field(g, tmp_path / "g.fld")
        out = tmp_path / "bony"
        argv = ["bony", "--f", path, "--g", str(tmp_path / "g.fld"),
                "--out-dir", str(out)]
        assert dispatch(argv) == 0
        with open(out / "residual.json") as file:
            assert json.load(file)["residual"] < 1e-9
        for name in ("para_fg", "para_gf", "remainder"):
            assert os.path.exists(out / f"{name}.fld")


class TestVerify:
    def test_reproducible_reports(self, tmp_path):
        paths = [tmp_path / "a.json", tmp_path / "b.json"]
        for path in paths:
            argv = ["verify", "--id", "leray", "--n", "16", "--trials", "3",
                    "--json", str(path)]
            assert dispatch(argv) == 0
        assert paths[0].read_bytes() == paths[1].read_bytes()
        with open(str(paths[0]) + ".manifest.json") as file:
            manifest = json.load(file)
        assert manifest["seeds"] == [0]
        assert manifest["outputs"] == {str(paths[0]): _sha256(paths[0])}

    def test_stability_sweep(self, capsys):
        argv = ["verify", "--id", "bernstein", "--n", "16", "--trials", "2",
                "--resolutions", "16", "32"]
        assert dispatch(argv) == 0
        data = json.loads(capsys.readouterr().out)
        assert data["resolutions"] == [16, 32]
        assert len(data["reports"]) == 2


class TestSimulate:
    def test_single_sample(self, capsys):
        argv = ["simulate", "--preset", "taylor-green", "--t-end", "0",
                "--n", "32"]
        assert dispatch(argv) == 0
        summary = json.loads(capsys.readouterr().out)
        assert summary["samples"] == 1
        assert summary["global_check"] == "pass"
        assert summary["blowup_stop"] is False

    def test_outputs(self, in_temporary_directory):
        argv = ["simulate", "--n", "32", "--dt", "0.01", "--t-end", "0.02",
                "--monitor-period", "1", "--csv", "run.csv",
                "--json", "run.json"]
        assert dispatch(argv) == 0
        table = np.loadtxt("run.csv", delimiter=",", skiprows=1)
        assert table.shape == (3, 8)
        with open("run.json") as file:
            assert json.load(file)["samples"] == 3
        with open("run.csv.manifest.json") as file:
            manifest = json.load(file)
        assert set(manifest["outputs"]) == {"run.csv", "run.json"}

    def test_initial_field_from_file(self, tmp_path, capsys):
        grid = Grid(d=2, n=32, L=1.0)
        write_field(preset("shear", grid), tmp_path / "w.fld")
        argv = ["simulate", "--in", str(tmp_path / "w.fld"), "--dt", "0.01",
                "--t-end", "0.05"]
        assert dispatch(argv) == 0
        summary = json.loads(capsys.readouterr().out)
        assert summary["energy_drift"] < 1e-12

    def test_rejects_field_with_mean(self, tmp_path):
        grid = Grid(d=2, n=32, L=1.0)
        write_field(
            SpectralField.from_samples(np.ones(grid.shape), grid),
            tmp_path / "w.fld",
        )
        argv = ["simulate", "--in", str(tmp_path / "w.fld"), "--t-end", "0"]
        assert dispatch(argv) == 2

    def test_blowup_exit_code(self, tmp_path, monkeypatch):
        def failing_step(state, dt, dealias=True):
            raise BlowUpError()

        monkeypatch.setattr(simulation, "step_rk4", failing_step)
        out = tmp_path / "run.json"
        argv = ["simulate", "--n", "32", "--dt", "0.01", "--t-end", "0.1",
                "--json", str(out)]
        assert dispatch(argv) == 3
        with open(out) as file:
            summary = json.load(file)
        assert summary["blowup_stop"] is True
        assert summary["global_check"] == "fail"
        assert os.path.exists(str(out) + ".manifest.json")


class TestReport:
    def _verify(self, path, n):
        argv = ["verify", "--id", "leray", "--n", str(n), "--trials", "2",
                "--json", str(path)]
        assert dispatch(argv) == 0

    def test_empty(self, capsys):
        assert dispatch(["report"]) == 0
        assert capsys.readouterr().out == ""
        assert consolidate([]) == {
            "inequalities": [], "stability": {}, "simulations": [],
        }

    def test_growth(self, tmp_path, capsys):
        self._verify(tmp_path / "n32.json", 32)
        self._verify(tmp_path / "n16.json", 16)
        argv = ["simulate", "--t-end", "0", "--n", "16",
                "--json", str(tmp_path / "sim.json")]
        assert dispatch(argv) == 0
        inputs = [str(tmp_path / name)
                  for name in ("n32.json", "sim.json", "n16.json")]
        out = tmp_path / "summary.json"
        assert dispatch(["report", *inputs, "--json", str(out)]) == 0
        assert "leray" in capsys.readouterr().out
        with open(out) as file:
            summary = json.load(file)
        assert [row["n"] for row in summary["inequalities"]] == [16, 32]
        stability = summary["stability"]["leray"]
        assert stability["resolutions"] == [16, 32]
        ratios = stability["max_ratios"]
        assert stability["growth"] == pytest.approx(ratios[1] / ratios[0])
        assert len(summary["simulations"]) == 1

    def test_duplicate(self, tmp_path):
        self._verify(tmp_path / "a.json", 16)
        self._verify(tmp_path / "b.json", 16)
        paths = [str(tmp_path / "a.json"), str(tmp_path / "b.json")]
        with pytest.raises(ReportError, match="duplicate"):
            consolidate(paths)
        assert dispatch(["report", *paths]) == 2

    def test_unknown_schema(self, tmp_path):
        path = tmp_path / "other.json"
        path.write_text(json.dumps({"value": 1.0}))
        with pytest.raises(ReportError, match="unknown report schema"):
            consolidate([str(path)])
        assert dispatch(["report", str(path)]) == 2
