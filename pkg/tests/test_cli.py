import csv
import io
import json
import subprocess
import sys

import pytest

from csminimal import cli
from csminimal.errors import ShootingError, SymmetryError
from csminimal.validate import Check


@pytest.fixture
def run(tmp_path, monkeypatch, capsys):
    monkeypatch.chdir(tmp_path)
    monkeypatch.setenv(cli.CACHE_ENV, str(tmp_path / "cache"))

    def go(*argv):
        code = cli.main(list(argv))
        out = capsys.readouterr()
        return code, out.out, out.err
    return go


def test_profile_schema(run, tmp_path):
    code, out, _ = run("profile", "--n", "2")
    assert code == 0
    doc = json.loads((tmp_path / "profile_n2.json").read_text())
    for key in ("r0", "theta0", "period"):
        assert isinstance(doc[key], float)
    assert doc["n"] == 2


def test_profile_cache_byte_identical(run, tmp_path):
    run("profile", "--n", "2")
    first = (tmp_path / "profile_n2.json").read_bytes()
    cached = list((tmp_path / "cache").iterdir())
    assert len(cached) == 1
    run("profile", "--n", "2")
    assert (tmp_path / "profile_n2.json").read_bytes() == first
    run("profile", "--n", "2", "--no-cache", "--out", "fresh")
    assert (tmp_path / "fresh" / "profile_n2.json").read_bytes() == first


def test_cached_reports_identical(run):
    _, a, _ = run("yau", "--n", "2")
    _, b, _ = run("yau", "--n", "2")
    _, c, _ = run("yau", "--n", "2", "--no-cache")
    assert a == b == c


def test_profile_self_convergence(run, tmp_path):
    run("profile", "--n", "2", "--out", "a")
    run("profile", "--n", "2", "--ode-tol", "1e-13", "--out", "b")
    ra = json.loads((tmp_path / "a" / "profile_n2.json").read_text())["r0"]
    rb = json.loads((tmp_path / "b" / "profile_n2.json").read_text())["r0"]
    assert abs(ra - rb) < 1e-9


def test_index_lower_bound(run):
    code, out, _ = run("index", "--n", "2")
    assert code == 0
    assert '"index_lower_bound": 15' in out
    assert json.loads(out)["index_computed"] >= 15


def test_index_csv(run):
    code, out, _ = run("index", "--n", "2", "--format", "csv")
    assert code == 0
    assert out.splitlines()[0] == "n,i,j,negatives,weight,contribution"


def test_yau_range_rows(run):
    code, out, _ = run("yau", "--n", "2..5", "--workers", "4")
    assert code == 0
    rows = json.loads(out)
    assert [r["n"] for r in rows] == [2, 3, 4, 5]
    assert all(r["consistent"] is True for r in rows)


def test_yau_csv_and_workers_deterministic(run):
    _, a, _ = run("yau", "--n-range", "2..3", "--format", "csv")
    _, b, _ = run("yau", "--n-range", "2..3", "--format", "csv", "--workers", "2")
    assert a == b
    rows = list(csv.DictReader(io.StringIO(a)))
    assert len(rows) == 2 and rows[0]["consistent"] == "true"


def test_validate_passes(run):
    code, out, _ = run("validate", "--n", "3")
    assert code == 0
    assert json.loads(out)["passed"] is True


def test_spectrum_and_frames(run, tmp_path):
    code, out, _ = run("spectrum", "--n", "2", "--lambda-max", "4")
    assert code == 0
    assert json.loads(out)["spectrum"][1]["multiplicity"] == 5
    code, _, _ = run("frames", "--n", "2", "--samples", "8")
    assert code == 0
    assert len((tmp_path / "frames_n2.csv").read_text().splitlines()) == 9


def test_report_to_file(run, tmp_path):
    code, out, _ = run("index", "--n", "2", "--out", "idx.json")
    assert code == 0 and out == ""
    assert json.loads((tmp_path / "idx.json").read_text())["n"] == 2


@pytest.mark.parametrize("argv", [
    [], ["bogus"], ["index"], ["index", "--n", "1"], ["index", "--n", "5..3"],
    ["index", "--n", "2", "--n-range", "2..3"], ["index", "--n", "x"],
    ["index", "--n", "2", "--ode-tol", "0"], ["index", "--n", "2", "--format", "xml"],
])
def test_usage_errors(run, argv):
    with pytest.raises(SystemExit) as exc:
        code = cli.main(argv)
        raise SystemExit(code)
    assert exc.value.code == 1


def test_numeric_failure_exit(run, monkeypatch):
    def boom(params):
        raise ShootingError("no bracket", scan=[(0.1, 0.2), (0.3, 0.4)])
    monkeypatch.setattr(cli, "build_curve", boom)
    code, _, err = run("profile", "--n", "2", "--no-cache")
    assert code == 2
    assert "mismatch" in err


def test_invariant_failure_exit(run, monkeypatch):
    monkeypatch.setattr(cli, "run_all", lambda c: [Check("geometry", "x", 1.0, 1e-8, False)])
    code, _, err = run("validate", "--n", "2")
    assert code == 3
    assert "FAIL" in err

    def bad(params):
        raise SymmetryError("broken")
    monkeypatch.setattr(cli, "build_curve", bad)
    code, _, _ = run("profile", "--n", "2", "--no-cache")
    assert code == 3


def test_console_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "csminimal.cli", "index", "--n", "2",
                           "--cache-dir", str(tmp_path)], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["index_lower_bound"] == 15
