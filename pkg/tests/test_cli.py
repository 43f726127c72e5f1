import csv
import io
import json
import subprocess
import sys

import jsonschema
import pytest

from klorth.cli import (
    EXIT_FAIL, EXIT_OK, EXIT_USAGE, evaluate, moments_table, report_schema, run, run_captured,
)
from klorth.moments import MomentRoute, mu
from klorth.orthokl import WeightSpec, basis_for
from klorth.specfun import macdonald_real


def rows_of(text):
    return list(csv.reader(io.StringIO(text)))


def test_mandatory_report(mandatory_report):
    assert mandatory_report["status"] == EXIT_OK
    doc = mandatory_report["doc"]
    jsonschema.validate(doc, report_schema())
    assert doc["summary"]["fail"] == 0
    assert doc["summary"]["adjudicated"] > 0
    assert {r["name"] for r in doc["results"]} >= {"mu2-closed-form", "a1-closed-form"}
    assert all(r["category"] != "EXTENDED" for r in doc["results"])
    assert "summary:" in mandatory_report["text"]


def test_report_csv_rectangular(mandatory_report):
    rows = rows_of(mandatory_report["csv_path"].read_text())
    assert rows[0][:3] == ["name", "params", "lhs"]
    assert len({len(r) for r in rows}) == 1
    assert len(rows) - 1 == len(mandatory_report["doc"]["results"])


def test_report_floats_round_trip(mandatory_report):
    text = mandatory_report["json_path"].read_text()
    doc = json.loads(text)
    rec = next(r for r in doc["results"] if r["name"] == "mu0-closed")
    assert isinstance(rec["lhs"], float)
    assert repr(rec["lhs"]) in text


def test_exit_code_on_failure(tmp_path):
    path = tmp_path / "r.json"
    status, _ = run_captured(["verify", "--only", "imk-identity", "--tol", "imk-identity:0:0",
                              "--json", str(path), "--quiet"])
    doc = json.loads(path.read_text())
    jsonschema.validate(doc, report_schema())
    if doc["summary"]["fail"]:
        assert status == EXIT_FAIL
    assert doc["config"]["tolerance_overrides"] == {"imk-identity": {"tol_abs": 0.0, "tol_rel": 0.0}}


def test_exit_code_gating_failure():
    status, _ = run_captured(["verify", "--only", "dk-deriv", "--tol", "dk-deriv:0:0", "--quiet"])
    assert status == EXIT_FAIL


@pytest.mark.parametrize("argv", [
    [],
    ["frobnicate"],
    ["verify", "--bogus"],
    ["verify", "--only", "no-such-check"],
    ["verify", "--tol", "imk-identity:abc"],
    ["verify", "--tol", "nope:0:0"],
    ["verify", "--workers", "0"],
    ["verify", "--all", "--mandatory"],
    ["table", "moments", "--n", "2"],
    ["table", "moments", "--x", "1", "--n", "13"],
    ["table", "basis", "--weight", "wilson", "--n", "2"],
    ["table", "basis", "--x", "1", "--n", "8"],
    ["eval", "kiu"],
    ["eval", "kiu", "--x", "0"],
    ["eval", "phi", "--x", "1"],
    ["eval", "weight", "--a", "1,2"],
    ["--config", "/nonexistent/klorth.ini", "eval", "kiu", "--x", "1"],
])
def test_usage_errors(argv, capsys):
    assert run(argv) == EXIT_USAGE


def test_unknown_check_lists_names(capsys):
    run(["verify", "--only", "no-such-check"])
    err = capsys.readouterr().err
    assert "no-such-check" in err and "wilson-4gamma" in err


def test_version(capsys):
    with pytest.raises(SystemExit) as info:
        run(["--version"])
    assert info.value.code == 0
    assert "klorth" in capsys.readouterr().out


def test_table_moments_bitwise(tmp_path):
    path = tmp_path / "m.csv"
    status, text = run_captured(["table", "moments", "--x", "1", "--n", "2", "--csv", str(path)])
    assert status == EXIT_OK
    rows = rows_of(path.read_text())
    assert rows[0] == ["n", "x", "mu_cosh", "mu_laplace", "mu_direct"]
    assert len({len(r) for r in rows}) == 1
    for k in range(3):
        for i, r in enumerate((MomentRoute.COSH, MomentRoute.LAPLACE, MomentRoute.DIRECT)):
            assert float(rows[k + 1][2 + i]) == mu(k, 1.0, r)
    assert float(rows[1][2]) == pytest.approx(0.1789040769594125, rel=1e-13)
    assert float(rows[2][2]) == pytest.approx(0.10985040670066128, rel=1e-13)
    assert "mu_cosh" in text


def test_moments_table_function():
    header, rows = moments_table(0.5, 1)
    assert len(header) == 5 and len(rows) == 2


@pytest.mark.parametrize("argv", [
    ["table", "basis", "--weight", "kl", "--x", "1", "--n", "3"],
    ["table", "basis", "--weight", "imk", "--x", "0.5", "--n", "2"],
    ["table", "basis", "--weight", "rek", "--x", "2", "--n", "2"],
    ["table", "basis", "--weight", "wilson", "--a", "0.6,0.8,1.0", "--n", "3"],
    ["table", "basis", "--weight", "wilson", "--a", "1", "1", "1", "1", "--n", "2"],
])
def test_table_basis(argv, tmp_path):
    path = tmp_path / "b.csv"
    status, _ = run_captured(argv + ["--csv", str(path)])
    assert status == EXIT_OK
    rows = rows_of(path.read_text())
    n = int(argv[argv.index("--n") + 1])
    assert rows[0][:4] == ["n", "A_n", "B_n", "leading"]
    assert len(rows) == n + 2 and len({len(r) for r in rows}) == 1


def test_table_basis_values(tmp_path):
    path = tmp_path / "b.csv"
    run_captured(["table", "basis", "--x", "1", "--n", "2", "--csv", str(path)])
    rows = rows_of(path.read_text())
    b = basis_for(WeightSpec.kl(1.0), 3)
    assert float(rows[1][4]) == b.coeffs[0, 0]
    assert float(rows[3][3]) == b.leading[2]


def test_eval_kiu(capsys):
    status, text = run_captured(["eval", "kiu", "--tau", "0", "--x", "1"])
    assert status == EXIT_OK
    assert float(text.split()[0]) == pytest.approx(0.4210244382407083, rel=1e-14)


def test_eval_json():
    status, text = run_captured(["eval", "weight", "--tau", "1", "--a", "1,1,1", "--json"])
    doc = json.loads(text)
    assert status == EXIT_OK and doc["kind"] == "weight"
    assert doc["error_estimate"] <= 1e-12 * doc["value"]


@pytest.mark.parametrize("kind, kw", [
    ("rek", dict(tau=0.0, x=1.0)),
    ("imk", dict(tau=1.0, x=1.0)),
    ("phi", dict(tau=0.0, x=1.0, a=(0.6, 0.8, 1.0))),
])
def test_evaluate(kind, kw):
    v, e = evaluate(kind, **kw)
    assert e >= 0 and e <= 1e-8 * abs(v)
    if kind == "rek":
        assert v == pytest.approx(macdonald_real(1.0, 1.0), rel=1e-12)


def test_config_file(tmp_path):
    cfg = tmp_path / "k.ini"
    cfg.write_text("[table]\nx = 2\nn = 1\n\n[eval]\nx = 2\n")
    path = tmp_path / "m.csv"
    status, _ = run_captured(["--config", str(cfg), "table", "moments", "--csv", str(path)])
    assert status == EXIT_OK
    rows = rows_of(path.read_text())
    assert float(rows[1][1]) == 2.0 and len(rows) == 3
    # the command line wins over the file
    status, _ = run_captured(["--config", str(cfg), "table", "moments", "--n", "0", "--csv", str(path)])
    assert len(rows_of(path.read_text())) == 2
    status, text = run_captured(["--config", str(cfg), "eval", "kiu", "--x", "1"])
    assert float(text.split()[0]) == pytest.approx(0.4210244382407083, rel=1e-14)


def test_config_bad_key(tmp_path):
    cfg = tmp_path / "k.ini"
    cfg.write_text("[table]\ncolour = blue\n")
    assert run(["--config", str(cfg), "table", "moments"]) == EXIT_USAGE


def test_config_selection(tmp_path):
    cfg = tmp_path / "k.ini"
    cfg.write_text("[verify]\nonly = gen-func mu0-closed\nquiet = yes\n")
    path = tmp_path / "r.json"
    status, text = run_captured(["--config", str(cfg), "verify", "--json", str(path)])
    assert status == EXIT_OK
    doc = json.loads(path.read_text())
    assert {r["name"] for r in doc["results"]} == {"gen-func", "mu0-closed"}
    assert text.strip().startswith("summary:")


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "klorth", "eval", "kiu", "--x", "2"],
                         capture_output=True, text=True, check=True)
    assert float(out.stdout.split()[0]) == pytest.approx(0.11389387274953344, rel=1e-13)
