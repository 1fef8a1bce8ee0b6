import csv
import io
import json

import pytest

from toeplitz_chains import bdi
from toeplitz_chains.cli import dump_json, parse_range, run
from toeplitz_chains.parallel import THREADS_ENV, ordered_map, worker_count
from toeplitz_chains.errors import ValidationError


@pytest.fixture
def quartic(tmp_path):
    path = tmp_path / "q.json"
    path.write_text(json.dumps(bdi(n_P=2, inside=[0.5], outside=[3.0]).to_document()))
    return path


def _run_json(capsys, *argv):
    code = run([str(a) for a in argv])
    out = capsys.readouterr().out
    return code, (json.loads(out) if code == 0 and out.strip().startswith("{") else out)


def test_analyze_envelope(capsys, quartic):
    code, doc = _run_json(capsys, "analyze", quartic)
    assert code == 0
    assert set(doc) == {"command", "schema", "model_digest", "payload", "warnings"}
    p = doc["payload"]
    assert p["omega"] == 0 and p["genericity"]["strongly_generic"]
    assert p["bond_dimension"]["chi_lower"] == p["bond_dimension"]["chi_upper"] == 2
    assert p["order_parameter"] == pytest.approx(0.96, rel=1e-15)
    assert doc["model_digest"] == bdi(n_P=2, inside=[0.5], outside=[3.0]).digest()


def test_output_is_deterministic(capsys, quartic):
    outs = []
    for _ in range(2):
        assert run(["corr-matrix", str(quartic), "--N", "1..4"]) == 0
        outs.append(capsys.readouterr().out)
    assert outs[0] == outs[1]


def test_string_corr_csv(tmp_path, quartic):
    out = tmp_path / "o.csv"
    assert run(["string-corr", str(quartic), "--alpha", "1", "--N", "1..30", "--csv", str(out)]) == 0
    rows = list(csv.reader(io.StringIO(out.read_text())))
    assert rows[0] == ["alpha", "N", "value", "dominant_rM", "method"]
    assert len(rows) == 31
    assert float(rows[1][2]) == 0.15  # 17 significant digits round-trip
    assert float(rows[1][3]) == pytest.approx(1 / 3)


def test_verify_reports_matrix(capsys, quartic):
    code, doc = _run_json(capsys, "verify", quartic, "--N", "1..12", "--alpha", "-3..5")
    assert code == 0 and doc["payload"]["passed"]
    assert doc["payload"]["matrix"]["2"]["1"] == "n/a"
    assert doc["payload"]["matrix"]["0"]["5"] == "pass"


def test_other_commands_run(capsys, quartic, tmp_path):
    for argv in (["efp", quartic, "--N", "1..3"], ["transfer", quartic],
                 ["corr-matrix", quartic, "--N", "2", "--lambda", "0.3+0.1j"]):
        code, doc = _run_json(capsys, *argv)
        assert code == 0, doc
    generic = tmp_path / "g.json"
    generic.write_text(json.dumps(bdi(n_P=1, inside=[0.5], outside=[3.0], multiplicity=1).to_document()))
    code, doc = _run_json(capsys, "approximate", generic, "--m", "1..3", "--format", "json")
    assert code == 0 and [r["m"] for r in doc["payload"]["rows"]] == [1, 2, 3]


def test_exit_codes(capsys, tmp_path, quartic):
    assert run(["bogus", str(quartic)]) == 2
    assert run(["analyze", str(tmp_path / "missing.json")]) == 2
    assert run(["string-corr", str(quartic)]) == 2  # --alpha is required
    assert run(["string-corr", str(quartic), "--alpha", "3..1"]) == 2
    assert run(["approximate", str(quartic)]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text('{"class": "BDI", "n_P": 0, "zeros_inside": [[1.0, 0.0]]}')
    assert run(["analyze", str(bad)]) == 2
    odd = tmp_path / "odd.json"
    odd.write_text(json.dumps(bdi(n_P=1, inside=[0.5]).to_document()))
    assert run(["transfer", str(odd)]) == 2
    coincident = tmp_path / "c.json"
    coincident.write_text(json.dumps(bdi(n_P=2, inside=[0.5, 0.5], outside=[3.0]).to_document()))
    assert run(["string-corr", str(coincident), "--alpha", "0", "--N", "3"]) == 0
    assert run(["string-corr", str(coincident), "--alpha", "0", "--N", "3", "--strict"]) == 3
    assert run(["--version"]) == 0
    capsys.readouterr()


def test_strict_escalates_warnings(tmp_path):
    weak = tmp_path / "weak.json"  # generic but not strongly generic
    weak.write_text(json.dumps(bdi(n_P=2, inside=[0.5, -0.5]).to_document()))
    out = tmp_path / "a.json"
    assert run(["analyze", str(weak), "--out", str(out)]) == 0
    assert json.loads(out.read_text())["warnings"]
    assert run(["analyze", str(weak), "--strict", "--out", str(out)]) == 3


def test_stdin_model(monkeypatch, capsys):
    monkeypatch.setattr("sys.stdin", io.StringIO(json.dumps(bdi(n_P=1, inside=[0.5]).to_document())))
    code, doc = _run_json(capsys, "efp", "-", "--N", "1..2")
    assert code == 0 and len(doc["payload"]["values"]) == 2


def test_threads_env(monkeypatch, capsys, quartic):
    monkeypatch.setenv(THREADS_ENV, "4")
    assert worker_count() == 4
    assert ordered_map(lambda x: x * x, range(10)) == [x * x for x in range(10)]
    _, par = _run_json(capsys, "string-corr", quartic, "--alpha", "-1..1", "--N", "1..6")
    monkeypatch.setenv(THREADS_ENV, "1")
    _, ser = _run_json(capsys, "string-corr", quartic, "--alpha", "-1..1", "--N", "1..6")
    assert par == ser
    monkeypatch.setenv(THREADS_ENV, "0")
    with pytest.raises(ValidationError):
        worker_count()
    assert run(["efp", str(quartic)]) == 2


def test_formatting_helpers():
    assert parse_range("2..4") == [2, 3, 4] and parse_range("-1") == [-1]
    text = dump_json({"x": 0.1, "c": 1 + 2j, "inf": float("inf"), "nan": float("nan"), "z": -0.0})
    doc = json.loads(text)
    assert doc == {"x": 0.1, "c": [1, 2], "inf": "inf", "nan": "nan", "z": 0}
