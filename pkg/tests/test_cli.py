import json
from pathlib import Path

import pytest

from sgalg.cli import main

GAMES = Path(__file__).resolve().parent.parent / "games"


@pytest.fixture(autouse=True)
def sequential(monkeypatch):
    monkeypatch.setenv("SG_ALG_THREADS", "1")


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_validate_text(capsys):
    code, out, _ = run(capsys, "validate", GAMES / "example1.game")
    assert code == 0
    assert "status: ok" in out
    assert "actions: 3x3 3x3" in out
    assert "classes: switching-controller" in out


def test_validate_json(capsys):
    code, out, _ = run(capsys, "validate", GAMES / "example2.game", "--json")
    assert code == 0
    doc = json.loads(out)
    assert doc["states"] == 2
    assert doc["classes"] == []


def test_solve_json(capsys):
    code, out, _ = run(capsys, "solve", GAMES / "example1.game", "--beta", "1/2", "--json")
    assert code == 0
    doc = json.loads(out)
    assert [st["value"]["exact"] for st in doc["states"]] == ["145/71", "45/71"]
    assert doc["shift"] == "3"
    assert "timings" not in doc


def test_solve_text_with_system(capsys):
    code, out, _ = run(
        capsys, "solve", GAMES / "example1.game", "--beta", "1/2", "--emit-system", "--timings"
    )
    assert code == 0
    assert "value: 145/71 (2.0422535211)" in out
    assert "system:" in out
    assert "timings:" in out


def test_iterate_span(capsys):
    code, out, _ = run(
        capsys, "iterate", GAMES / "example1.game", "--beta", "9/10", "--bounds", "span", "--json"
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["bounds"] == "span"
    assert len(doc["values"]) == 2
    assert float(doc["error_bound"]) <= 1e-9


def test_limit_json(capsys):
    code, out, _ = run(capsys, "limit", GAMES / "example1.game", "--kmax", "4", "--json")
    assert code == 0
    doc = json.loads(out)
    assert [st["value"]["exact"] for st in doc["states"]] == ["113/79", "113/79"]
    assert doc["kernel_agreement"] >= 2


def test_matrix_value(capsys):
    code, out, _ = run(capsys, "matrix-value", GAMES / "rps.matrix")
    assert code == 0
    assert "value: 0" in out
    assert "x: 1/3 1/3 1/3" in out
    code, out, _ = run(capsys, "matrix-value", GAMES / "pennies.matrix", "--json")
    doc = json.loads(out)
    assert doc["value"] == "2"
    assert doc["kernel"] == {"rows": [1, 2], "cols": [1, 2]}


@pytest.mark.parametrize(
    "argv",
    [
        ["solve", GAMES / "example1.game", "--beta", "3/2"],
        ["solve", GAMES / "example1.game"],
        ["iterate", GAMES / "example1.game", "--beta", "1/2", "--tol", "0"],
        ["solve", GAMES / "example1.game", "--beta", "1/2", "--mode", "average"],
        ["validate", "no-such-file.game"],
        ["transpose", GAMES / "example1.game"],
    ],
)
def test_usage_errors(capsys, argv):
    code, _, _ = run(capsys, *argv)
    assert code == 1


def test_parse_errors(capsys, tmp_path):
    empty = tmp_path / "empty.game"
    empty.write_text("")
    code, _, err = run(capsys, "validate", empty)
    assert code == 2
    assert err.startswith("error:")

    bad = tmp_path / "bad.game"
    bad.write_text((GAMES / "example1.game").read_text().replace("3/10", "0.3", 1))
    code, _, _ = run(capsys, "solve", bad, "--beta", "1/2")
    assert code == 2
