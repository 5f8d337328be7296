import json

import pytest

from cayleyspec.cli import run


def call(capsys, *argv):
    code = run(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_spectrum_command(capsys):
    code, out, _ = call(capsys, "spectrum", "--group", "Z2", "--level", "3")
    doc = json.loads(out)
    assert code == 0
    assert len(doc["atoms"]) == 6 and doc["total"] == 8


def test_numeric_spectrum_command(capsys):
    code, out, _ = call(capsys, "spectrum", "--group", "S3", "--level", "2", "--numeric")
    assert code == 0
    assert json.loads(out)["total"] == 36


def test_kns_csv(capsys):
    code, out, _ = call(capsys, "kns", "--n", "2", "--qmax", "2", "--format", "csv")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "p,q,value,weight"
    assert lines[1:] == ["1,2,0.0,1/3"]


def test_bad_level_is_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        run(["spectrum", "--group", "Z2", "--level", "-1"])
    assert exc.value.code == 2


def test_unknown_group_is_domain_error(capsys):
    code, _, err = call(capsys, "spectrum", "--group", "nope", "--level", "1")
    assert code == 1 and "error" in err


def test_repeat_runs_identical(capsys):
    argv = ["walk", "--group", "Z3", "--steps", "6", "--mc", "200", "--seed", "4"]
    first = call(capsys, *argv)[1]
    assert call(capsys, *argv)[1] == first


def test_out_file(tmp_path, capsys):
    target = tmp_path / "fix.json"
    code, out, _ = call(capsys, "fix", "--group", "Z2", "--element", "x", "--levels", "6", "--out", str(target))
    assert code == 0 and out == ""
    assert json.loads(target.read_text())


@pytest.mark.parametrize("argv", [
    ["machine", "--group", "S3"],
    ["moments", "--group", "Z2", "--level", "3"],
    ["depth", "--group", "S3", "--element", "x^2 [120] x^-2"],
    ["free", "--group", "Z2", "--word-len", "2", "--kmax", "5"],
    ["zeta", "--group", "Z2", "--level", "2", "-R", "4", "--verdict"],
    ["zeta", "--limit", "--n", "2", "-R", "4"],
    ["structure", "--group", "S3", "--theorem", "1", "--n", "1"],
    ["structure", "--group", "Q8", "--theorem", "2", "--n", "3"],
    ["verify", "--only", "2", "3"],
])
def test_commands_run(capsys, argv):
    code, out, _ = call(capsys, *argv)
    assert code == 0
    json.loads(out)


def test_zeta_needs_arguments(capsys):
    with pytest.raises(SystemExit) as exc:
        run(["zeta", "-R", "3"])
    assert exc.value.code == 2


def test_level_budget_from_environment(monkeypatch, capsys):
    monkeypatch.setenv("CAYLEYSPEC_LEVEL_BUDGET", "8")
    code, _, err = call(capsys, "spectrum", "--group", "Z2", "--level", "5")
    assert code == 1 and "error" in err
