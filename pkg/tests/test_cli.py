import json
import shutil
import subprocess
import sys
from pathlib import Path

import pytest

from qshuffle import cli
from qshuffle.exactring import ONE

GOLDEN = Path(__file__).parent / "golden"
FAST = [(name, argv) for name, argv in cli.GOLDENS if name not in ("classify_n4",)]


def call(capsys, *argv):
    status = cli.main(list(argv), _env_seed=False)
    out = capsys.readouterr()
    return status, out.out, out.err


@pytest.mark.parametrize("name,argv", FAST, ids=[n for n, _ in FAST])
def test_golden(name, argv):
    expected = (GOLDEN / cli.golden_name(name, argv)).read_text(encoding="utf-8")
    assert cli.render_golden(argv) == expected


def test_every_golden_file_is_registered():
    files = {p.name for p in GOLDEN.iterdir()}
    assert files == {cli.golden_name(n, a) for n, a in cli.GOLDENS}


def test_det_text(capsys):
    status, out, _ = call(capsys, "det", "--n", "2")
    assert status == 0 and out == "1 - s12\n"


def test_det_json_schema(capsys):
    status, out, _ = call(capsys, "det", "--n", "3", "--factor", "--format", "json")
    d = json.loads(out)
    assert status == 0 and d["schema"] == 1 and d["command"] == "det"


def test_usage_errors_exit_2(capsys):
    assert call(capsys, "det", "--n", "1")[0] == 2
    assert call(capsys, "det", "--n", "3", "--sigma-one", "1,1")[0] == 2
    assert call(capsys, "det")[0] == 2
    assert call(capsys, "nonsense")[0] == 2
    status, _, err = call(capsys, "classify", "--n", "5")
    assert status == 2 and "SizeTooLarge" in err


def test_missing_constraints_file_exit_2(capsys, tmp_path):
    status, _, err = call(capsys, "det", "--n", "3", "--constraints", str(tmp_path / "none.json"))
    assert status == 2 and err.startswith("error:")


def test_mismatch_exit_3(capsys, monkeypatch):
    real = cli.braid.varchenko_det
    monkeypatch.setattr(cli.braid, "varchenko_det", lambda arr: real(arr) + ONE)
    status, out, _ = call(capsys, "varchenko", "--n", "2", "--format", "json")
    assert status == 3
    assert json.loads(out)["verdict"] == "MISMATCH"


def test_constraints_file_equals_flags(capsys, tmp_path):
    path = tmp_path / "q.json"
    path.write_text(json.dumps({"n": 3, "sigma_one": [[1, 2]]}), encoding="utf-8")
    a = call(capsys, "det", "--n", "3", "--constraints", str(path), "--factor")
    b = call(capsys, "det", "--n", "3", "--sigma-one", "1,2", "--factor")
    assert a[0] == 0 and a[1] == b[1]


def test_constraints_file_for_other_n(capsys, tmp_path):
    path = tmp_path / "q.json"
    path.write_text(json.dumps({"n": 4, "sigma_one": [[1, 2]]}), encoding="utf-8")
    assert call(capsys, "det", "--n", "3", "--constraints", str(path))[0] == 2


def test_constraints_file_with_unknown_key(capsys, tmp_path):
    path = tmp_path / "q.json"
    path.write_text(json.dumps({"n": 3, "subsets": [[1, 2]]}), encoding="utf-8")
    assert call(capsys, "det", "--n", "3", "--constraints", str(path))[0] == 2


def test_output_file(capsys, tmp_path):
    target = tmp_path / "out.txt"
    status, out, _ = call(capsys, "det", "--n", "3", "--factor", "--output", str(target))
    assert status == 0 and out == ""
    assert target.read_text(encoding="utf-8") == "(1-s12)^2 (1-s13)^2 (1-s23)^2 (1-s123)^1\n"


def test_seed_changes_the_point(capsys):
    argv = ["constants", "--n", "3", "--force", "1,2,3", "--format", "json"]
    a = json.loads(call(capsys, *argv, "--seed", "0")[1])
    b = json.loads(call(capsys, *argv, "--seed", "7")[1])
    assert a != b


def test_seed_environment_overrides_flag(capsys, monkeypatch):
    argv = ["constants", "--n", "3", "--force", "1,2,3", "--format", "json"]
    ref = call(capsys, *argv, "--seed", "7")[1]
    monkeypatch.setenv("QSHUFFLE_SEED", "7")
    assert cli.main(argv + ["--seed", "0"]) == 0
    assert capsys.readouterr().out == ref
    monkeypatch.setenv("QSHUFFLE_SEED", "x")
    assert cli.main(argv) == 2


def test_repeated_runs_are_identical(capsys):
    argv = ["table", "--n", "4", "--sigma-one", "1,2", "--format", "json"]
    assert call(capsys, *argv)[1] == call(capsys, *argv)[1]


def test_regen_goldens_reports_changes(capsys, tmp_path):
    corpus = tmp_path / "golden"
    shutil.copytree(GOLDEN, corpus)
    target = corpus / cli.golden_name(*cli.GOLDENS[0])
    target.write_text("stale\n", encoding="utf-8")
    diffs = cli.regenerate_goldens(corpus)
    assert [p for p, _ in diffs] == [str(target)]
    assert "-stale" in diffs[0][1]
    assert target.read_text(encoding="utf-8") == "stale\n"
    cli.regenerate_goldens(corpus, write=True)
    assert cli.regenerate_goldens(corpus) == []


def test_installed_entry_point():
    exe = shutil.which("qshuffle")
    argv = [exe] if exe else [sys.executable, "-m", "qshuffle.cli"]
    res = subprocess.run(argv + ["det", "--n", "2", "--factor"], capture_output=True, text=True, check=False)
    assert res.returncode == 0 and res.stdout == "(1-s12)^1\n"
