import json

import pytest

from src.api.cli import EXIT_INPUT, EXIT_OK, EXIT_REDUCTION, build_parser, main
from src.core.exact import RationalFunction, parse_ratfun
from src.core.exceptions import ReductionFailure


@pytest.fixture(autouse=True)
def isolated_settings(monkeypatch, tmp_path):
    monkeypatch.setenv("ZETA_CACHE_DIR", str(tmp_path / "cache"))
    monkeypatch.chdir(tmp_path)


def test_compute_plain(capsys):
    assert main(["compute", "--preset", "L_{3,2}"]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "s/(s - 1)"
    assert lines[1] == "omega = 1"
    assert lines[2] == "weight = 0"


def test_compute_json_with_eps(capsys):
    assert main(["compute", "--preset", "L_{3,2}", "--eps", "--format", "json"]) == EXIT_OK
    data = json.loads(capsys.readouterr().out)
    assert RationalFunction.from_json(data["zeta"]) == parse_ratfun("2s/(2s-3)")
    assert data["omega"] == "3/2"


def test_compute_latex_from_file(tmp_path, capsys):
    path = tmp_path / "h.json"
    path.write_text('{"name": "H", "dim": 3, "brackets": {"[1,2]": {"3": "1"}}}', encoding="utf-8")
    assert main(["compute", "--input", str(path), "--format", "latex"]) == EXIT_OK
    assert "frac" in capsys.readouterr().out


def test_compute_with_cache_and_trace(tmp_path, capsys):
    assert main(["compute", "--preset", "L_{4,3}", "--cache"]) == EXIT_OK
    assert list((tmp_path / "cache").iterdir())
    trace = tmp_path / "trace.jsonl"
    assert main(["compute", "--preset", "L_{4,3}", "--trace", str(trace)]) == EXIT_OK
    events = [json.loads(line)["event"] for line in trace.read_text(encoding="utf-8").splitlines()]
    assert events[0] == "datum"
    assert "contribution" in events


@pytest.mark.parametrize("argv", [
    ["compute", "--preset", "L_{9,9}"],
    ["compute", "--input", "missing.json"],
    ["compute", "--preset", "L_{3,2}", "--oracle", "only", "--jobs", "0"],
])
def test_compute_input_errors(argv):
    assert main(argv) == EXIT_INPUT


def test_compute_reduction_failure(monkeypatch):
    def fail(algebra, config):
        raise ReductionFailure("stuck", depth=3)

    monkeypatch.setattr("src.api.cli.topological_rep_zeta", fail)
    assert main(["compute", "--preset", "L_{3,2}"]) == EXIT_REDUCTION


def test_check(capsys):
    assert main(["check", "s/(s-1)", "--derived-dim", "1", "--dim", "3"]) == EXIT_OK
    out = capsys.readouterr().out
    assert out.startswith("s/(s - 1)")
    assert "omega_positive: True" in out

    assert main(["check", "s/(s-2)", "--derived-dim", "1"]) == EXIT_INPUT
    assert "FAIL" in capsys.readouterr().out

    assert main(["check", "s/(s-1)"]) == EXIT_INPUT
    assert main(["check", "--preset", "L_{5,8}"]) == EXIT_OK


def test_corpus_command(tmp_path, capsys):
    report = tmp_path / "report.csv"
    assert main(["corpus", "--filter", "L_{3,2}", "--report", str(report)]) == EXIT_OK
    out = capsys.readouterr().out
    assert "pass" in out
    assert "3/2" in out
    assert report.exists()

    assert main(["corpus", "--filter", "no such algebra"]) == EXIT_OK
    assert main(["corpus", "--corpus", str(tmp_path / "none.json")]) == EXIT_INPUT


def test_corpus_mismatch_exit_code(tmp_path, capsys):
    path = tmp_path / "corpus.json"
    path.write_text(json.dumps({"entries": [
        {"name": "wrong", "algebra": "L_{3,2}", "dim": 3, "expected_zeta": "s/(s-2)"}]}), encoding="utf-8")
    assert main(["corpus", "--corpus", str(path)]) == EXIT_INPUT
    assert "wrong: mismatch" in capsys.readouterr().err


def test_list_presets(capsys):
    assert main(["list-presets"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "L_{6,26}\tdim=6\tderived=3" in out
    assert "(= L_{3,2})" in out


def test_parser_requires_command():
    with pytest.raises(SystemExit):
        build_parser().parse_args([])
    with pytest.raises(SystemExit):
        build_parser().parse_args(["compute"])
