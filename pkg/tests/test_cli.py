import json

import pytest

from lamcost.cli import main
from lamcost.metrics import CSV_HEADER


def call(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_run_reports_json(capsys) -> None:
    code, out, _ = call(capsys, "run", "--expr", r"(\x. x x) (\z. z)", "--machine", "mam")
    assert code == 0
    data = json.loads(out)
    assert data["status"] == "final" and data["cost_units"] == 9
    assert data["tallies"]["beta"] == 2 and data["decoded"] == r"\z. z"


def test_run_reference_strategy(capsys) -> None:
    code, out, _ = call(capsys, "run", "--expr", r"(\x. x) ((\y. y) z)", "--machine", "ref-ri")
    assert code == 0 and json.loads(out)["steps"] == 2
    # weak head reduction does not go under the abstraction
    code, out, _ = call(capsys, "run", "--expr", r"\a. (\x. x) a", "--machine", "ref-wh")
    assert json.loads(out)["steps"] == 0
    code, out, _ = call(capsys, "run", "--expr", r"\a. (\x. x) a", "--machine", "ref-ri")
    assert json.loads(out)["steps"] == 1


def test_run_writes_trace_and_metrics(tmp_path, capsys) -> None:
    trace, metrics = tmp_path / "t.txt", tmp_path / "m.json"
    src = tmp_path / "term.lam"
    src.write_text("-- duplicate the identity\n(\\x. x x) (\\z. z)\n")
    code, out, _ = call(capsys, "run", "--file", str(src), "--machine", "mam",
                        "--trace", str(trace), "--metrics", str(metrics))
    assert code == 0
    assert trace.read_text().splitlines()[0] == "0 search 1 6"
    assert json.loads(metrics.read_text()) == json.loads(out)


def test_run_fuel_exhausted(capsys) -> None:
    code, out, _ = call(capsys, "run", "--expr", r"(\x. x x) (\x. x x)", "--machine", "kam-list",
                        "--fuel", "20")
    assert code == 0 and json.loads(out)["status"] == "fuel_exhausted"


def test_syntax_error_exits_2_with_grammar(capsys) -> None:
    code, _, err = call(capsys, "run", "--expr", r"(\x. x", "--machine", "mam")
    assert code == 2
    assert "1:7" in err and "term grammar" in err


def test_usage_errors_exit_2(capsys) -> None:
    for argv in (["run", "--machine", "mam"], ["run", "--expr", "x", "--machine", "secd"],
                 ["family", "--name", "ui", "--n", "0"], ["bench", "--machines", "secd"],
                 ["run", "--expr", "x", "--machine", "mam", "--fuel", "0"], []):
        with pytest.raises(SystemExit) as exc:
            main(argv)
        assert exc.value.code == 2
    assert "term grammar" in capsys.readouterr().err


def test_missing_file(capsys, tmp_path) -> None:
    code, _, err = call(capsys, "run", "--file", str(tmp_path / "nope"), "--machine", "mam")
    assert code == 2 and "cannot read" in err


def test_family_print_and_size(capsys) -> None:
    code, out, _ = call(capsys, "family", "--name", "u", "--n", "1")
    assert code == 0 and out.strip() == r"\x. \y. y x x"
    code, out, _ = call(capsys, "family", "--name", "r", "--n", "100", "--size-only")
    assert code == 0 and int(out) == 6 * 2**100 - 4


def test_family_respects_size_cap(capsys, monkeypatch) -> None:
    monkeypatch.setenv("LAM_SIZE_CAP", "100")
    code, _, err = call(capsys, "family", "--name", "s", "--n", "12")
    assert code == 1 and "--size-only" in err


def test_bench_csv_to_file(tmp_path, capsys) -> None:
    out = tmp_path / "bench.csv"
    code, stdout, err = call(capsys, "bench", "--machines", "mam,kam-list", "--families", "ui",
                             "--n-min", "1", "--n-max", "4", "--out", str(out))
    assert code == 0 and stdout == ""
    lines = out.read_text().splitlines()
    assert lines[0] == ",".join(CSV_HEADER) and len(lines) == 9
    assert "slope mam ui 1.0000" in err


def test_bench_json_stdout(capsys) -> None:
    code, out, _ = call(capsys, "bench", "--machines", "mam", "--families", "chain",
                        "--n-max", "3", "--format", "json")
    assert code == 0 and [r["n"] for r in json.loads(out)] == [1, 2, 3]


def test_bench_unwritable_output(tmp_path, capsys) -> None:
    code, _, err = call(capsys, "bench", "--machines", "mam", "--n-max", "2",
                        "--out", str(tmp_path / "no" / "x.csv"))
    assert code == 1 and "cannot write" in err


def test_check_conformance_small_corpus(capsys) -> None:
    code, out, _ = call(capsys, "check", "--suite", "conformance", "--corpus-size", "30",
                        "--machines", "mam,kam-list")
    assert code == 0 and "suite conformance: PASS" in out
