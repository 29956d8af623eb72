"""Command line behavior: output modes and the exit-code contract
(0 clean, 1 best-effort, 2 impossible or failed, 3 usage)."""

import json
import pathlib

import pytest

import regex2dpl
from regex2dpl.cli import main

DATA_DIR = pathlib.Path(regex2dpl.__file__).parent / "data"


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_convert_safe_prints_pattern(capsys):
    code, out, err = run(capsys, "convert", "(?<name>abc)")
    assert code == 0
    assert out == '"abc":name\n'
    assert err == ""


def test_convert_best_effort_exits_one_with_notes(capsys):
    code, out, err = run(capsys, "convert", r"(?<rc>\d{3}).*")
    assert code == 1
    assert out.strip() == "DIGIT{3}:rc LD*"
    assert "line-data scan" in err


def test_convert_impossible_exits_two(capsys):
    code, out, err = run(capsys, "convert", "(?<a>b)*")
    assert code == 2
    assert out == ""
    assert "quantified named capturing group" in err


def test_convert_syntax_error_exits_two(capsys):
    code, _, err = run(capsys, "convert", "(a")
    assert code == 2
    assert "position 2" in err


def test_convert_unsupported_feature_exits_two(capsys):
    code, _, err = run(capsys, "convert", "(?!x)y")
    assert code == 2
    assert "negative lookahead" in err


def test_convert_json_output(capsys):
    code, out, _ = run(capsys, "convert", "--json", r"(?<rc>\d{3})")
    assert code == 0
    body = json.loads(out)
    assert body["dpl"] == "DIGIT{3}:rc"
    assert body["classification"] == "safe"
    assert {"dpl", "classification", "fragments", "notes", "impossible_reason"} <= set(body)


def test_convert_reads_regex_from_file(tmp_path, capsys):
    source = tmp_path / "pattern.txt"
    source.write_text("(?<name>abc)\n")
    code, out, _ = run(capsys, "convert", "--file", str(source))
    assert code == 0
    assert out.strip() == '"abc":name'


def test_validate_safe_passes(capsys):
    code, out, _ = run(
        capsys, "validate", "--regex", r"(?<rc>\d{3})", "--samples", "15", "--negatives", "15"
    )
    assert code == 0
    assert out.startswith("result    PASS")


def test_validate_best_effort_pass_exits_one(capsys):
    # a possessive optional group is flagged but behaves identically here
    code, out, _ = run(capsys, "validate", "--regex", "(ab)?+x", "--samples", "10")
    assert code == 1
    assert out.startswith("result    PASS")


def test_validate_failure_exits_two(capsys):
    code, out, _ = run(
        capsys, "validate", "--regex", r"\w+[a-z]", "--samples", "10", "--negatives", "10"
    )
    assert code == 2
    assert out.startswith("result    FAIL")
    assert "fail" in out


def test_validate_impossible_exits_two(capsys):
    code, _, err = run(capsys, "validate", "--regex", "(?<a>b)*")
    assert code == 2
    assert "cannot validate" in err


def test_validate_json_output(capsys):
    code, out, _ = run(
        capsys, "validate", "--regex", r"(?<rc>\d{3})", "--samples", "8", "--json"
    )
    assert code == 0
    body = json.loads(out)
    assert body["classification"] == "safe"
    assert body["passed"] is True


def test_census_renders_table_and_json(capsys):
    fixture = str(DATA_DIR / "census_fixture.txt")
    code, out, _ = run(capsys, "census", "--corpus", fixture)
    assert code == 0
    assert out.splitlines()[0].startswith("Feature")

    code, json_out, _ = run(capsys, "census", "--corpus", fixture, "--json")
    assert code == 0
    rows = json.loads(json_out)
    assert {"feature", "total", "affected", "affected_pct"} <= set(rows[0])


def test_census_missing_file_is_usage_error(capsys):
    code, _, err = run(capsys, "census", "--corpus", "/no/such/file.txt")
    assert code == 3
    assert "cannot read" in err


def test_evaluate_corpus(tmp_path, capsys):
    corpus = tmp_path / "corpus.txt"
    corpus.write_text("a+b\n(?<a>b)*\n\\w+[a-z]\n")
    code, out, _ = run(
        capsys, "evaluate", "--corpus", str(corpus), "--samples", "10", "--negatives", "10"
    )
    assert code == 1  # all safe regexes pass, a best-effort one is present
    assert "safe passing    1/1" in out

    code, json_out, _ = run(
        capsys, "evaluate", "--corpus", str(corpus), "--samples", "10", "--json"
    )
    assert code == 1
    body = json.loads(json_out)
    assert body["classification"] == {"safe": 1, "best-effort": 1, "impossible": 1}


def test_optimize_prints_suggestions(capsys):
    code, out, _ = run(capsys, "optimize", "--dpl", "DIGIT{1,5}:ip_port")
    assert code == 0
    assert "fragment 0 -> INT" in out

    code, json_out, _ = run(capsys, "optimize", "--dpl", "DIGIT{1,5}:ip_port", "--json")
    body = json.loads(json_out)
    assert body["suggestions"][0]["matcher"] == "INT"

    code, out, _ = run(capsys, "optimize", "--dpl", '"just text"')
    assert code == 0
    assert out.strip() == "no suggestions"


def test_optimize_bad_pattern_exits_two(capsys):
    code, _, err = run(capsys, "optimize", "--dpl", "DIGIT{")
    assert code == 2
    assert "pattern error" in err


def test_usage_errors_exit_three(capsys):
    assert run(capsys, "no-such-command")[0] == 3
    assert run(capsys, "convert")[0] == 3  # neither regex nor --file
    assert run(capsys, "validate")[0] == 3  # --regex required
    assert run(capsys)[0] == 3


def test_help_exits_zero(capsys):
    assert run(capsys, "--help")[0] == 0
