"""Command-line interface tests: exit codes, formats, corpus handling."""

import json

import pytest

from sabcorr.cli import load_corpus, main
from sabcorr.syntax import Box, Dia, Prop
from sabcorr.semantics import Ineq


def test_parse_command(capsys):
    assert main(["parse", "--formula", "<!>[]p -> []<!>p"]) == 0
    out = capsys.readouterr().out
    assert out == "lhs: <!>[]p\nrhs: []<!>p\n"


def test_parse_error_exit_2(capsys):
    assert main(["parse", "--formula", "p -> ("]) == 2
    assert "parse error" in capsys.readouterr().err


def test_classify_exit_codes(capsys):
    assert main(["classify", "--formula", "[]p -> p"]) == 0
    out = capsys.readouterr().out
    assert "sahlqvist" in out and "p=1" in out
    assert main(["classify", "--formula", "[]<>p -> <>[]p"]) == 1
    assert "not sahlqvist" in capsys.readouterr().out


def test_classify_json(capsys):
    assert main(["classify", "--formula", "[]p -> p", "--format", "json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["sahlqvist"] is True
    assert data["order_type"] == {"p": "1"}
    assert any(e["excellent"] for e in data["variables"]["p"])


def test_classify_order_type_override(capsys):
    # p -> <>[]p is Sahlqvist with eps(p)=1 but not with eps(p)=d
    assert main(["classify", "--formula", "p -> <>[]p"]) == 0
    capsys.readouterr()
    assert main(["classify", "--formula", "p -> <>[]p",
                 "--order-type", "p=d"]) == 1
    capsys.readouterr()


def test_correspond_text_and_failure(capsys):
    assert main(["correspond", "--formula", "[]p -> p"]) == 0
    out = capsys.readouterr().out
    assert "order type: p=1" in out
    assert "forall" in out
    assert main(["correspond", "--formula", "[]<>p -> <>[]p"]) == 1
    assert "failure" in capsys.readouterr().out


def test_correspond_json_and_tptp(capsys):
    assert main(["correspond", "--formula", "[]p -> p",
                 "--format", "json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["order_type"] == {"p": "1"}
    assert isinstance(data["fo"], dict) and data["quasis"]
    assert main(["correspond", "--formula", "[]p -> p",
                 "--format", "tptp"]) == 0
    assert "fof(corr, axiom," in capsys.readouterr().out


def test_correspond_trace_file(tmp_path, capsys):
    trace = tmp_path / "trace.json"
    assert main(["correspond", "--formula", "<>p -> p",
                 "--trace", str(trace)]) == 0
    capsys.readouterr()
    steps = json.loads(trace.read_text())
    assert steps[0]["stage"] == "first-approximation"
    for step in steps:
        assert set(step) == {"stage", "rule", "consumed", "produced"}


def test_verify_pass_and_counts(capsys):
    assert main(["verify", "--formula", "[]p -> p", "--max-worlds", "3"]) == 0
    assert "PASS over 530 frames" in capsys.readouterr().out


def test_verify_failure_input(capsys):
    assert main(["verify", "--formula", "[]<>p -> <>[]p"]) == 1
    assert "failure" in capsys.readouterr().out


def test_verify_max_worlds_cap(capsys):
    assert main(["verify", "--formula", "[]p -> p", "--max-worlds", "9"]) == 2
    assert "--max-worlds" in capsys.readouterr().err


def test_missing_file_exit_2(capsys):
    assert main(["parse", "--file", "/nonexistent/file.sml"]) == 2
    capsys.readouterr()


def test_formula_from_file(tmp_path, capsys):
    path = tmp_path / "in.sml"
    path.write_text("[]p -> p\n")
    assert main(["parse", "--file", str(path)]) == 0
    assert "lhs: []p" in capsys.readouterr().out


# ---------------------------------------------------------------------------
# corpus

def test_load_corpus(tmp_path):
    path = tmp_path / "c.txt"
    path.write_text("# a comment\n"
                    "name: T-axiom []p -> p\n"
                    "<>p <= p  # trailing comment\n"
                    "\n")
    entries = load_corpus(path)
    assert len(entries) == 2
    assert entries[0] == ("T-axiom", Ineq(Box(Prop("p")), Prop("p")))
    assert entries[1] == ("<>p <= p", Ineq(Dia(Prop("p")), Prop("p")))


def test_load_corpus_error_names_line(tmp_path):
    path = tmp_path / "c.txt"
    path.write_text("[]p -> p\n\n\n\n\n\np -> (\n")
    with pytest.raises(ValueError) as exc:
        load_corpus(path)
    assert "line 7" in str(exc.value)


def test_corpus_command(tmp_path, capsys):
    path = tmp_path / "c.txt"
    path.write_text("name: T []p -> p\nname: D top -> <!>top\n")
    assert main(["corpus", "--file", str(path), "--max-worlds", "2"]) == 0
    out = capsys.readouterr().out
    assert "T" in out and "verified" in out


def test_corpus_command_flags_not_sahlqvist(tmp_path, capsys):
    path = tmp_path / "c.txt"
    path.write_text("[]<>p -> <>[]p\n")
    assert main(["corpus", "--file", str(path), "--max-worlds", "2"]) == 1
    assert "not-sahlqvist" in capsys.readouterr().out


def test_shipped_corpus_loads():
    from pathlib import Path
    corpus = Path(__file__).resolve().parent.parent / "corpus" / "sahlqvist.txt"
    entries = load_corpus(corpus)
    labels = [label for label, _ in entries]
    assert len(entries) >= 12
    assert "T" in labels and "commute" in labels
