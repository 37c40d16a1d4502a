"""Tests for the command line entry point."""

import json

import pytest

from src.main import EXIT_INPUT_ERROR, EXIT_MISMATCH, EXIT_OK, main

from .conftest import CORPUS_DIR, KB_DIR


def run(argv: list[str]) -> int:
    with pytest.raises(SystemExit) as exit_info:
        main(argv)
    return exit_info.value.code


def test_analyze_prints_json(capsys) -> None:
    assert run(["--log-level", "ERROR", "analyze", str(CORPUS_DIR / "T7.en.txt")]) == EXIT_OK
    document = json.loads(capsys.readouterr().out)
    assert document["report_id"] == "T7"
    assert document["impact"]["status"] == "explicit"


def test_analyze_pretty(capsys) -> None:
    assert run(["analyze", str(CORPUS_DIR / "T9.en.txt"), "--pretty", "--kb", str(KB_DIR)]) == EXIT_OK
    assert capsys.readouterr().out.startswith('{\n  "report_id": "T9"')


def test_analyze_missing_file() -> None:
    assert run(["analyze", str(CORPUS_DIR / "T99.en.txt")]) == EXIT_INPUT_ERROR


def test_corpus_table(capsys) -> None:
    assert run(["corpus", str(CORPUS_DIR)]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("id")
    assert len(lines) == 2 + 13
    assert all(line.rstrip().endswith("PASS") for line in lines[2:])


def test_corpus_mismatch(tmp_path, capsys) -> None:
    (tmp_path / "X1.en.txt").write_text("I hit the car.", encoding="utf-8")
    gold = {"report_id": "X1", "expected_entity_count": 2, "expected_impact_status": "absent"}
    (tmp_path / "X1.gold.json").write_text(json.dumps(gold), encoding="utf-8")
    assert run(["corpus", str(tmp_path)]) == EXIT_MISMATCH
    assert "FAIL" in capsys.readouterr().out


def test_kb_check(capsys) -> None:
    assert run(["kb", "check", str(KB_DIR)]) == EXIT_OK
    assert capsys.readouterr().out.startswith("concepts: ")


def test_kb_check_broken_dir(tmp_path) -> None:
    (tmp_path / "hierarchy.tsv").write_text("a\tisa\tb\nb\tisa\ta\n", encoding="utf-8")
    (tmp_path / "rules.tsv").write_text("", encoding="utf-8")
    (tmp_path / "lexicon.tsv").write_text("", encoding="utf-8")
    assert run(["kb", "check", str(tmp_path)]) == EXIT_INPUT_ERROR
