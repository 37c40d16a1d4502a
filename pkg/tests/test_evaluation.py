"""Tests for gold annotations and corpus runs."""

import json
import shutil

import pytest

from src.models.errors import GoldParseError
from src.models.schemas import GoldAnnotation, ImpactStatus
from src.services.evaluation_service import compare, evaluation_service, load_gold, load_gold_dir


def write_gold(directory, report_id: str, **fields) -> None:
    document = {"report_id": report_id, "expected_entity_count": 2, "expected_impact_status": "explicit", **fields}
    (directory / f"{report_id}.gold.json").write_text(json.dumps(document), encoding="utf-8")


async def test_shipped_corpus_matches_gold(kb, corpus_dir) -> None:
    run = await evaluation_service.run_corpus(corpus_dir, corpus_dir, kb)
    assert len(run.rows) == 13
    failing = {row.report_id: row.mismatches for row in run.rows if not row.passed}
    assert failing == {}
    assert all(row.has_gold for row in run.rows)
    assert run.exit_status == 0


async def test_empty_corpus(kb, tmp_path) -> None:
    run = await evaluation_service.run_corpus(tmp_path, tmp_path, kb)
    assert run.rows == []
    assert run.exit_status == 0
    assert evaluation_service.render_table(run).splitlines()[0].split() == [
        "id",
        "entities",
        "impact",
        "#A",
        "#B",
        "ambiguity",
        "status",
    ]


async def test_missing_gold_is_not_a_failure(kb, corpus_dir, tmp_path) -> None:
    shutil.copy(corpus_dir / "T1.en.txt", tmp_path)
    run = await evaluation_service.run_corpus(tmp_path, tmp_path, kb)
    assert [row.has_gold for row in run.rows] == [False]
    assert run.exit_status == 0
    assert "NO GOLD" in evaluation_service.render_table(run)


async def test_mismatch_fails_the_run(kb, corpus_dir, tmp_path) -> None:
    shutil.copy(corpus_dir / "T9.en.txt", tmp_path)
    write_gold(tmp_path, "T9", expected_clue_kinds=["collision-lexeme"])
    run = await evaluation_service.run_corpus(tmp_path, tmp_path, kb)
    assert run.rows[0].mismatches[0].startswith("impact: expected explicit")
    assert run.exit_status == 1
    assert "FAIL" in evaluation_service.render_table(run)


async def test_corrupted_gold_names_the_file(kb, corpus_dir, tmp_path) -> None:
    shutil.copy(corpus_dir / "T1.en.txt", tmp_path)
    (tmp_path / "T1.gold.json").write_text('{"report_id": "T1",', encoding="utf-8")
    with pytest.raises(GoldParseError, match="T1.gold.json"):
        await evaluation_service.run_corpus(tmp_path, tmp_path, kb)


def test_gold_schema_is_strict(tmp_path) -> None:
    write_gold(tmp_path, "T1", expected_devices=["suddenness"])
    with pytest.raises(GoldParseError, match="expected_devices"):
        load_gold(tmp_path / "T1.gold.json")


def test_gold_requires_an_entity_count(tmp_path) -> None:
    document = {"report_id": "T1", "expected_impact_status": "explicit"}
    (tmp_path / "T1.gold.json").write_text(json.dumps(document), encoding="utf-8")
    with pytest.raises(GoldParseError, match="expected_entity_count"):
        load_gold(tmp_path / "T1.gold.json")


def test_every_shipped_gold_counts_entities(corpus_dir) -> None:
    counts = {report_id: gold.expected_entity_count for report_id, gold in load_gold_dir(corpus_dir).items()}
    assert len(counts) == 13
    assert all(count >= 2 for count in counts.values())


def test_gold_dir_is_keyed_by_report(corpus_dir, tmp_path) -> None:
    annotations = load_gold_dir(corpus_dir)
    assert annotations["T7"].expected_entity_count == 2
    assert annotations["T15"].expected_impact_status == ImpactStatus.inferred
    assert load_gold_dir(tmp_path / "missing") == {}


def test_extra_devices_do_not_fail(analyze) -> None:
    analysis = analyze("T10")
    gold = GoldAnnotation(
        report_id="T10",
        expected_entity_count=2,
        expected_impact_status=ImpactStatus.explicit,
        expected_clue_kinds=["collision-lexeme"],
        expected_device_kinds=["excessive-speed"],
    )
    mismatches, extra = compare(analysis, gold)
    assert mismatches == []
    assert "explicit-blame-lexeme" in extra


def test_clue_kinds_compare_as_multiset(analyze) -> None:
    gold = GoldAnnotation(
        report_id="T15",
        expected_entity_count=2,
        expected_impact_status=ImpactStatus.inferred,
        expected_clue_kinds=["neg-ability-stop", "neg-ability-stop"],
    )
    mismatches, _ = compare(analyze("T15"), gold)
    assert [mismatch.split(":")[0] for mismatch in mismatches] == ["clues"]
