"""Tests for the analysis pipeline output and warnings."""

from src.agents.analysis_orchestrator import analysis_orchestrator, detect_warnings, render_json
from src.config.settings import settings
from src.models.schemas import AnalysisReport, ImpactFinding, ImpactStatus, Report, WarningKind


def test_json_round_trip(analyze) -> None:
    analysis = analyze("T14")
    rendered = render_json(analysis)
    parsed = AnalysisReport.model_validate_json(rendered)
    assert parsed == analysis
    assert render_json(parsed) == rendered


def test_pretty_json_is_the_same_document(analyze) -> None:
    analysis = analyze("T4")
    pretty = render_json(analysis, pretty=True)
    assert pretty.startswith('{\n  "report_id": "T4"')
    assert AnalysisReport.model_validate_json(pretty) == analysis


def test_repeated_runs_are_identical(kb, load_text) -> None:
    report = load_text("T2")
    first = render_json(analysis_orchestrator.analyze(report, kb))
    second = render_json(analysis_orchestrator.analyze(report, kb))
    assert first == second


async def test_async_analysis_matches(kb, load_text, analyze) -> None:
    analysis = await analysis_orchestrator.aanalyze(load_text("T5"), kb)
    assert render_json(analysis) == render_json(analyze("T5"))


def test_empty_body(kb) -> None:
    analysis = analysis_orchestrator.analyze(Report(id="E", body=""), kb)
    assert analysis.warnings == [WarningKind.empty_body]
    assert analysis.entities == []
    assert analysis.events == []
    assert analysis.impact is None
    assert analysis.strategy_summary.a_count == 0


def test_complete_report_has_no_warnings(analyze) -> None:
    assert analyze("T7").warnings == []


def test_fragment_warnings(analyze) -> None:
    warnings = analyze("T9").warnings
    assert WarningKind.fragment in warnings
    assert WarningKind.no_accident_lexeme in warnings
    assert WarningKind.fragment in analyze("T3").warnings


def test_fragment_status_comes_from_the_report(analyze, load_text, monkeypatch) -> None:
    assert load_text("T9").fragment is True
    assert load_text("T15").fragment is None
    # No final period, yet a whole report
    assert WarningKind.fragment not in analyze("T15").warnings
    monkeypatch.setattr(settings.corpus, "fragment_ids", ["T15"])
    assert load_text("T15").fragment is True


def test_fragment_falls_back_to_a_lowercase_start() -> None:
    impact = ImpactFinding(status=ImpactStatus.explicit, participants=(0, 1))
    assert detect_warnings(Report(id="F", body="the car hit me"), impact) == [WarningKind.fragment]
    assert detect_warnings(Report(id="F", body="The car hit me"), impact) == []
    assert detect_warnings(Report(id="F", body="The car hit me.", fragment=True), impact) == [WarningKind.fragment]


def test_long_report_warning() -> None:
    report = Report(id="L", body="I hit the car.\n\nThe car was stopped.")
    impact = ImpactFinding(status=ImpactStatus.explicit, participants=(0, 1))
    assert detect_warnings(report, impact) == [WarningKind.text_too_long]


def test_missing_second_participant() -> None:
    report = Report(id="P", body="I hit it.")
    impact = ImpactFinding(status=ImpactStatus.inferred)
    assert detect_warnings(report, impact) == [
        WarningKind.missing_second_participant,
        WarningKind.no_accident_lexeme,
    ]


def test_warnings_can_be_disabled(kb, load_text, monkeypatch) -> None:
    monkeypatch.setattr(settings.analyzer, "warnings_enabled", False)
    analysis = analysis_orchestrator.analyze(load_text("T9"), kb)
    assert analysis.warnings == []
