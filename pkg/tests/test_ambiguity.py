"""Tests for ambiguity detection and writer-aware resolution."""

import pytest

from src.agents.ambiguity_agent import (
    ACCIDENT_REFERENCE,
    ACTION_STARTED,
    PURELY_INTENTIONAL,
    AmbiguityAgent,
    intention_readings,
)
from src.models.schemas import (
    AmbiguityKind,
    AmbiguitySite,
    EvidenceKind,
    ImpactEvidence,
    ImpactFinding,
    ImpactStatus,
    Reading,
    Span,
    WriterBehavior,
)

EXPLICIT = ImpactFinding(
    status=ImpactStatus.explicit,
    evidence=[ImpactEvidence(kind=EvidenceKind.collision_lexeme, clause=0)],
)


def make_site(readings: list[Reading]) -> AmbiguitySite:
    return AmbiguitySite(
        kind=AmbiguityKind.lexical,
        span=Span(start=0, end=5),
        tokens=Span(start=0, end=1),
        clause=0,
        readings=readings,
    )


CORRECT = Reading(label="correct", writer_behavior=WriterBehavior.correct, explains_accident=False)
AT_FAULT = Reading(label="at-fault", writer_behavior=WriterBehavior.at_fault, explains_accident=True)
NEUTRAL = Reading(label="neutral", writer_behavior=WriterBehavior.neutral, explains_accident=False)


@pytest.mark.parametrize("readings", [[CORRECT, AT_FAULT], [AT_FAULT, CORRECT]])
def test_accident_explanation_dominates(readings: list[Reading]) -> None:
    resolved = AmbiguityAgent.resolve_ambiguity(make_site(readings), EXPLICIT)
    assert resolved.chosen.label == "at-fault"
    assert sum(reading.chosen for reading in resolved.readings) == 1
    assert resolved.note.endswith("resolved by accident-explicability")


@pytest.mark.parametrize("readings", [[CORRECT, AT_FAULT], [AT_FAULT, CORRECT]])
def test_without_accident_the_writer_is_correct(readings: list[Reading]) -> None:
    absent = ImpactFinding(status=ImpactStatus.absent)
    for impact in (None, absent):
        resolved = AmbiguityAgent.resolve_ambiguity(make_site(readings), impact)
        assert resolved.chosen.label == "correct"
        assert "correct-behavior-preference" in resolved.note


def test_neutral_beats_at_fault() -> None:
    at_fault = AT_FAULT.model_copy(update={"explains_accident": False})
    resolved = AmbiguityAgent.resolve_ambiguity(make_site([at_fault, NEUTRAL]), EXPLICIT)
    assert resolved.chosen.label == "neutral"


def test_resolution_keeps_the_input_site() -> None:
    site = make_site([CORRECT, AT_FAULT])
    AmbiguityAgent.resolve_ambiguity(site, EXPLICIT)
    assert site.chosen is None


def test_get_ready_glosses() -> None:
    readings = intention_readings("get ready")
    assert [reading.label for reading in readings] == [PURELY_INTENTIONAL, ACTION_STARTED]
    assert readings[0].gloss.startswith("inchoative")
    assert readings[1].explains_accident


def test_stopped_writer_signal_and_lane_change(analyze) -> None:
    sites = analyze("T7").ambiguity_sites
    assert [site.kind for site in sites] == [AmbiguityKind.pluperfect_reference, AmbiguityKind.intention_vs_action]
    assert [site.chosen.label for site in sites] == [ACCIDENT_REFERENCE, ACTION_STARTED]
    assert sites[1].note.startswith("'get ready' governing 'change'")


def test_opponent_actions_raise_no_site(analyze) -> None:
    assert analyze("T12").ambiguity_sites == []
    # The hauler's driver switched the blinker on, not the writer
    assert [site.kind for site in analyze("T2").ambiguity_sites] == [AmbiguityKind.intention_vs_action]


def test_french_droite_reads_right(analyze, load_text) -> None:
    analysis = analyze("T8", "fr")
    body = load_text("T8", "fr").body
    assert [site.kind for site in analysis.ambiguity_sites] == [AmbiguityKind.lexical, AmbiguityKind.lexical]
    for site in analysis.ambiguity_sites:
        assert body[site.span.start : site.span.end] == "droite"
        assert site.chosen.label == "right"
        assert site.chosen.writer_behavior == WriterBehavior.correct
