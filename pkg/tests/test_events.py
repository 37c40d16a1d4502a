"""Tests for event extraction and impact reconstruction."""

from src.agents.event_agent import event_agent, neg_ability_clues
from src.models.schemas import (
    Aspect,
    EvidenceKind,
    ImpactStatus,
    Modality,
    Partition,
    Polarity,
    WordClass,
)


def event_with(analysis, lemma: str):
    return next(event for event in analysis.events if event.predicate_lemma == lemma)


def test_collision_verb_is_the_predicate(analyze) -> None:
    hit = event_with(analyze("T1"), "hit")
    assert hit.predicate_class == WordClass.collision_verb
    assert hit.polarity == Polarity.positive
    assert hit.aspect == Aspect.simple


def test_negated_ability_to_stop(analyze) -> None:
    stop = event_with(analyze("T15"), "stop")
    assert stop.polarity == Polarity.negated
    assert stop.modality == Modality.ability


def test_negated_ability_to_avoid(analyze) -> None:
    analysis = analyze("T8")
    clues = neg_ability_clues(analysis.events)
    assert [(event.predicate_lemma, kind) for event, kind in clues] == [
        ("avoid", EvidenceKind.neg_ability_avoidance)
    ]


def test_progressive_and_pluperfect_aspects(analyze) -> None:
    assert event_with(analyze("T8"), "drive").aspect == Aspect.progressive
    switch = event_with(analyze("T7"), "switch")
    assert switch.aspect == Aspect.pluperfect
    assert switch.predicate_class == WordClass.signal_verb


def test_intention_governs_motion_verb(analyze) -> None:
    change = event_with(analyze("T7"), "change")
    assert change.aspect == Aspect.intentional
    assert change.predicate_class == WordClass.motion_verb
    assert event_with(analyze("T5"), "enter").aspect == Aspect.intentional


def test_events_in_text_order(analyze) -> None:
    events = analyze("T2").events
    assert [event.id for event in events] == list(range(len(events)))
    assert [event.clause for event in events] == sorted(event.clause for event in events)


def test_explicit_impact(analyze) -> None:
    impact = analyze("T7").impact
    assert impact.status == ImpactStatus.explicit
    assert [evidence.kind for evidence in impact.evidence] == [EvidenceKind.collision_lexeme]
    assert impact.participants is not None


def test_inferred_impact_from_clues(analyze) -> None:
    impact = analyze("T15").impact
    assert impact.status == ImpactStatus.inferred
    assert [evidence.kind for evidence in impact.evidence] == [EvidenceKind.neg_ability_stop]


def test_default_impact_without_clues(analyze) -> None:
    impact = analyze("T9").impact
    assert impact.status == ImpactStatus.inferred
    assert [evidence.kind for evidence in impact.evidence] == [EvidenceKind.parameter_c_default]
    assert impact.evidence[0].clause is None


def test_absent_impact_when_accident_is_not_assumed(analyze, kb) -> None:
    analysis = analyze("T3")
    partition = Partition(entities=analysis.entities, cost=len(analysis.entities))
    assert event_agent.detect_explicit_impact(analysis.events, partition, kb) is None
    impact = event_agent.infer_impact(analysis.events, partition, kb, assume_accident=False)
    assert impact.status == ImpactStatus.absent
    assert impact.evidence == []
    assert impact.participants is None


def test_negated_collision_is_not_explicit(analyze) -> None:
    negated = [event.model_copy(update={"polarity": Polarity.negated}) for event in analyze("T1").events]
    assert event_agent.detect_explicit_impact(negated) is None


def test_attenuating_circumstances(analyze, kb, load_text) -> None:
    from src.services.corpus_service import segment

    found = event_agent.detect_attenuating_circumstances(segment(load_text("T4"), kb), kb)
    assert [match.entry.lemma for _, match in found] == ["slippery"]
