"""Tests for Strategy A / Strategy B device tagging."""

import pytest

from src.agents.analysis_orchestrator import analysis_orchestrator
from src.agents.argumentation_agent import ArgumentationAgent, argumentation_agent
from src.models.schemas import DEVICE_STRATEGY, DeviceKind, Report, Strategy

CORPUS_IDS = ("T1", "T2", "T3", "T4", "T5", "T7", "T8", "T9", "T10", "T11", "T12", "T14", "T15")


def devices_of(analysis, kind: DeviceKind):
    return [device for device in analysis.devices if device.kind == kind]


def excerpt(load_text, report_id: str, device) -> str:
    return load_text(report_id).body[device.span.start : device.span.end]


@pytest.mark.parametrize("report_id", CORPUS_IDS)
def test_strategy_follows_kind(analyze, report_id: str) -> None:
    for device in analyze(report_id).devices:
        if device.kind == DeviceKind.correct_behavior_assertion:
            assert device.self_exculpatory
        else:
            assert device.strategy == DEVICE_STRATEGY[device.kind]
            assert not device.self_exculpatory


@pytest.mark.parametrize("report_id", CORPUS_IDS)
def test_summary_counts_devices(analyze, report_id: str) -> None:
    analysis = analyze(report_id)
    summary = analysis.strategy_summary
    assert summary.a_count == sum(device.strategy == Strategy.A for device in analysis.devices)
    assert summary.b_count == sum(device.strategy == Strategy.B for device in analysis.devices)
    assert sum(summary.by_kind.values()) == len(analysis.devices)
    starts = [device.span.start for device in analysis.devices]
    assert starts == sorted(starts)


def test_denied_right_of_way_names_the_rule(analyze, load_text) -> None:
    blame = devices_of(analyze("T4"), DeviceKind.explicit_blame_lexeme)
    assert [excerpt(load_text, "T4", device) for device in blame] == ["denies"]
    assert blame[0].rule == "priority-to-right"


def test_blinding_headlights(analyze, load_text) -> None:
    analysis = analyze("T10")
    blame = devices_of(analysis, DeviceKind.explicit_blame_lexeme)
    assert blame[0].rule == "headlights-dipped"
    violations = devices_of(analysis, DeviceKind.implicit_rule_violation)
    assert [excerpt(load_text, "T10", device) for device in violations] == ["full white headlights"]
    speed = devices_of(analysis, DeviceKind.excessive_speed)
    assert [excerpt(load_text, "T10", device) for device in speed] == ["great speed"]


def test_passing_on_the_right(analyze, load_text) -> None:
    analysis = analyze("T11")
    violation = devices_of(analysis, DeviceKind.implicit_rule_violation)[0]
    assert excerpt(load_text, "T11", violation) == "passed me on the right"
    assert violation.rule == "pass-on-left"
    blame = devices_of(analysis, DeviceKind.explicit_blame_lexeme)
    assert [excerpt(load_text, "T11", device) for device in blame] == ["slalom"]


def test_leaving_private_premises(analyze, load_text) -> None:
    violation = devices_of(analyze("T14"), DeviceKind.implicit_rule_violation)[0]
    assert excerpt(load_text, "T14", violation) == "coming out of a private building garage"
    assert violation.rule == "yield-leaving-premises"


def test_cutting_back_needs_ground_markings(analyze, kb) -> None:
    violations = devices_of(analyze("T12"), DeviceKind.implicit_rule_violation)
    assert [device.note for device in violations] == ["cut-back-across-markings"]

    unmarked = analysis_orchestrator.analyze(Report(id="u", body="Vehicle B cut back in on my vehicle."), kb)
    assert devices_of(unmarked, DeviceKind.implicit_rule_violation) == []
    assert len(devices_of(unmarked, DeviceKind.explicit_blame_lexeme)) == 1


def test_assertion_sides_with_the_majority(analyze) -> None:
    a_side = devices_of(analyze("T12"), DeviceKind.correct_behavior_assertion)
    assert [device.strategy for device in a_side] == [Strategy.A]
    assert a_side[0].note == "right-lane-straight"
    b_side = devices_of(analyze("T8"), DeviceKind.correct_behavior_assertion)
    assert {device.strategy for device in b_side} == {Strategy.B}
    assert b_side[0].rule == "drive-on-right"


def test_passive_suppresses_the_agent(analyze, load_text) -> None:
    suppressed = devices_of(analyze("T8"), DeviceKind.agent_suppression)
    assert [excerpt(load_text, "T8", device) for device in suppressed] == ["was completely thrown"]
    assert suppressed[0].note == "passive"


def test_writer_vehicle_moving_by_itself(analyze, load_text) -> None:
    suppressed = devices_of(analyze("T4"), DeviceKind.agent_suppression)
    assert "skids" in [excerpt(load_text, "T4", device) for device in suppressed]


def test_surprise_is_the_writer_s(kb) -> None:
    writer = analysis_orchestrator.analyze(Report(id="w", body="I was surprised."), kb)
    other = analysis_orchestrator.analyze(Report(id="o", body="The driver was surprised."), kb)
    assert len(devices_of(writer, DeviceKind.surprise_lexeme)) == 1
    assert devices_of(other, DeviceKind.surprise_lexeme) == []


def test_neg_ability_contrast_spans_the_negation(analyze, load_text) -> None:
    contrast = devices_of(analyze("T15"), DeviceKind.neg_ability_contrast)
    assert [excerpt(load_text, "T15", device) for device in contrast] == ["n't stop"]
    assert contrast[0].note == "neg-ability-stop"


def test_attenuating_circumstance(analyze, load_text) -> None:
    found = devices_of(analyze("T2"), DeviceKind.attenuating_circumstance)
    assert [excerpt(load_text, "T2", device) for device in found] == ["wet"]


def test_significant_modifiers(analyze) -> None:
    lemmas = [modifier.lemma for modifier in analyze("T5").significant_modifiers]
    assert "intense" in lemmas
    assert "one-way" in lemmas


def test_summary_of_no_devices() -> None:
    summary = ArgumentationAgent.summarize_strategies([])
    assert (summary.a_count, summary.b_count, summary.by_kind, summary.devices) == (0, 0, {}, [])
    assert argumentation_agent.name == "argumentation_agent"
