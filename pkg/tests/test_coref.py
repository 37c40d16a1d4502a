"""Tests for minimality-driven coreference and its brute-force oracle."""

import random
import time
from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.agents.analysis_orchestrator import analysis_orchestrator
from src.agents.coref_agent import coref_agent, restricted_growth_strings
from src.models.errors import CorefCapExceededError, OracleSizeError
from src.models.schemas import Definiteness, GrammaticalRole, ImpactStatus, Mention, Possessor, Report, Span
from src.services.knowledge_service import load_knowledge_dir

from .conftest import KB_DIR

NOUN_CONCEPTS = ("car", "truck", "hauler", "vehicle", "driver", "person", "witness", "door", "blinker", "trailer")
BELL = [1, 1, 2, 5, 15, 52, 203, 877]
FULL_TEXTS = ("T2", "T5", "T7", "T8", "T12", "T14", "T15")
SHIPPED = ("T1", "T2", "T3", "T4", "T5", "T7", "T8", "T9", "T10", "T11", "T12", "T14", "T15")


def make_mention(
    i: int,
    concept: str,
    definiteness: Definiteness,
    clause: int,
    role: GrammaticalRole = GrammaticalRole.unknown,
    label: str | None = None,
    possessor: Possessor | None = None,
    sentence: int | None = None,
    contrastive: bool = False,
) -> Mention:
    return Mention(
        id=i,
        text=f"{concept} {i}",
        tokens=Span(start=3 * i, end=3 * i + 2),
        span=Span(start=20 * i, end=20 * i + 10),
        head_lemma=concept,
        definiteness=definiteness,
        concept=concept,
        grammatical_role=role,
        clause=clause,
        sentence=clause if sentence is None else sentence,
        possessor=possessor,
        label=label,
        contrastive=contrastive,
    )


def draw_spec(choose) -> tuple:
    """Mention fields from a chooser over sequences, shared by the hypothesis and seeded generators."""
    kind = choose(["noun", "noun", "writer", "pronoun", "label", "possessive"])
    role = choose(list(GrammaticalRole))
    if kind == "writer":
        return "person", Definiteness.pronoun_1st, role, None, None, False
    if kind == "pronoun":
        return "entity", Definiteness.pronoun_3rd, role, None, None, False
    if kind == "label":
        return "vehicle", Definiteness.label, role, choose(["A", "B"]), None, False
    concept = choose(NOUN_CONCEPTS)
    if kind == "possessive":
        return concept, Definiteness.possessive, role, None, choose(list(Possessor)), False
    definiteness = choose([Definiteness.definite, Definiteness.indefinite])
    return concept, definiteness, role, None, None, choose([False, False, True])


def build_mentions(specs: list[tuple], clauses: list[int]) -> list[Mention]:
    return [
        make_mention(i, concept, definiteness, clause, role, label, possessor, clause // 2, contrastive)
        for i, ((concept, definiteness, role, label, possessor, contrastive), clause) in enumerate(
            zip(specs, clauses, strict=True)
        )
    ]


@st.composite
def mention_spec(draw):
    return draw_spec(lambda options: draw(st.sampled_from(options)))


@st.composite
def mention_lists(draw, max_size: int = 10):
    specs = draw(st.lists(mention_spec(), min_size=0, max_size=max_size))
    clauses = sorted(draw(st.lists(st.integers(0, 5), min_size=len(specs), max_size=len(specs))))
    return build_mentions(specs, clauses)


def seeded_mentions(seed: int, n: int, per_clause: int = 3) -> list[Mention]:
    rng = random.Random(seed)
    specs = [draw_spec(rng.choice) for _ in range(n)]
    return build_mentions(specs, [i // per_clause for i in range(n)])


def report_mentions(analysis) -> list[Mention]:
    return sorted((mention for entity in analysis.entities for mention in entity.mentions), key=lambda m: m.id)


KB = load_knowledge_dir(KB_DIR)


@pytest.mark.parametrize("n", range(len(BELL)))
def test_restricted_growth_strings_count_set_partitions(n: int) -> None:
    strings = list(restricted_growth_strings(n))
    assert len(strings) == BELL[n]
    assert len({tuple(labels) for labels in strings}) == BELL[n]


def test_restricted_growth_strings_skip_vetoed_blocks() -> None:
    # Items 0 and 1 never share a block
    strings = list(restricted_growth_strings(3, lambda i, label, labels: not (i == 1 and label == labels[0])))
    assert strings == [[0, 1, 0], [0, 1, 1], [0, 1, 2]]


@settings(max_examples=1000, deadline=None)
@given(mention_lists())
def test_search_matches_brute_force_oracle(mentions: list[Mention]) -> None:
    fast = coref_agent.resolve(mentions, KB)
    oracle = coref_agent.brute_force_min_partition(mentions, KB)
    assert fast.cost == oracle.cost
    assert fast.blocks == oracle.blocks


@pytest.mark.parametrize("report_id", SHIPPED)
def test_search_matches_oracle_on_report_windows(analyze, report_id: str) -> None:
    mentions = report_mentions(analyze(report_id))
    width = min(8, len(mentions))
    for start in range(0, len(mentions) - width + 1):
        window = mentions[start : start + width]
        fast = coref_agent.resolve(window, KB)
        oracle = coref_agent.brute_force_min_partition(window, KB)
        assert (fast.cost, fast.blocks) == (oracle.cost, oracle.blocks)
@settings(max_examples=300, deadline=None)
@given(mention_lists())
def test_partition_is_valid(mentions: list[Mention]) -> None:
    partition = coref_agent.resolve(mentions, KB)
    covered = sorted(mention_id for block in partition.blocks for mention_id in block)
    assert covered == [mention.id for mention in mentions]
    assert partition.cost == len(partition.entities)
    for entity in partition.entities:
        for a, b in combinations(entity.mentions, 2):
            assert coref_agent.compatible(a, b, KB)


@settings(max_examples=100, deadline=None)
@given(mention_lists())
def test_cost_never_drops_when_mentions_are_added(mentions: list[Mention]) -> None:
    costs = [coref_agent.resolve(mentions[:k], KB).cost for k in range(len(mentions) + 1)]
    assert costs == sorted(costs)


def test_compatibility_constraints() -> None:
    writer = make_mention(0, "person", Definiteness.pronoun_1st, 0, GrammaticalRole.subject)
    label_b = make_mention(1, "vehicle", Definiteness.label, 1, label="B")
    label_a = make_mention(2, "vehicle", Definiteness.label, 1, label="A")
    a_truck = make_mention(3, "truck", Definiteness.indefinite, 2)
    the_car = make_mention(4, "car", Definiteness.definite, 2)
    witness = make_mention(5, "witness", Definiteness.definite, 3)
    door = make_mention(6, "door", Definiteness.possessive, 3, possessor=Possessor.first)

    assert not coref_agent.compatible(writer, label_b, KB)
    assert coref_agent.compatible(writer, label_a, KB)
    assert not coref_agent.compatible(label_a, label_b, KB)
    assert not coref_agent.compatible(writer, a_truck, KB)
    assert not coref_agent.compatible(the_car, a_truck, KB)
    assert not coref_agent.compatible(writer, witness, KB)
    assert coref_agent.compatible(writer, door, KB)
    assert not coref_agent.compatible(the_car, make_mention(7, "truck", Definiteness.definite, 4), KB)


def test_subject_and_object_of_one_clause_stay_apart() -> None:
    subject = make_mention(0, "car", Definiteness.definite, 0, GrammaticalRole.subject)
    obj = make_mention(1, "vehicle", Definiteness.definite, 0, GrammaticalRole.object)
    me_subject = make_mention(2, "person", Definiteness.pronoun_1st, 1, GrammaticalRole.subject)
    me_object = make_mention(3, "person", Definiteness.pronoun_1st, 1, GrammaticalRole.object)
    assert not coref_agent.compatible(subject, obj, KB)
    assert coref_agent.compatible(me_subject, me_object, KB)


def test_nearest_antecedent_wins() -> None:
    mentions = [
        make_mention(0, "car", Definiteness.indefinite, 0),
        make_mention(1, "truck", Definiteness.indefinite, 0),
        make_mention(2, "vehicle", Definiteness.definite, 1),
    ]
    partition = coref_agent.resolve(mentions, KB)
    assert partition.blocks == ((0,), (1, 2))


def test_writer_unit_collects_parts(analyze) -> None:
    analysis = analyze("T7")
    assert len(analysis.entities) == 2
    writer = next(entity for entity in analysis.entities if entity.is_writer_party)
    assert "my blinker" in [mention.text for mention in writer.mentions]
    other = next(entity for entity in analysis.entities if not entity.is_writer_party)
    assert [mention.label for mention in other.mentions] == ["B"]


def test_cap_is_enforced() -> None:
    mentions = [make_mention(i, "car", Definiteness.definite, i) for i in range(5)]
    with pytest.raises(CorefCapExceededError):
        coref_agent.resolve(mentions, KB, cap=4)
    with pytest.raises(OracleSizeError):
        coref_agent.brute_force_min_partition(mentions, KB, cap=4)


def test_empty_mentions() -> None:
    assert coref_agent.resolve([], KB).entities == []
    assert coref_agent.brute_force_min_partition([], KB).entities == []


def test_party_markers_keep_mentions_off_the_writer() -> None:
    writer = make_mention(0, "person", Definiteness.pronoun_1st, 0, GrammaticalRole.subject)
    her_vehicle = make_mention(1, "vehicle", Definiteness.possessive, 1, possessor=Possessor.third)
    my_vehicle = make_mention(2, "vehicle", Definiteness.possessive, 1, possessor=Possessor.first)
    last_vehicle = make_mention(3, "vehicle", Definiteness.definite, 2, contrastive=True)
    the_vehicle = make_mention(4, "vehicle", Definiteness.definite, 3)

    assert not coref_agent.compatible(writer, her_vehicle, KB)
    assert not coref_agent.compatible(my_vehicle, her_vehicle, KB)
    assert not coref_agent.compatible(writer, last_vehicle, KB)
    assert coref_agent.compatible(last_vehicle, the_vehicle, KB)
    assert coref_agent.compatible(writer, the_vehicle, KB)


def test_it_is_not_the_i_of_its_own_sentence() -> None:
    writer = make_mention(0, "person", Definiteness.pronoun_1st, 0, GrammaticalRole.subject, sentence=0)
    it_here = make_mention(1, "entity", Definiteness.pronoun_3rd, 1, sentence=0)
    it_later = make_mention(2, "entity", Definiteness.pronoun_3rd, 2, sentence=1)
    my_door = make_mention(3, "door", Definiteness.possessive, 2, possessor=Possessor.first, sentence=1)

    assert not coref_agent.compatible(writer, it_here, KB)
    assert coref_agent.compatible(writer, it_later, KB)
    assert coref_agent.compatible(it_later, my_door, KB)


def test_named_owner_vehicle_stays_with_the_opponent(analyze) -> None:
    analysis = analyze("T14")
    assert len(analysis.entities) == 2
    owned = [
        (mention, entity)
        for entity in analysis.entities
        for mention in entity.mentions
        if mention.possessor == Possessor.third and mention.head_lemma == "vehicle"
    ]
    assert len(owned) == 1
    _, entity = owned[0]
    assert not entity.is_writer_party
    assert any(other.is_writer_party for other in analysis.entities)


def test_last_vehicle_and_its_pronoun_form_their_own_entity(analyze) -> None:
    analysis = analyze("T5")
    assert len(analysis.entities) == 3
    last = next(entity for entity in analysis.entities if "the last vehicle" in [m.text for m in entity.mentions])
    assert not last.is_writer_party
    assert [mention.text for mention in last.mentions] == ["the last vehicle", "it"]


@pytest.mark.parametrize("report_id", FULL_TEXTS)
def test_full_texts_have_an_impact_and_two_parties(analyze, report_id: str) -> None:
    analysis = analyze(report_id)
    assert analysis.impact is not None
    assert analysis.impact.status != ImpactStatus.absent
    assert len(analysis.entities) >= 2
    assert sum(entity.is_writer_party for entity in analysis.entities) == 1


def test_another_definite_vehicle_reuses_an_entity(kb, load_text) -> None:
    original = load_text("T8")
    extended = Report(id="T8", body=f"{original.body} The vehicle did not stop.")
    analysis = analysis_orchestrator.analyze(extended, kb)
    assert len(analysis.entities) == 2


@pytest.mark.parametrize("seed", range(3))
def test_search_near_the_cap_finishes_quickly(seed: int) -> None:
    mentions = seeded_mentions(seed, 60)
    started = time.perf_counter()
    partition = coref_agent.resolve(mentions, KB)
    elapsed = time.perf_counter() - started
    assert elapsed < 10.0
    assert sorted(mention_id for block in partition.blocks for mention_id in block) == list(range(60))
    matrix = coref_agent.compatibility_matrix(mentions, KB)
    assert partition.cost == coref_agent.min_cost(matrix)
