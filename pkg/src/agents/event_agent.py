"""Event Agent for clause-level events and impact reconstruction."""

import traceback
from typing import TypedDict

from loguru import logger

from ..config.settings import Language, settings
from ..models.schemas import (
    Aspect,
    Clause,
    Event,
    EvidenceKind,
    GrammaticalRole,
    ImpactEvidence,
    ImpactFinding,
    ImpactStatus,
    LexemeMatch,
    Mention,
    Modality,
    Partition,
    Polarity,
    Span,
    WordClass,
)
from ..services.knowledge_service import KnowledgeBase
from .coref_agent import is_participant, is_writer_marked

EXPLICIT_CLASSES = (WordClass.collision_verb, WordClass.impact_noun)
NEG_ABILITY_EVIDENCE = {
    WordClass.avoidance_verb: EvidenceKind.neg_ability_avoidance,
    WordClass.stop_verb: EvidenceKind.neg_ability_stop,
}


class EventState(TypedDict):
    """State for event agent."""

    clauses: list[Clause]
    language: Language
    partition: Partition
    events: list[Event]
    error: str | None


def neg_ability_clues(events: list[Event]) -> list[tuple[Event, EvidenceKind]]:
    """Events of the form negation + can/be able to + avoid/stop, with the evidence kind they support."""
    return [
        (event, NEG_ABILITY_EVIDENCE[event.predicate_class])
        for event in events
        if event.polarity == Polarity.negated
        and event.modality == Modality.ability
        and event.predicate_class in NEG_ABILITY_EVIDENCE
    ]


def principal_pair(partition: Partition, kb: KnowledgeBase) -> tuple[int, int] | None:
    """The writer's unit and the other participant entity with the most mentions."""
    writer = next((entity for entity in partition.entities if entity.is_writer_party), None)
    others = [
        entity
        for entity in partition.entities
        if not is_writer_marked(entity) and is_participant(entity, kb)
    ]
    if writer is None or not others:
        return None
    opponent = max(others, key=lambda entity: (len(entity.mentions), -entity.id))
    return writer.id, opponent.id


class EventAgent:
    """Agent responsible for event extraction and impact detection."""

    def __init__(self):
        """Initialize the event agent."""
        self.name = "event_agent"
        logger.info("Event Agent initialized")

    @staticmethod
    def _select_predicate(matches: list[LexemeMatch]) -> tuple[LexemeMatch | None, LexemeMatch | None]:
        """
        Predicate of a clause and the intention verb governing it, if any.

        Priority: collision verb, impact noun, verb governed by an intention verb through ``to``,
        avoidance or stop verb, then the first verb.
        """
        verbs = [m for m in matches if m.entry.word_class.is_verb or m.entry.word_class == WordClass.impact_noun]
        for word_class in EXPLICIT_CLASSES:
            found = next((m for m in verbs if m.entry.word_class == word_class), None)
            if found:
                return found, None

        for intention in (m for m in verbs if m.entry.word_class == WordClass.intention_verb):
            governed = next(
                (
                    m
                    for m in verbs
                    if m.start == intention.end + 1 and m.entry.word_class != WordClass.intention_verb
                ),
                None,
            )
            if governed:
                return governed, intention

        for word_class in (WordClass.avoidance_verb, WordClass.stop_verb):
            found = next((m for m in verbs if m.entry.word_class == word_class), None)
            if found:
                return found, None

        return (verbs[0], None) if verbs else (None, None)

    @staticmethod
    def _entity_of(mention: Mention | None, partition: Partition) -> int | None:
        if mention is None:
            return None
        entity = partition.entity_of(mention.id)
        return entity.id if entity else None

    def extract_events(
        self,
        clauses: list[Clause],
        partition: Partition,
        kb: KnowledgeBase,
        language: Language = Language.en,
    ) -> list[Event]:
        """
        Build one event per clause that holds a verb or impact noun.

        Args:
            clauses: Segmented clauses
            partition: Resolved entities, used to map subject and object mentions to entity ids
            kb: Knowledge base
            language: Report language

        Returns:
            Events in textual order
        """
        mentions_by_clause: dict[int, list[Mention]] = {}
        for entity in partition.entities:
            for mention in entity.mentions:
                mentions_by_clause.setdefault(mention.clause, []).append(mention)

        events: list[Event] = []
        for clause in clauses:
            matches = kb.match_lexemes(clause.tokens, language)
            predicate, intention = self._select_predicate(matches)
            if predicate is None:
                continue

            first = clause.tokens[0].index
            local = {token.index: token for token in clause.tokens}
            head = intention or predicate
            before = [local[i] for i in range(first, head.start)]
            classes_before = {
                m.entry.word_class for m in matches if m.end <= head.start
            }

            polarity = Polarity.negated if WordClass.negation_marker in classes_before else Polarity.positive
            modality = Modality.ability if WordClass.ability_modal in classes_before else Modality.none

            if intention is not None:
                aspect = Aspect.intentional
            elif any(
                token.lemma == "have" and token.surface.lower() == "had" and predicate.start - token.index <= 3
                for token in before
            ):
                aspect = Aspect.pluperfect
            elif (
                before
                and before[-1].lemma == "be"
                and local[predicate.start].surface.lower().endswith("ing")
            ):
                aspect = Aspect.progressive
            else:
                aspect = Aspect.simple

            clause_mentions = sorted(mentions_by_clause.get(clause.index, []), key=lambda m: m.tokens.start)
            subject = next((m for m in clause_mentions if m.grammatical_role == GrammaticalRole.subject), None)
            obj = next(
                (
                    m
                    for m in clause_mentions
                    if m.grammatical_role == GrammaticalRole.object and m.tokens.start >= predicate.end
                ),
                None,
            )
            predicate_tokens = [local[i] for i in range(predicate.start, predicate.end)]
            events.append(
                Event(
                    id=len(events),
                    clause=clause.index,
                    predicate_lemma=predicate.entry.lemma,
                    predicate_class=predicate.entry.word_class,
                    span=Span(start=predicate_tokens[0].span.start, end=predicate_tokens[-1].span.end),
                    tokens=Span(start=predicate.start, end=predicate.end),
                    polarity=polarity,
                    modality=modality,
                    aspect=aspect,
                    agent=self._entity_of(subject, partition),
                    patient=self._entity_of(obj, partition),
                )
            )
        logger.debug(f"Extracted {len(events)} events from {len(clauses)} clauses")
        return events

    @staticmethod
    def detect_explicit_impact(
        events: list[Event],
        partition: Partition | None = None,
        kb: KnowledgeBase | None = None,
    ) -> ImpactFinding | None:
        """
        First positive collision verb or impact noun event as an explicit impact.

        Args:
            events: Events in textual order
            partition: Entities, used for the principal pair when the event lacks participants
            kb: Knowledge base

        Returns:
            Explicit finding, or None when every collision is negated or absent
        """
        event = next(
            (e for e in events if e.predicate_class in EXPLICIT_CLASSES and e.polarity == Polarity.positive),
            None,
        )
        if event is None:
            return None
        if event.agent is not None and event.patient is not None and event.agent != event.patient:
            participants = (event.agent, event.patient)
        elif partition is not None and kb is not None:
            participants = principal_pair(partition, kb)
        else:
            participants = None
        return ImpactFinding(
            status=ImpactStatus.explicit,
            evidence=[ImpactEvidence(kind=EvidenceKind.collision_lexeme, clause=event.clause)],
            participants=participants,
        )

    @staticmethod
    def infer_impact(
        events: list[Event],
        partition: Partition,
        kb: KnowledgeBase,
        assume_accident: bool | None = None,
    ) -> ImpactFinding:
        """
        Reconstruct the impact the report must contain.

        Negation + ability + avoid/stop clauses are the clues; without any, the finding rests on the
        default that every claim report narrates an accident.

        Args:
            events: Events in textual order
            partition: Entities, used for the principal pair
            kb: Knowledge base
            assume_accident: Apply the accident default, defaults to the analyzer setting

        Returns:
            Inferred finding, or an absent one when there is no clue and the default is off
        """
        assume_accident = settings.analyzer.assume_accident if assume_accident is None else assume_accident
        evidence = [ImpactEvidence(kind=kind, clause=event.clause) for event, kind in neg_ability_clues(events)]
        if not evidence:
            if not assume_accident:
                return ImpactFinding(status=ImpactStatus.absent)
            evidence = [ImpactEvidence(kind=EvidenceKind.parameter_c_default)]
        return ImpactFinding(
            status=ImpactStatus.inferred,
            evidence=evidence,
            participants=principal_pair(partition, kb),
        )

    @staticmethod
    def detect_attenuating_circumstances(
        clauses: list[Clause],
        kb: KnowledgeBase,
        language: Language = Language.en,
    ) -> list[tuple[int, LexemeMatch]]:
        """Road-condition lexemes (wet, slippery) with their clause ordinal."""
        return [
            (clause.index, match)
            for clause in clauses
            for match in kb.match_lexemes(clause.tokens, language)
            if match.entry.word_class == WordClass.attenuating_circumstance
        ]

    def assess_impact(self, events: list[Event], partition: Partition, kb: KnowledgeBase) -> ImpactFinding:
        """Explicit impact when the text states one, otherwise the reconstructed one."""
        impact = self.detect_explicit_impact(events, partition, kb) or self.infer_impact(events, partition, kb)
        logger.info(f"Impact {impact.status} ({', '.join(evidence.kind for evidence in impact.evidence)})")
        return impact

    def process_state(self, state: EventState, kb: KnowledgeBase) -> EventState:
        """
        Process the event state.

        Args:
            state: Current state containing clauses and entities
            kb: Knowledge base

        Returns:
            Updated state with events
        """
        try:
            state["events"] = self.extract_events(state["clauses"], state["partition"], kb, state["language"])
            logger.info(f"Extracted {len(state['events'])} events")
            return state

        except Exception as e:
            logger.error(f"Error processing event state: {traceback.format_exc()}")
            state["error"] = str(e)
            raise


# Global event agent instance
event_agent = EventAgent()
