"""Ambiguity Agent for finding and resolving competing readings."""

import traceback
from typing import TypedDict

from loguru import logger

from ..config.settings import Language
from ..models.schemas import (
    AmbiguityKind,
    AmbiguitySite,
    Aspect,
    Clause,
    Event,
    ImpactFinding,
    ImpactStatus,
    Partition,
    Reading,
    Span,
    Token,
    WordClass,
    WriterBehavior,
)
from ..services.knowledge_service import KnowledgeBase

ACCIDENT_REFERENCE = "accident-reference/left-blinker"
STOP_REFERENCE = "stop-reference/right-blinker"
PURELY_INTENTIONAL = "purely-intentional"
ACTION_STARTED = "action-started"

BEHAVIOR_PREFERENCE = (WriterBehavior.correct, WriterBehavior.neutral, WriterBehavior.at_fault)


class AmbiguityState(TypedDict):
    """State for ambiguity agent."""

    clauses: list[Clause]
    language: Language
    partition: Partition
    events: list[Event]
    impact: ImpactFinding | None
    ambiguity_sites: list[AmbiguitySite]
    error: str | None


def pluperfect_readings() -> list[Reading]:
    return [
        Reading(
            label=ACCIDENT_REFERENCE,
            writer_behavior=WriterBehavior.correct,
            explains_accident=False,
            gloss="signal given before moving off again; stopped in the right lane, only a left turn remains",
        ),
        Reading(
            label=STOP_REFERENCE,
            writer_behavior=WriterBehavior.neutral,
            explains_accident=False,
            gloss="signal given before stopping in the right lane, so the right blinker",
        ),
    ]


def intention_readings(intention_lemma: str) -> list[Reading]:
    """Readings of an intended action; "get ready" separates the aspectual and the agentive senses."""
    if intention_lemma == "get ready":
        glosses = ("inchoative: about to act, still stopped", "agentive: actively preparing, the action under way")
    else:
        glosses = ("the action stayed an intention", "the action had already started")
    return [
        Reading(
            label=PURELY_INTENTIONAL,
            writer_behavior=WriterBehavior.correct,
            explains_accident=False,
            gloss=glosses[0],
        ),
        Reading(
            label=ACTION_STARTED,
            writer_behavior=WriterBehavior.at_fault,
            explains_accident=True,
            gloss=glosses[1],
        ),
    ]


def _span(tokens: list[Token]) -> tuple[Span, Span]:
    return (
        Span(start=tokens[0].span.start, end=tokens[-1].span.end),
        Span(start=tokens[0].index, end=tokens[-1].index + 1),
    )


class AmbiguityAgent:
    """Agent responsible for ambiguity detection and writer-aware resolution."""

    def __init__(self):
        """Initialize the ambiguity agent."""
        self.name = "ambiguity_agent"
        logger.info("Ambiguity Agent initialized")

    @staticmethod
    def _writer_or_unknown(agent: int | None, partition: Partition) -> bool:
        if agent is None:
            return True
        entity = next((entity for entity in partition.entities if entity.id == agent), None)
        return entity is not None and entity.is_writer_party

    def detect_ambiguity_sites(
        self,
        clauses: list[Clause],
        events: list[Event],
        partition: Partition,
        kb: KnowledgeBase,
        language: Language = Language.en,
    ) -> list[AmbiguitySite]:
        """
        Find lexical, pluperfect-reference and intention-vs-action sites.

        Pluperfect and intention sites are only raised for the writer's own actions (or actions with
        no expressed agent): they bear on how the writer behaved.

        Args:
            clauses: Segmented clauses
            events: Events of the report
            partition: Entities, used to decide whose action an event is
            kb: Knowledge base with the ambiguous token table
            language: Report language

        Returns:
            Sites in text order, readings unresolved
        """
        by_index = {clause.index: clause for clause in clauses}
        sites: list[AmbiguitySite] = []

        for clause in clauses:
            for token in clause.tokens:
                rows = kb.ambiguous(language, token.lemma)
                if len(rows) < 2:
                    continue
                span, token_span = _span([token])
                sites.append(
                    AmbiguitySite(
                        kind=AmbiguityKind.lexical,
                        span=span,
                        tokens=token_span,
                        clause=clause.index,
                        readings=[
                            Reading(
                                label=row.label,
                                writer_behavior=row.writer_behavior,
                                explains_accident=row.explains_accident,
                            )
                            for row in rows
                        ],
                        note=f"'{token.surface}'",
                    )
                )

        for event in events:
            if not self._writer_or_unknown(event.agent, partition):
                continue
            clause = by_index[event.clause]
            predicate = [token for token in clause.tokens if event.tokens.start <= token.index < event.tokens.end]

            if event.aspect == Aspect.pluperfect and event.predicate_class == WordClass.signal_verb:
                auxiliary = next(
                    token
                    for token in reversed(clause.tokens)
                    if token.index < event.tokens.start and token.surface.lower() == "had"
                )
                span, token_span = _span([auxiliary, *predicate])
                sites.append(
                    AmbiguitySite(
                        kind=AmbiguityKind.pluperfect_reference,
                        span=span,
                        tokens=token_span,
                        clause=clause.index,
                        readings=pluperfect_readings(),
                        note=f"pluperfect '{event.predicate_lemma}'",
                    )
                )

            elif event.aspect == Aspect.intentional and event.predicate_class == WordClass.motion_verb:
                intention = next(
                    match
                    for match in kb.match_lexemes(clause.tokens, language)
                    if match.entry.word_class == WordClass.intention_verb and match.end + 1 == event.tokens.start
                )
                opening = [token for token in clause.tokens if token.index == intention.start]
                span, token_span = _span([*opening, *predicate])
                sites.append(
                    AmbiguitySite(
                        kind=AmbiguityKind.intention_vs_action,
                        span=span,
                        tokens=token_span,
                        clause=clause.index,
                        readings=intention_readings(intention.entry.lemma),
                        note=f"'{intention.entry.lemma}' governing '{event.predicate_lemma}'",
                    )
                )

        sites.sort(key=lambda site: site.span.start)
        logger.debug(f"Found {len(sites)} ambiguity sites")
        return sites

    @staticmethod
    def resolve_ambiguity(site: AmbiguitySite, impact: ImpactFinding | None) -> AmbiguitySite:
        """
        Choose one reading of a site.

        First, when the report holds an accident and some reading explains it, readings that do not
        explain it are dropped. Then, among the survivors, the writer's correct behavior is preferred,
        then a neutral reading, then the first at-fault one.

        Args:
            site: Site to resolve
            impact: Impact finding of the report

        Returns:
            Copy of the site with exactly one chosen reading and the applied stages in its note
        """
        survivors = list(range(len(site.readings)))
        stages = []
        explaining = [i for i in survivors if site.readings[i].explains_accident]
        if impact is not None and impact.status != ImpactStatus.absent and explaining:
            if len(explaining) < len(survivors):
                stages.append("accident-explicability")
            survivors = explaining

        chosen = survivors[0]
        for behavior in BEHAVIOR_PREFERENCE:
            preferred = [i for i in survivors if site.readings[i].writer_behavior == behavior]
            if preferred:
                chosen = preferred[0]
                break
        if len(survivors) > 1:
            stages.append("correct-behavior-preference")

        readings = [reading.model_copy(update={"chosen": i == chosen}) for i, reading in enumerate(site.readings)]
        resolution = f"resolved by {', '.join(stages) or 'default'}"
        note = f"{site.note}; {resolution}" if site.note else resolution
        return site.model_copy(update={"readings": readings, "note": note})

    def process_state(self, state: AmbiguityState, kb: KnowledgeBase) -> AmbiguityState:
        """
        Process the ambiguity state.

        Args:
            state: Current state containing clauses, events and the impact finding
            kb: Knowledge base

        Returns:
            Updated state with resolved ambiguity sites
        """
        try:
            sites = self.detect_ambiguity_sites(
                state["clauses"], state["events"], state["partition"], kb, state["language"]
            )
            state["ambiguity_sites"] = [self.resolve_ambiguity(site, state["impact"]) for site in sites]
            for site in state["ambiguity_sites"]:
                logger.info(f"Ambiguity {site.kind} in clause {site.clause}: chose {site.chosen.label}")
            return state

        except Exception as e:
            logger.error(f"Error processing ambiguity state: {traceback.format_exc()}")
            state["error"] = str(e)
            raise


# Global ambiguity agent instance
ambiguity_agent = AmbiguityAgent()
