"""Argumentation Agent for tagging Strategy A and Strategy B devices."""

import re
import traceback
from bisect import bisect_right
from collections import Counter
from typing import TypedDict

from loguru import logger

from ..config.settings import Language
from ..models.schemas import (
    DEVICE_STRATEGY,
    ArgDevice,
    Clause,
    DeviceKind,
    DeviceTally,
    DiscourseEntity,
    Event,
    Facet,
    GrammaticalRole,
    Mention,
    Partition,
    SignificantModifier,
    Span,
    Strategy,
    StrategySummary,
    WordClass,
)
from ..services.knowledge_service import KnowledgeBase
from .event_agent import event_agent, neg_ability_clues


class ArgumentationState(TypedDict):
    """State for argumentation agent."""

    clauses: list[Clause]
    language: Language
    partition: Partition
    events: list[Event]
    devices: list[ArgDevice]
    strategy_summary: StrategySummary | None
    significant_modifiers: list[SignificantModifier]
    error: str | None


class ClauseText:
    """Space-joined lemmas of a clause, searchable with regular expressions."""

    def __init__(self, clause: Clause):
        self.clause = clause
        self.offsets: list[int] = []
        position = 0
        for token in clause.tokens:
            self.offsets.append(position)
            position += len(token.lemma) + 1
        self.text = " ".join(clause.lemmas)

    def search(self, pattern: str) -> tuple[int, int] | None:
        """Token index range of the first match."""
        match = re.search(pattern, self.text)
        if not match:
            return None
        first = bisect_right(self.offsets, match.start()) - 1
        last = bisect_right(self.offsets, match.end() - 1) - 1
        return self.clause.tokens[first].index, self.clause.tokens[last].index + 1


class ArgumentationAgent:
    """Agent responsible for detecting how the writer argues the case."""

    def __init__(self):
        """Initialize the argumentation agent."""
        self.name = "argumentation_agent"

        # Blame lexemes that name a traffic rule when they meet their companion term in the clause
        self.blame_rule_patterns = {
            "deny": ("deny-right-of-way", r"\bright-of-way\b"),
            "blind": ("blinding-headlights", r"\bheadlight\b"),
        }

        # Behaviour the reader knows to be illegal without the writer saying so
        self.violation_patterns = {
            "pass-on-the-right": r"\bpass\b(?: \S+){0,3} on the right\b",
            "exit-private-premises": r"\bcome out of\b(?: \S+){0,4} garage\b",
            "full-headlights": r"\bfull (?:white )?headlight\b",
        }
        # Violations that only hold when the report mentions the ground markings somewhere
        self.marking_violation_patterns = {
            "cut-back-across-markings": r"\bcut back\b",
        }
        self.marking_pattern = r"\bmark(?:ing|ings|ed)?\b"

        # Conformity the rules of the road already guarantee; saying it is self-justification
        self.conformity_patterns = {
            "drive-on-right-side": r"\bdrive on the right(?: hand side)?\b",
            "keep-to-the-right": r"\bkeep\b.* to the right\b",
            "right-lane-straight": r"\bin (?:my|the) right lane\b",
            "moderate-speed": r"\bmoderate speed\b",
            "stated-speed": r"\bat about \d+ km\b",
            "blinker-on": r"\bswitch\b(?: \S+){0,3} blinker on\b|\bswitch on\b(?: \S+){0,2} blinker\b",
            "immediate-braking": r"\bimmediately (?:put the brake on|brake)\b",
        }

        logger.info("Argumentation Agent initialized")

    @staticmethod
    def _device(
        kind: DeviceKind,
        clause: Clause,
        start: int,
        end: int,
        strategy: Strategy | None = None,
        **fields,
    ) -> ArgDevice:
        """Device over the token range ``[start, end)`` of a clause."""
        tokens = [token for token in clause.tokens if start <= token.index < end]
        return ArgDevice(
            strategy=strategy or DEVICE_STRATEGY[kind],
            kind=kind,
            span=Span(start=tokens[0].span.start, end=tokens[-1].span.end),
            tokens=Span(start=tokens[0].index, end=tokens[-1].index + 1),
            clause=clause.index,
            **fields,
        )

    @staticmethod
    def clause_holders(clauses: list[Clause], partition: Partition) -> dict[int, DiscourseEntity | None]:
        """
        Entity holding each clause: its first subject.

        A clause without a subject (a participial or verbless opening such as "surprised,")
        takes the holder of the next clause of its sentence.
        """
        subjects: dict[int, tuple[int, DiscourseEntity]] = {}
        for entity in partition.entities:
            for mention in entity.mentions:
                if mention.grammatical_role != GrammaticalRole.subject:
                    continue
                current = subjects.get(mention.clause)
                if current is None or mention.tokens.start < current[0]:
                    subjects[mention.clause] = (mention.tokens.start, entity)

        holders: dict[int, DiscourseEntity | None] = {}
        following: Clause | None = None
        for clause in reversed(clauses):
            if clause.index in subjects:
                holders[clause.index] = subjects[clause.index][1]
            elif following is not None and following.sentence_index == clause.sentence_index:
                holders[clause.index] = holders[following.index]
            else:
                holders[clause.index] = None
            following = clause
        return holders

    @staticmethod
    def _nearest_preceding(token_index: int, partition: Partition) -> tuple[Mention, DiscourseEntity] | None:
        candidates = [
            (mention, entity)
            for entity in partition.entities
            for mention in entity.mentions
            if mention.tokens.end <= token_index
        ]
        return max(candidates, key=lambda pair: pair[0].tokens.start, default=None)

    def _blame_devices(
        self,
        clause: Clause,
        text: ClauseText,
        kb: KnowledgeBase,
        language: Language,
    ) -> list[ArgDevice]:
        devices = []
        for match in kb.match_lexemes(clause.tokens, language):
            if match.entry.word_class != WordClass.blame_lexeme:
                continue
            rule, note = None, f"blame lexeme '{match.entry.lemma}'"
            pattern_id, companion = self.blame_rule_patterns.get(match.entry.lemma, (None, None))
            if pattern_id and re.search(companion, text.text):
                rule = kb.rule_for_pattern(pattern_id)
                note = f"{note} with {pattern_id}"
            devices.append(
                self._device(DeviceKind.explicit_blame_lexeme, clause, match.start, match.end, rule=rule, note=note)
            )
        return devices

    def _speed_devices(
        self,
        clause: Clause,
        holder: DiscourseEntity | None,
        partition: Partition,
        kb: KnowledgeBase,
        language: Language,
    ) -> list[ArgDevice]:
        """Speed intensifiers predicated of the opponent: the clause holder or the closest preceding mention."""
        devices = []
        for match in kb.match_lexemes(clause.tokens, language):
            if match.entry.word_class != WordClass.speed_intensifier:
                continue
            nearest = self._nearest_preceding(match.start, partition)
            candidates = [holder, nearest[1] if nearest else None]
            if any(entity is not None and not entity.is_writer_party for entity in candidates):
                devices.append(
                    self._device(
                        DeviceKind.excessive_speed,
                        clause,
                        match.start,
                        match.end,
                        rule=kb.rule_for_pattern("great-speed"),
                        note=f"'{match.entry.lemma}'",
                    )
                )
        return devices

    def _violation_devices(
        self,
        clause: Clause,
        text: ClauseText,
        mentions_marking: bool,
        kb: KnowledgeBase,
    ) -> list[ArgDevice]:
        patterns = dict(self.violation_patterns)
        if mentions_marking:
            patterns.update(self.marking_violation_patterns)
        devices = []
        for pattern_id, pattern in patterns.items():
            found = text.search(pattern)
            if found:
                devices.append(
                    self._device(
                        DeviceKind.implicit_rule_violation,
                        clause,
                        *found,
                        rule=kb.rule_for_pattern(pattern_id),
                        note=pattern_id,
                    )
                )
        return devices

    def _agent_suppression(
        self,
        clause: Clause,
        holder: DiscourseEntity | None,
        partition: Partition,
        kb: KnowledgeBase,
        language: Language,
    ) -> list[ArgDevice]:
        """Passive voice (be + up to two words + participle), or the writer's vehicle moving by itself."""
        matches = kb.match_lexemes(clause.tokens, language)
        lemmas = {token.index: token.lemma for token in clause.tokens}
        for match in matches:
            if match.entry.word_class != WordClass.passive_marker:
                continue
            be = next((k for k in range(match.start - 1, match.start - 4, -1) if lemmas.get(k) == "be"), None)
            if be is not None:
                return [self._device(DeviceKind.agent_suppression, clause, be, match.end, note="passive")]

        if holder is None or not holder.is_writer_party:
            return []
        subject = next(
            (
                mention
                for entity in partition.entities
                for mention in entity.mentions
                if mention.clause == clause.index and mention.grammatical_role == GrammaticalRole.subject
            ),
            None,
        )
        if subject is None or subject.facet != Facet.vehicle:
            return []
        for match in matches:
            if match.entry.word_class == WordClass.reflexive_motion_verb:
                return [
                    self._device(
                        DeviceKind.agent_suppression,
                        clause,
                        match.start,
                        match.end,
                        note=f"vehicle as subject of '{match.entry.lemma}'",
                    )
                ]
        return []

    def _lexical_b_devices(
        self,
        clause: Clause,
        holder: DiscourseEntity | None,
        kb: KnowledgeBase,
        language: Language,
    ) -> list[ArgDevice]:
        """Surprise held by the writer, suddenness and unexpectedness adverbs."""
        devices = []
        for match in kb.match_lexemes(clause.tokens, language):
            word_class = match.entry.word_class
            if word_class == WordClass.surprise_lexeme:
                if holder is None or not holder.is_writer_party:
                    continue
                kind = DeviceKind.surprise_lexeme
            elif word_class == WordClass.suddenness_adverb:
                kind = DeviceKind.suddenness
            elif word_class == WordClass.unexpectedness_adverb:
                kind = DeviceKind.unexpectedness_adverb
            else:
                continue
            devices.append(self._device(kind, clause, match.start, match.end, note=f"'{match.entry.lemma}'"))
        return devices

    def _conformity_device(self, clause: Clause, text: ClauseText, kb: KnowledgeBase) -> ArgDevice | None:
        for pattern_id, pattern in self.conformity_patterns.items():
            found = text.search(pattern)
            if found:
                return self._device(
                    DeviceKind.correct_behavior_assertion,
                    clause,
                    *found,
                    strategy=Strategy.B,
                    rule=kb.rule_for_pattern(pattern_id),
                    note=pattern_id,
                    self_exculpatory=True,
                )
        return None

    def tag_devices(
        self,
        clauses: list[Clause],
        events: list[Event],
        partition: Partition,
        kb: KnowledgeBase,
        language: Language = Language.en,
    ) -> list[ArgDevice]:
        """
        Tag the argumentative devices of a report.

        Args:
            clauses: Segmented clauses
            events: Events of the report
            partition: Entities with their typed mentions and coercion records
            kb: Knowledge base
            language: Report language

        Returns:
            Devices ordered by span start, then kind
        """
        holders = self.clause_holders(clauses, partition)
        texts = {clause.index: ClauseText(clause) for clause in clauses}
        mentions_marking = any(re.search(self.marking_pattern, text.text) for text in texts.values())
        by_index = {clause.index: clause for clause in clauses}

        devices: list[ArgDevice] = []
        assertions: list[ArgDevice] = []
        for clause in clauses:
            text, holder = texts[clause.index], holders[clause.index]
            devices.extend(self._blame_devices(clause, text, kb, language))
            devices.extend(self._speed_devices(clause, holder, partition, kb, language))
            devices.extend(self._violation_devices(clause, text, mentions_marking, kb))
            devices.extend(self._lexical_b_devices(clause, holder, kb, language))
            devices.extend(self._agent_suppression(clause, holder, partition, kb, language))
            if holder is not None and holder.is_writer_party:
                assertion = self._conformity_device(clause, text, kb)
                if assertion:
                    assertions.append(assertion)

        for event, kind in neg_ability_clues(events):
            clause = by_index[event.clause]
            first = next(
                (
                    token.index
                    for token in clause.tokens
                    if token.index < event.tokens.start
                    and kb.has_class(token.lemma, WordClass.negation_marker, language)
                ),
                event.tokens.start,
            )
            devices.append(
                self._device(DeviceKind.neg_ability_contrast, clause, first, event.tokens.end, note=str(kind))
            )

        for clause_index, match in event_agent.detect_attenuating_circumstances(clauses, kb, language):
            clause = by_index[clause_index]
            devices.append(
                self._device(
                    DeviceKind.attenuating_circumstance,
                    clause,
                    match.start,
                    match.end,
                    note=f"'{match.entry.lemma}'",
                )
            )

        # Self-justification sides with whichever strategy the rest of the report follows
        counts = Counter(device.strategy for device in devices)
        context = Strategy.A if counts[Strategy.A] > counts[Strategy.B] else Strategy.B
        devices.extend(assertion.model_copy(update={"strategy": context}) for assertion in assertions)

        devices.sort(key=lambda device: (device.span.start, device.kind))
        logger.debug(f"Tagged {len(devices)} devices over {len(clauses)} clauses")
        return devices

    @staticmethod
    def summarize_strategies(devices: list[ArgDevice]) -> StrategySummary:
        """Count devices per strategy and per kind."""
        ordered = sorted(devices, key=lambda device: (device.span.start, device.kind))
        return StrategySummary(
            a_count=sum(1 for device in ordered if device.strategy == Strategy.A),
            b_count=sum(1 for device in ordered if device.strategy == Strategy.B),
            by_kind=dict(sorted(Counter(str(device.kind) for device in ordered).items())),
            devices=[DeviceTally(strategy=d.strategy, kind=d.kind, span=d.span) for d in ordered],
        )

    @staticmethod
    def detect_significant_modifiers(
        clauses: list[Clause],
        kb: KnowledgeBase,
        language: Language = Language.en,
    ) -> list[SignificantModifier]:
        """Modifiers a short report would leave out unless they matter (intense, one-way, impossible)."""
        found = []
        for clause in clauses:
            for match in kb.match_lexemes(clause.tokens, language):
                if match.entry.word_class != WordClass.significant_modifier:
                    continue
                tokens = [token for token in clause.tokens if match.start <= token.index < match.end]
                found.append(
                    SignificantModifier(
                        lemma=match.entry.lemma,
                        span=Span(start=tokens[0].span.start, end=tokens[-1].span.end),
                        clause=clause.index,
                    )
                )
        return found

    def process_state(self, state: ArgumentationState, kb: KnowledgeBase) -> ArgumentationState:
        """
        Process the argumentation state.

        Args:
            state: Current state containing clauses, entities and events
            kb: Knowledge base

        Returns:
            Updated state with devices, their summary and significant modifiers
        """
        try:
            clauses, language = state["clauses"], state["language"]
            state["devices"] = self.tag_devices(clauses, state["events"], state["partition"], kb, language)
            state["strategy_summary"] = self.summarize_strategies(state["devices"])
            state["significant_modifiers"] = self.detect_significant_modifiers(clauses, kb, language)
            summary = state["strategy_summary"]
            logger.info(f"Tagged {len(state['devices'])} devices (A: {summary.a_count}, B: {summary.b_count})")
            return state

        except Exception as e:
            logger.error(f"Error processing argumentation state: {traceback.format_exc()}")
            state["error"] = str(e)
            raise


# Global argumentation agent instance
argumentation_agent = ArgumentationAgent()
