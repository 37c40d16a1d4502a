"""Mention Agent for extracting referring expressions and typing their facets."""

import traceback
from collections.abc import Sequence
from typing import TypedDict

from loguru import logger

from ..config.settings import Language
from ..models.schemas import (
    Clause,
    CoercionRecord,
    Definiteness,
    Facet,
    GrammaticalRole,
    LexiconEntry,
    Mention,
    Possessor,
    Selectional,
    Span,
    Token,
    WordClass,
)
from ..services.corpus_service import AUXILIARIES, is_finite
from ..services.knowledge_service import KnowledgeBase

LABELS = frozenset({"A", "B"})
TITLES = frozenset({"mr.", "mrs.", "dr.", "st."})
INDEFINITE_DETERMINERS = frozenset({"a", "an"})
POSSESSIVE_DETERMINERS = {
    "my": Possessor.first,
    "our": Possessor.first,
    "his": Possessor.third,
    "her": Possessor.third,
    "its": Possessor.third,
    "their": Possessor.third,
}
FIRST_PERSON_PRONOUNS = frozenset({"i", "me", "we", "us"})
ACCUSATIVE_PRONOUNS = frozenset({"me", "us", "him", "them"})
PERSON_PRONOUNS = frozenset({"he", "him", "she"})
THIRD_PERSON_PRONOUNS = frozenset({"it", "he", "him", "she", "they", "them", "latter"})
CONTRASTIVE_MODIFIERS = frozenset({"other", "another", "second", "third", "last", "next"})
CONNECTIVES = frozenset({"when", "where", "which", "who", "that", "and", "but", "then", "as", "because", "whence"})
NON_MODIFIER_CLASSES = frozenset(
    {
        WordClass.function_word,
        WordClass.determiner,
        WordClass.pronoun,
        WordClass.negation_marker,
        WordClass.ability_modal,
    }
)


class MentionState(TypedDict):
    """State for mention agent."""

    clauses: list[Clause]
    language: Language
    mentions: list[Mention]
    coercions: list[CoercionRecord]
    error: str | None


def is_genitive(token: Token) -> bool:
    return len(token.surface) > 2 and token.surface[-2:] in ("'s", "’s")


def classify_definiteness(mention_tokens: Sequence[Token]) -> Definiteness:
    """
    Definiteness of an extracted mention from its first token.

    Args:
        mention_tokens: Tokens of the mention

    Returns:
        Definiteness class; bare nouns default to indefinite
    """
    first = mention_tokens[0].surface.lower()
    if mention_tokens[-1].surface in LABELS:
        return Definiteness.label
    if len(mention_tokens) == 1 and first in FIRST_PERSON_PRONOUNS:
        return Definiteness.pronoun_1st
    if len(mention_tokens) == 1 and first in THIRD_PERSON_PRONOUNS:
        return Definiteness.pronoun_3rd
    if first in INDEFINITE_DETERMINERS:
        return Definiteness.indefinite
    if first in POSSESSIVE_DETERMINERS or first in TITLES or is_genitive(mention_tokens[0]):
        return Definiteness.possessive
    if first in ("the", "this"):
        return Definiteness.definite
    return Definiteness.indefinite


def possessor_of(mention_tokens: Sequence[Token]) -> Possessor | None:
    first = mention_tokens[0].surface.lower()
    if first in POSSESSIVE_DETERMINERS:
        return POSSESSIVE_DETERMINERS[first]
    if any(is_genitive(token) for token in mention_tokens):
        return Possessor.third
    return None


class MentionAgent:
    """Agent responsible for mention extraction, definiteness and metonymic facet coercion."""

    def __init__(self):
        """Initialize the mention agent."""
        self.name = "mention_agent"
        logger.info("Mention Agent initialized")

    @staticmethod
    def _classes(token: Token, kb: KnowledgeBase, language: Language) -> set[WordClass]:
        return {entry.word_class for entry in kb.lookup(token.lemma, language)}

    @staticmethod
    def _noun_entry(token: Token, kb: KnowledgeBase, language: Language) -> LexiconEntry | None:
        return next((entry for entry in kb.lookup(token.lemma, language) if entry.word_class.is_noun), None)

    def _is_modifier(self, token: Token, kb: KnowledgeBase, language: Language) -> bool:
        if not token.surface[0].isalnum() or token.surface.lower() in AUXILIARIES or token.surface in LABELS:
            return False
        classes = self._classes(token, kb, language)
        return not classes & NON_MODIFIER_CLASSES and not any(c.is_verb or c.is_noun for c in classes)

    def _phrase_start(
        self,
        tokens: Sequence[Token],
        i: int,
        used: set[int],
        kb: KnowledgeBase,
        language: Language,
    ) -> int | None:
        """Index of the determiner or genitive opening the noun phrase whose first noun is ``tokens[i]``."""
        k = i - 1
        while k >= 0 and k not in used:
            token = tokens[k]
            if WordClass.determiner in self._classes(token, kb, language):
                return k
            if is_genitive(token):
                if k > 0 and k - 1 not in used and tokens[k - 1].surface.lower() in TITLES:
                    return k - 1
                return k
            if not self._is_modifier(token, kb, language):
                return None
            k -= 1
        return None

    def _is_label_at(self, tokens: Sequence[Token], i: int) -> bool:
        return tokens[i].lemma == "vehicle" and i + 1 < len(tokens) and tokens[i + 1].surface in LABELS

    @staticmethod
    def _concept_for_pronoun(token: Token) -> str:
        folded = token.surface.lower()
        if folded in FIRST_PERSON_PRONOUNS or folded in PERSON_PRONOUNS:
            return "person"
        return "entity"

    def extract_mentions(
        self,
        clause: Clause,
        kb: KnowledgeBase,
        language: Language = Language.en,
        first_id: int = 0,
        labels_seen: bool = False,
    ) -> list[Mention]:
        """
        Extract referring expressions of one clause.

        A mention is a pronoun, an A/B label, or an optional determiner (or genitive) followed by
        modifiers and a noun with a concept. Bare plurals are generic and reflexives are not in the
        pronoun lexicon, so neither yields a mention.

        Args:
            clause: Tokenized clause
            kb: Knowledge base
            language: Report language
            first_id: Id of the first mention of this clause in the report list
            labels_seen: Whether the A/B convention was already triggered earlier in the report

        Returns:
            Non-overlapping mentions in text order with grammatical roles
        """
        tokens = clause.tokens
        used: set[int] = set()
        found: list[tuple[int, int, str, str, str | None]] = []
        i = 0
        while i < len(tokens):
            token = tokens[i]
            classes = self._classes(token, kb, language)

            if self._is_label_at(tokens, i):
                start = i
                if i > 0 and i - 1 not in used and tokens[i - 1].surface.lower() in POSSESSIVE_DETERMINERS:
                    start = i - 1
                found.append((start, i + 2, "vehicle", "vehicle", tokens[i + 1].surface))
                labels_seen = True
                used.update(range(start, i + 2))
                i += 2
                continue

            if (
                labels_seen
                and token.surface in LABELS
                and not (i + 1 < len(tokens) and self._noun_entry(tokens[i + 1], kb, language))
            ):
                found.append((i, i + 1, "vehicle", "vehicle", token.surface))
                used.add(i)
                i += 1
                continue

            if WordClass.pronoun in classes:
                found.append((i, i + 1, token.lemma, self._concept_for_pronoun(token), None))
                used.add(i)
                i += 1
                continue

            if self._noun_entry(token, kb, language):
                end = i
                while (
                    end + 1 < len(tokens)
                    and self._noun_entry(tokens[end + 1], kb, language)
                    and not self._is_label_at(tokens, end + 1)
                ):
                    end += 1
                head = tokens[end]
                start = self._phrase_start(tokens, i, used, kb, language)
                if start is None and head.lemma != head.surface.lower():
                    # Generic bare plural
                    i = end + 1
                    continue
                start = i if start is None else start
                entry = self._noun_entry(head, kb, language)
                found.append((start, end + 1, head.lemma, entry.concept, None))
                used.update(range(start, end + 1))
                i = end + 1
                continue

            i += 1

        anchor = next((k for k in range(len(tokens)) if is_finite(tokens, k, kb, language)), None)
        mentions = []
        for offset, (start, end, head_lemma, concept, label) in enumerate(found):
            span_tokens = tokens[start:end]
            mentions.append(
                Mention(
                    id=first_id + offset,
                    text=" ".join(token.surface for token in span_tokens),
                    tokens=Span(start=span_tokens[0].index, end=span_tokens[-1].index + 1),
                    span=Span(start=span_tokens[0].span.start, end=span_tokens[-1].span.end),
                    head_lemma=head_lemma,
                    definiteness=classify_definiteness(span_tokens),
                    concept=concept,
                    grammatical_role=self._role(tokens, start, anchor, kb, language),
                    clause=clause.index,
                    sentence=clause.sentence_index,
                    possessor=possessor_of(span_tokens),
                    label=label,
                    contrastive=any(token.surface.lower() in CONTRASTIVE_MODIFIERS for token in span_tokens),
                )
            )
        return mentions

    def _role(
        self,
        tokens: Sequence[Token],
        start: int,
        anchor: int | None,
        kb: KnowledgeBase,
        language: Language,
    ) -> GrammaticalRole:
        """Positional role relative to the first finite verb of the clause."""
        if anchor is None:
            return GrammaticalRole.unknown
        first = tokens[start].surface.lower()
        after_function_word = (
            start > 0
            and tokens[start - 1].surface.lower() not in CONNECTIVES
            and WordClass.function_word in self._classes(tokens[start - 1], kb, language)
        )
        if start < anchor:
            if first in ACCUSATIVE_PRONOUNS or after_function_word:
                return GrammaticalRole.oblique
            return GrammaticalRole.subject
        if first in ACCUSATIVE_PRONOUNS:
            return GrammaticalRole.object
        if after_function_word:
            # Agent of a passive
            if tokens[start - 1].surface.lower() == "by":
                return GrammaticalRole.object
            return GrammaticalRole.oblique
        return GrammaticalRole.object

    def extract_report_mentions(self, clauses: list[Clause], kb: KnowledgeBase, language: Language) -> list[Mention]:
        """Mentions of every clause with report-wide ids; the A/B convention carries across clauses."""
        mentions: list[Mention] = []
        labels_seen = False
        for clause in clauses:
            clause_mentions = self.extract_mentions(clause, kb, language, len(mentions), labels_seen)
            labels_seen = labels_seen or any(mention.label for mention in clause_mentions)
            mentions.extend(clause_mentions)
        return mentions

    @staticmethod
    def default_facet(mention: Mention, kb: KnowledgeBase) -> Facet:
        if kb.is_part(mention.concept):
            return Facet.part
        if kb.is_subtype(mention.concept, "vehicle"):
            return Facet.vehicle
        if kb.is_subtype(mention.concept, "person"):
            return Facet.driver
        return Facet.unresolved

    def coerce_facet(
        self,
        mention: Mention,
        predicate: LexiconEntry,
        role: GrammaticalRole,
        kb: KnowledgeBase,
    ) -> tuple[Facet, CoercionRecord | None]:
        """
        Facet of a mention under a predicate's selectional constraint.

        Args:
            mention: Mention to type
            predicate: Predicate entry with a selectional value
            role: Grammatical role of the mention in the predicate's clause
            kb: Knowledge base

        Returns:
            The facet and, when the predicate forced a shift, the coercion record
        """
        default = self.default_facet(mention, kb)

        def shifted(to_facet: Facet, from_facet: Facet) -> tuple[Facet, CoercionRecord]:
            record = CoercionRecord(
                mention=mention.id,
                from_facet=from_facet,
                to_facet=to_facet,
                trigger=predicate.selectional,
                predicate_lemma=predicate.lemma,
            )
            return to_facet, record

        if default == Facet.part:
            # Whoever opens a door from inside is a passenger of its vehicle
            if (
                mention.head_lemma == "door"
                and predicate.lemma == "open"
                and predicate.selectional == Selectional.requires_agent
            ):
                return shifted(Facet.passenger_group, Facet.part)
            return Facet.part, None

        if (
            predicate.selectional == Selectional.requires_agent
            and role == GrammaticalRole.subject
            and kb.is_subtype(mention.concept, "vehicle")
        ):
            return shifted(Facet.driver, default)

        if (
            predicate.selectional == Selectional.requires_physical_object
            and role == GrammaticalRole.object
            and mention.definiteness == Definiteness.pronoun_1st
        ):
            return shifted(Facet.vehicle, default)

        return default, None

    def assign_facets(
        self,
        mentions: list[Mention],
        clauses: list[Clause],
        kb: KnowledgeBase,
        language: Language,
    ) -> tuple[list[Mention], list[CoercionRecord]]:
        """Type every mention against the predicates of its clause; the first coercion found wins."""
        predicates = {
            clause.index: [
                match.entry
                for match in kb.match_lexemes(clause.tokens, language)
                if match.entry.selectional is not None
            ]
            for clause in clauses
        }
        typed: list[Mention] = []
        records: list[CoercionRecord] = []
        for mention in mentions:
            facet, record = self.default_facet(mention, kb), None
            for predicate in predicates.get(mention.clause, []):
                facet, record = self.coerce_facet(mention, predicate, mention.grammatical_role, kb)
                if record:
                    records.append(record)
                    break
            typed.append(mention.model_copy(update={"facet": facet}))
        return typed, records

    def process_state(self, state: MentionState, kb: KnowledgeBase) -> MentionState:
        """
        Process the mention state.

        Args:
            state: Current state containing the segmented clauses
            kb: Knowledge base

        Returns:
            Updated state with typed mentions and coercion records
        """
        try:
            clauses, language = state["clauses"], state["language"]
            mentions = self.extract_report_mentions(clauses, kb, language)
            state["mentions"], state["coercions"] = self.assign_facets(mentions, clauses, kb, language)
            logger.info(f"Extracted {len(state['mentions'])} mentions, {len(state['coercions'])} coercions")
            return state

        except Exception as e:
            logger.error(f"Error processing mention state: {traceback.format_exc()}")
            state["error"] = str(e)
            raise


# Global mention agent instance
mention_agent = MentionAgent()
