"""Coreference Agent for grouping mentions into a minimal set of discourse entities."""

import traceback
from collections.abc import Callable
from functools import singledispatch
from itertools import combinations
from typing import TypedDict

import networkx as nx
from loguru import logger

from ..config.settings import settings
from ..models.errors import CorefCapExceededError, OracleSizeError
from ..models.schemas import (
    CoercionRecord,
    Definiteness,
    DiscourseEntity,
    GrammaticalRole,
    Mention,
    Partition,
    Possessor,
)
from ..services.knowledge_service import ROOT_CONCEPT, KnowledgeBase


class CorefState(TypedDict):
    """State for coreference agent."""

    mentions: list[Mention]
    coercions: list[CoercionRecord]
    partition: Partition | None
    error: str | None


@singledispatch
def is_writer_marked(mention: Mention) -> bool:
    """First person pronoun, first person possessive or label A."""
    return mention.is_writer_marked


@singledispatch
def unit_of(mention: Mention, kb: KnowledgeBase) -> str:
    """Concept of the vehicle unit a mention belongs to; parts stand for their whole."""
    if kb.is_part(mention.concept):
        return kb.whole_of(mention.concept) or mention.concept
    return mention.concept


@singledispatch
def is_participant(mention: Mention, kb: KnowledgeBase) -> bool:
    unit = unit_of(mention, kb)
    return kb.is_subtype(unit, "vehicle") or kb.is_subtype(unit, "person")


def is_third_party_person(mention: Mention, kb: KnowledgeBase) -> bool:
    """A person the writer describes from outside: never the writer."""
    return not mention.is_writer_marked and not kb.is_part(mention.concept) and kb.is_subtype(mention.concept, "person")


def is_other_party(mention: Mention, writer: Mention, kb: KnowledgeBase) -> bool:
    """Whether ``mention`` is marked as not belonging to the party of the writer-marked ``writer``."""
    if mention.is_writer_marked:
        return False
    if mention.label == "B" or mention.possessor == Possessor.third or mention.contrastive:
        return True
    if is_third_party_person(mention, kb):
        return True
    return (
        mention.definiteness == Definiteness.pronoun_3rd
        and writer.definiteness == Definiteness.pronoun_1st
        and mention.sentence == writer.sentence
    )


# Lift the mention filters to entities
@is_writer_marked.register(DiscourseEntity)
def _(entity: DiscourseEntity) -> bool:
    return any(is_writer_marked(mention) for mention in entity.mentions)


@is_participant.register(DiscourseEntity)
def _(entity: DiscourseEntity, kb: KnowledgeBase) -> bool:
    return any(is_participant(mention, kb) for mention in entity.mentions)


def concepts_unify(a: str, b: str, kb: KnowledgeBase) -> bool:
    """Compatible concepts: related by subtyping, or the driver and vehicle facets of one unit."""
    if ROOT_CONCEPT in (a, b) or kb.is_subtype(a, b) or kb.is_subtype(b, a):
        return True
    kinds = {kind for concept in (a, b) for kind in ("vehicle", "person") if kb.is_subtype(concept, kind)}
    return kinds == {"vehicle", "person"}


class CorefAgent:
    """Agent responsible for minimality-driven coreference resolution."""

    def __init__(self):
        """Initialize the coreference agent."""
        self.name = "coref_agent"
        logger.info("Coref Agent initialized")

    @staticmethod
    def compatible(a: Mention, b: Mention, kb: KnowledgeBase) -> bool:
        """
        Whether two mentions may denote the same discourse entity.

        All of the following must hold:
            concepts unify after mapping parts to their whole;
            an indefinite mention is the textually first mention of its entity and never the writer's;
            label A and label B stay apart;
            no writer-marked mention joins label B, a third-party person, a third-person possessed
            mention ("Mrs. Glorieux's vehicle", "its door") or a contrastive one ("the last vehicle");
            "it" and "I" of one sentence are different entities;
            subject and object of one clause are different entities unless both are the writer's.

        Args:
            a: First mention
            b: Second mention
            kb: Knowledge base

        Returns:
            True when the pair may corefer
        """
        if a.id == b.id:
            return True
        _, later = sorted((a, b), key=lambda mention: (mention.tokens.start, mention.id))

        if not concepts_unify(unit_of(a, kb), unit_of(b, kb), kb):
            return False

        if later.definiteness == Definiteness.indefinite:
            return False
        if Definiteness.indefinite in (a.definiteness, b.definiteness) and (a.is_writer_marked or b.is_writer_marked):
            return False

        if {a.label, b.label} == {"A", "B"}:
            return False
        for writer, other in ((a, b), (b, a)):
            if writer.is_writer_marked and is_other_party(other, writer, kb):
                return False

        if (
            a.clause == b.clause
            and {a.grammatical_role, b.grammatical_role} == {GrammaticalRole.subject, GrammaticalRole.object}
            and not kb.is_part(a.concept)
            and not kb.is_part(b.concept)
            and not (a.is_writer_marked and b.is_writer_marked)
        ):
            return False

        return True

    def compatibility_matrix(self, mentions: list[Mention], kb: KnowledgeBase) -> list[list[bool]]:
        n = len(mentions)
        matrix = [[True] * n for _ in range(n)]
        for i, j in combinations(range(n), 2):
            matrix[i][j] = matrix[j][i] = self.compatible(mentions[i], mentions[j], kb)
        return matrix

    @staticmethod
    def _conflict_graph(matrix: list[list[bool]]) -> nx.Graph:
        conflicts = nx.Graph()
        conflicts.add_nodes_from(range(len(matrix)))
        conflicts.add_edges_from((i, j) for i, j in combinations(range(len(matrix)), 2) if not matrix[i][j])
        return conflicts

    @staticmethod
    def _masks(matrix: list[list[bool]]) -> list[int]:
        """Bit ``j`` of mask ``i`` is set when mentions ``i`` and ``j`` are compatible."""
        return [sum(1 << j for j, ok in enumerate(row) if ok) for row in matrix]

    @staticmethod
    def _fits(members: int, mask: int) -> bool:
        return members & ~mask == 0

    def _fewest_blocks(
        self, masks: list[int], degree: list[int], blocks: list[int], placed: int, bound: int, goal: int
    ) -> int:
        """
        Fewest blocks extending ``blocks`` to a partition of every mention, searched below ``bound``.

        DSatur branch and bound: the unplaced mention that fits the fewest open blocks goes next, ties
        to the one with the most conflicts. The search stops at the first partition of at most
        ``goal`` blocks.

        Returns:
            Number of blocks of the best partition found, ``bound`` when none is below it
        """
        n = len(masks)
        blocks = list(blocks)
        best = bound

        def search(placed: int, count: int) -> bool:
            nonlocal best
            if len(blocks) >= best:
                return False
            if count == n:
                best = len(blocks)
                return best <= goal
            choice, options = -1, []
            for j in range(n):
                if placed >> j & 1:
                    continue
                fits = [b for b, members in enumerate(blocks) if self._fits(members, masks[j])]
                if not fits and len(blocks) + 1 >= best:
                    return False
                if choice < 0 or (len(fits), -degree[j]) < (len(options), -degree[choice]):
                    choice, options = j, fits
            bit = 1 << choice
            for b in options:
                blocks[b] |= bit
                done = search(placed | bit, count + 1)
                blocks[b] &= ~bit
                if done:
                    return True
            if len(blocks) + 1 < best:
                blocks.append(bit)
                done = search(placed | bit, count + 1)
                blocks.pop()
                return done
            return False

        search(placed, placed.bit_count())
        return best

    def min_cost(self, matrix: list[list[bool]]) -> int:
        """
        Exact minimum number of entities for a compatibility matrix.

        The largest set of pairwise incompatible mentions bounds the search from below and a greedy
        DSatur colouring of the conflict graph from above.

        Args:
            matrix: Symmetric pairwise compatibility

        Returns:
            Number of entities of a minimal partition
        """
        n = len(matrix)
        if n == 0:
            return 0
        conflicts = self._conflict_graph(matrix)
        lower = max(len(clique) for clique in nx.find_cliques(conflicts))
        colouring = nx.coloring.greedy_color(conflicts, strategy="DSATUR")
        upper = max(colouring.values()) + 1
        if upper == lower:
            return upper
        degree = [conflicts.degree(i) for i in range(n)]
        return self._fewest_blocks(self._masks(matrix), degree, [], 0, upper, lower)

    def resolve(
        self,
        mentions: list[Mention],
        kb: KnowledgeBase,
        cap: int | None = None,
        coercions: list[CoercionRecord] | None = None,
    ) -> Partition:
        """
        Partition mentions into the minimal number of pairwise compatible entities.

        The minimal number comes from ``min_cost``. Mentions are then placed in text order: each takes
        the first of its options, existing entities ordered by nearest preceding member and then a new
        entity, from which the remaining mentions still fit into a minimal partition. Every mention is
        thereby linked to its nearest compatible antecedent.

        Args:
            mentions: Mentions in text order
            kb: Knowledge base
            cap: Maximum number of mentions, defaults to the configured coreference cap
            coercions: Coercion records to attach to the entities of their mentions

        Returns:
            Minimal partition with the nearest-antecedent tie-break

        Raises:
            CorefCapExceededError: if there are more mentions than the cap
        """
        cap = cap if cap is not None else settings.analyzer.coref_cap
        if len(mentions) > cap:
            raise CorefCapExceededError(len(mentions), cap)
        if not mentions:
            return Partition()

        n = len(mentions)
        matrix = self.compatibility_matrix(mentions, kb)
        masks = self._masks(matrix)
        degree = [row.count(False) for row in matrix]
        cost = self.min_cost(matrix)
        blocks: list[list[int]] = []
        members: list[int] = []

        def placing(b: int, bit: int) -> list[int]:
            return [block | bit if k == b else block for k, block in enumerate(members)] + (
                [bit] if b == len(members) else []
            )

        for i in range(n):
            bit = 1 << i
            placed = (bit << 1) - 1
            options = sorted(
                (b for b in range(len(blocks)) if self._fits(members[b], masks[i])),
                key=lambda b: -blocks[b][-1],
            )
            if len(blocks) < cost:
                options.append(len(blocks))
            # Previous choices extend to a minimal partition, so some option completes
            b = next(
                b
                for b in options
                if self._fewest_blocks(masks, degree, placing(b, bit), placed, cost + 1, cost) <= cost
            )
            members = placing(b, bit)
            if b < len(blocks):
                blocks[b].append(i)
            else:
                blocks.append([i])

        logger.debug(f"Resolved {n} mentions into {cost} entities")
        return self.build_partition(mentions, blocks, kb, coercions)

    def brute_force_min_partition(
        self,
        mentions: list[Mention],
        kb: KnowledgeBase,
        cap: int | None = None,
    ) -> Partition:
        """
        Enumerate every set partition with pairwise compatible blocks and keep the best one.

        Minimal cost first, then the lexicographically greatest vector of nearest antecedents
        (the index of the closest preceding mention in the same entity, -1 for none).

        Raises:
            OracleSizeError: if there are more mentions than the oracle cap
        """
        cap = cap if cap is not None else settings.analyzer.oracle_cap
        if len(mentions) > cap:
            raise OracleSizeError(len(mentions), cap)
        if not mentions:
            return Partition()

        n = len(mentions)
        matrix = self.compatibility_matrix(mentions, kb)
        best_key: tuple[int, tuple[int, ...]] | None = None
        best_labels: list[int] = []

        def fits(i: int, label: int, labels: list[int]) -> bool:
            return all(matrix[i][j] for j in range(i) if labels[j] == label)

        for labels in restricted_growth_strings(n, fits):
            last_seen: dict[int, int] = {}
            antecedents = []
            for i, label in enumerate(labels):
                antecedents.append(last_seen.get(label, -1))
                last_seen[label] = i
            key = (max(labels) + 1, tuple(-a for a in antecedents))
            if best_key is None or key < best_key:
                best_key, best_labels = key, labels

        blocks: list[list[int]] = [[] for _ in range(max(best_labels) + 1)]
        for i, label in enumerate(best_labels):
            blocks[label].append(i)
        return self.build_partition(mentions, blocks, kb)

    def build_partition(
        mentions: list[Mention],
        blocks: list[list[int]],
        kb: KnowledgeBase,
        coercions: list[CoercionRecord] | None = None,
    ) -> Partition:
        entities = []
        for entity_id, block in enumerate(sorted(blocks, key=lambda b: b[0])):
            members = [mentions[i] for i in block]
            whole = [m.concept for m in members if not kb.is_part(m.concept)] or [unit_of(m, kb) for m in members]
            member_ids = {m.id for m in members}
            entities.append(
                DiscourseEntity(
                    id=entity_id,
                    mentions=members,
                    unit_concept=kb.most_specific_common(whole),
                    facets_seen=list(dict.fromkeys(m.facet for m in members)),
                    is_writer_party=any(m.is_writer_marked for m in members),
                    coercions=[record for record in coercions or [] if record.mention in member_ids],
                )
            )
        return Partition(entities=entities, cost=len(entities))

    def process_state(self, state: CorefState, kb: KnowledgeBase) -> CorefState:
        """
        Process the coreference state.

        Args:
            state: Current state containing typed mentions
            kb: Knowledge base

        Returns:
            Updated state with the minimal partition
        """
        try:
            partition = self.resolve(state["mentions"], kb, coercions=state["coercions"])
            state["partition"] = partition
            logger.info(f"Resolved {len(state['mentions'])} mentions into {partition.cost} entities")
            return state

        except Exception as e:
            logger.error(f"Error processing coreference state: {traceback.format_exc()}")
            state["error"] = str(e)
            raise


def restricted_growth_strings(n: int, fits: Callable[[int, int, list[int]], bool] | None = None):
    """
    Yield every set partition of ``n`` items as a label list, blocks numbered by first item.

    ``fits(i, label, labels)`` may veto putting item ``i`` into block ``label`` given the labels of the
    items before it; vetoed prefixes are never extended.
    """
    labels = [0] * n

    def extend(i: int, blocks: int):
        if i == n:
            yield list(labels)
            return
        for label in range(blocks + 1):
            if fits is not None and label < blocks and not fits(i, label, labels):
                continue
            labels[i] = label
            yield from extend(i + 1, max(blocks, label + 1))

    if n == 0:
        yield []
        return
    yield from extend(1, 1)


# Global coreference agent instance
coref_agent = CorefAgent()
