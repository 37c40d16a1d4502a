"""Knowledge base service: type hierarchy, traffic rules and lexicon."""

import traceback
from collections import defaultdict
from collections.abc import Iterator, Sequence
from pathlib import Path
from types import MappingProxyType
from typing import Any

import networkx as nx
from loguru import logger

from ..config.settings import Language, settings
from ..models.errors import HierarchyCycleError, KnowledgeParseError, UnknownConceptError
from ..models.schemas import (
    AmbiguousReading,
    LexemeMatch,
    LexiconEntry,
    Selectional,
    Token,
    TrafficRule,
    WordClass,
    WriterBehavior,
)

ROOT_CONCEPT = "entity"
SEED_CONCEPTS = ("car", "truck", "hauler", "motorcycle", "vehicle", "driver", "person")
SEED_PARTS = ("door", "bumper", "mirror", "blinker")
SEED_RULES = (
    "drive-on-right",
    "pass-on-left",
    "priority-to-right",
    "obey-lane-markings",
    "headlights-dipped",
    "speed-limit",
)


def _read_rows(path: Path, min_cols: int, max_cols: int) -> Iterator[tuple[int, list[str]]]:
    """Yield (line number, columns) for every data line of a tab-separated file."""
    for line_no, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.rstrip("\r\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        cols = [col.strip() for col in line.split("\t")]
        if not min_cols <= len(cols) <= max_cols:
            raise KnowledgeParseError(path, line_no, f"expected {min_cols} to {max_cols} columns, got {len(cols)}")
        yield line_no, cols


def _optional(value: str | None) -> str | None:
    return None if value in (None, "", "-") else value


class KnowledgeBase:
    """Immutable background knowledge and language conventions.

    Holds the subtype graph with its precomputed reflexive-transitive closure, the part-of links,
    the traffic rule registry and the lexicon, plus the auxiliary tables used by the tokenizer
    (irregular forms, contractions) and by the ambiguity resolver.
    """

    def __init__(
        self,
        hierarchy: nx.DiGraph,
        partof: dict[str, str],
        rules: dict[str, TrafficRule],
        lexicon: list[LexiconEntry],
        ambiguous: list[AmbiguousReading] | None = None,
        irregular: dict[str, str] | None = None,
        contractions: dict[str, tuple[int, str, str]] | None = None,
    ):
        self._graph = nx.freeze(hierarchy)
        self._closure = MappingProxyType(
            {node: frozenset(nx.descendants(hierarchy, node)) | {node} for node in hierarchy.nodes}
        )
        self._partof = MappingProxyType(dict(partof))
        self._rules = MappingProxyType(dict(rules))
        self._lexicon = tuple(lexicon)
        self._ambiguous = tuple(ambiguous or ())
        self._irregular = MappingProxyType(dict(irregular or {}))
        self._contractions = MappingProxyType(dict(contractions or {}))

        by_lemma: dict[str, list[LexiconEntry]] = defaultdict(list)
        by_first_word: dict[str, list[LexiconEntry]] = defaultdict(list)
        for entry in self._lexicon:
            by_lemma[entry.lemma].append(entry)
            by_first_word[entry.lemma.split()[0]].append(entry)
        self._by_lemma = MappingProxyType({lemma: tuple(entries) for lemma, entries in by_lemma.items()})
        self._by_first_word = MappingProxyType(
            {word: tuple(sorted(entries, key=lambda e: -e.length)) for word, entries in by_first_word.items()}
        )
        self._pattern_rules = MappingProxyType(
            {pattern: rule.id for rule in self._rules.values() for pattern in rule.violation_patterns}
        )

    # Type hierarchy

    def concepts(self) -> list[str]:
        return sorted(self._graph.nodes)

    def has_concept(self, concept: str) -> bool:
        return concept in self._closure

    def is_subtype(self, a: str, b: str) -> bool:
        """True iff ``a`` equals ``b`` or is a transitive subtype of it.

        Raises:
            UnknownConceptError: if either concept is not in the hierarchy
        """
        for concept in (a, b):
            if concept not in self._closure:
                raise UnknownConceptError(concept)
        return b in self._closure[a]

    def ancestors(self, concept: str) -> frozenset[str]:
        if concept not in self._closure:
            raise UnknownConceptError(concept)
        return self._closure[concept]

    def depth(self, concept: str) -> int:
        return len(self.ancestors(concept)) - 1

    def most_specific_common(self, concepts: list[str]) -> str:
        """Most specific concept that every given concept is a subtype of."""
        if not concepts:
            return ROOT_CONCEPT
        common = frozenset.intersection(*(self.ancestors(concept) for concept in concepts))
        return min(common, key=lambda c: (-self.depth(c), c))

    def whole_of(self, part: str) -> str | None:
        """Whole the part belongs to, looking through the part's supertypes."""
        for concept in sorted(self.ancestors(part), key=lambda c: -self.depth(c)):
            if concept in self._partof:
                return self._partof[concept]
        return None

    def parts_of(self, whole: str) -> list[str]:
        return sorted(part for part, owner in self._partof.items() if self.is_subtype(whole, owner))

    def is_part(self, concept: str) -> bool:
        return self.has_concept(concept) and self.whole_of(concept) is not None

    # Rules

    def rule(self, rule_id: str) -> TrafficRule | None:
        return self._rules.get(rule_id)

    def rules(self) -> list[TrafficRule]:
        return [self._rules[rule_id] for rule_id in sorted(self._rules)]

    def rule_for_pattern(self, pattern_id: str) -> str | None:
        return self._pattern_rules.get(pattern_id)

    # Lexicon

    def lookup(self, lemma: str, language: Language | None = None) -> list[LexiconEntry]:
        """All entries for the word and for its lemma after lowercase folding, optionally restricted to one language."""
        folded = lemma.lower().strip()
        entries = list(self._by_lemma.get(folded, ()))
        base = self.lemma_of(folded)
        if base != folded:
            entries += [entry for entry in self._by_lemma.get(base, ()) if entry not in entries]
        return [entry for entry in entries if language is None or entry.language == language]

    def has_class(self, lemma: str, word_class: WordClass, language: Language | None = None) -> bool:
        return any(entry.word_class == word_class for entry in self.lookup(lemma, language))

    def entries_starting_with(self, word: str, language: Language | None = None) -> list[LexiconEntry]:
        """Entries whose first lemma word is ``word``, longest first."""
        entries = self._by_first_word.get(word.lower(), ())
        return [entry for entry in entries if language is None or entry.language == language]

    def match_lexemes(self, tokens: Sequence[Token], language: Language | None = None) -> list[LexemeMatch]:
        """
        Match lexicon entries as token n-grams.

        A word of a multi-word lemma matches a token by lemma or by lowercase surface, so surface-form
        entries such as passive participles are found as well.

        Args:
            tokens: Consecutive tokens, usually one clause
            language: Optional language restriction

        Returns:
            Every match in token order, longer matches first at the same position
        """
        matches: list[LexemeMatch] = []
        for i, token in enumerate(tokens):
            candidates = {
                entry: None
                for word in (token.lemma, token.surface.lower())
                for entry in self.entries_starting_with(word, language)
            }
            for entry in sorted(candidates, key=lambda e: -e.length):
                words = entry.lemma.split()
                window = tokens[i : i + len(words)]
                if len(window) == len(words) and all(
                    word in (tok.lemma, tok.surface.lower()) for word, tok in zip(words, window, strict=True)
                ):
                    matches.append(LexemeMatch(start=window[0].index, end=window[-1].index + 1, entry=entry))
        return matches

    def lemma_of(self, surface: str) -> str:
        folded = surface.lower()
        return self._irregular.get(folded, folded)

    def split_contraction(self, surface: str) -> tuple[int, str, str] | None:
        return self._contractions.get(surface.lower().replace("’", "'"))

    def ambiguous(self, language: Language, lemma: str) -> list[AmbiguousReading]:
        return [row for row in self._ambiguous if row.language == language and row.lemma == lemma.lower()]

    # Equality over the serialized form

    def to_dict(self) -> dict[str, Any]:
        return {
            "isa": sorted(self._graph.edges),
            "partof": sorted(self._partof.items()),
            "rules": [rule.model_dump(mode="json") for rule in self.rules()],
            "lexicon": [entry.model_dump(mode="json") for entry in self._lexicon],
            "ambiguous": [row.model_dump(mode="json") for row in self._ambiguous],
            "irregular": sorted(self._irregular.items()),
            "contractions": sorted(self._contractions.items()),
        }

    def __eq__(self, other: object) -> bool:
        return isinstance(other, KnowledgeBase) and self.to_dict() == other.to_dict()

    def __hash__(self) -> int:
        return hash(len(self._lexicon))

    def __repr__(self) -> str:
        return f"KnowledgeBase(concepts={len(self._closure)}, rules={len(self._rules)}, lexicon={len(self._lexicon)})"


def _load_hierarchy(path: Path) -> tuple[nx.DiGraph, dict[str, str]]:
    graph = nx.DiGraph()
    graph.add_node(ROOT_CONCEPT)
    partof_rows: list[tuple[int, str, str]] = []
    first_seen: dict[str, int] = {}

    for line_no, (child, relation, parent) in _read_rows(path, 3, 3):
        if relation == "isa":
            # Edges point from subtype to supertype, so descendants are ancestors in the hierarchy
            graph.add_edge(child, parent)
            first_seen.setdefault(child, line_no)
            first_seen.setdefault(parent, line_no)
        elif relation == "partof":
            partof_rows.append((line_no, child, parent))
        else:
            raise KnowledgeParseError(path, line_no, f"unknown relation '{relation}', expected isa or partof")

    if not nx.is_directed_acyclic_graph(graph):
        cycle = [edge[0] for edge in nx.find_cycle(graph)]
        raise HierarchyCycleError(cycle + [cycle[0]])

    for concept, line_no in sorted(first_seen.items(), key=lambda item: item[1]):
        if concept != ROOT_CONCEPT and not nx.has_path(graph, concept, ROOT_CONCEPT):
            raise KnowledgeParseError(path, line_no, f"concept '{concept}' does not reach root '{ROOT_CONCEPT}'")

    partof: dict[str, str] = {}
    for line_no, part, whole in partof_rows:
        for concept in (part, whole):
            if concept not in graph:
                raise UnknownConceptError(concept, f"{path.name}:{line_no}")
        partof[part] = whole

    return graph, partof


def _load_rules(path: Path) -> dict[str, TrafficRule]:
    rules: dict[str, TrafficRule] = {}
    for line_no, cols in _read_rows(path, 2, 3):
        rule_id, description = cols[0], cols[1]
        if rule_id in rules:
            raise KnowledgeParseError(path, line_no, f"duplicate rule id '{rule_id}'")
        patterns = tuple(p.strip() for p in cols[2].split(",") if p.strip()) if len(cols) > 2 else ()
        rules[rule_id] = TrafficRule(id=rule_id, description=description, violation_patterns=patterns)
    return rules


def _load_lexicon(path: Path, graph: nx.DiGraph) -> list[LexiconEntry]:
    entries: list[LexiconEntry] = []
    seen: set[tuple[str, str, str]] = set()
    for line_no, cols in _read_rows(path, 3, 5):
        cols = cols + ["-"] * (5 - len(cols))
        language, lemma, word_class, concept, selectional = cols[0], cols[1].lower(), cols[2], cols[3], cols[4]
        try:
            entry = LexiconEntry(
                language=Language(language),
                lemma=lemma,
                word_class=WordClass(word_class),
                concept=_optional(concept),
                selectional=Selectional(selectional) if _optional(selectional) else None,
            )
        except ValueError as e:
            raise KnowledgeParseError(path, line_no, str(e).splitlines()[0]) from e

        key = (entry.language, entry.lemma, entry.word_class)
        if key in seen:
            raise KnowledgeParseError(path, line_no, f"duplicate entry '{lemma}' / {word_class}")
        seen.add(key)

        if entry.word_class.is_noun and entry.concept is None:
            raise KnowledgeParseError(path, line_no, f"{word_class} entry '{lemma}' needs a concept")
        if entry.concept is not None and entry.concept not in graph:
            raise UnknownConceptError(entry.concept, f"{path.name}:{line_no}")
        entries.append(entry)
    return entries


def _load_ambiguous(path: Path) -> list[AmbiguousReading]:
    rows: list[AmbiguousReading] = []
    for line_no, (language, lemma, label, behavior, explains) in _read_rows(path, 5, 5):
        if explains.lower() not in ("true", "false"):
            raise KnowledgeParseError(path, line_no, f"explains_accident must be true or false, got '{explains}'")
        try:
            rows.append(
                AmbiguousReading(
                    language=Language(language),
                    lemma=lemma.lower(),
                    label=label,
                    writer_behavior=WriterBehavior(behavior),
                    explains_accident=explains.lower() == "true",
                )
            )
        except ValueError as e:
            raise KnowledgeParseError(path, line_no, str(e).splitlines()[0]) from e
    return rows


def _load_irregular(path: Path) -> dict[str, str]:
    return {form.lower(): lemma.lower() for _, (form, lemma) in _read_rows(path, 2, 2)}


def _load_contractions(path: Path) -> dict[str, tuple[int, str, str]]:
    contractions: dict[str, tuple[int, str, str]] = {}
    for line_no, (form, offset, first, second) in _read_rows(path, 4, 4):
        if not offset.isdigit() or not 0 < int(offset) < len(form):
            raise KnowledgeParseError(path, line_no, f"invalid split offset '{offset}' for '{form}'")
        contractions[form.lower()] = (int(offset), first.lower(), second.lower())
    return contractions


def load_knowledge(
    hierarchy_file: Path,
    rules_file: Path,
    lexicon_file: Path,
    ambiguous_file: Path | None = None,
    irregular_file: Path | None = None,
    contractions_file: Path | None = None,
) -> KnowledgeBase:
    """
    Load the knowledge base from its line-oriented files.

    Args:
        hierarchy_file: ``child isa parent`` / ``part partof whole`` lines
        rules_file: ``rule-id description [patterns]`` lines
        lexicon_file: ``lang lemma word_class concept? selectional?`` lines
        ambiguous_file: Optional ambiguous token table
        irregular_file: Optional inflected form table
        contractions_file: Optional contraction table

    Returns:
        Immutable knowledge base with the subtype closure precomputed

    Raises:
        KnowledgeParseError: on a malformed line
        HierarchyCycleError: if the subtype relation is cyclic
        UnknownConceptError: if a part-of link or lexicon entry names an undeclared concept
    """
    graph, partof = _load_hierarchy(Path(hierarchy_file))
    rules = _load_rules(Path(rules_file))
    lexicon = _load_lexicon(Path(lexicon_file), graph)
    kb = KnowledgeBase(
        hierarchy=graph,
        partof=partof,
        rules=rules,
        lexicon=lexicon,
        ambiguous=_load_ambiguous(Path(ambiguous_file)) if ambiguous_file else None,
        irregular=_load_irregular(Path(irregular_file)) if irregular_file else None,
        contractions=_load_contractions(Path(contractions_file)) if contractions_file else None,
    )
    logger.info(f"Loaded {kb!r}")
    return kb


def load_knowledge_dir(kb_dir: Path | str | None = None) -> KnowledgeBase:
    """Load every knowledge file from one directory using the configured file names."""
    kb_path = Path(kb_dir) if kb_dir else settings.knowledge.kb_dir
    names = settings.knowledge

    def optional(name: str) -> Path | None:
        path = kb_path / name
        return path if path.exists() else None

    return load_knowledge(
        hierarchy_file=kb_path / names.hierarchy_file,
        rules_file=kb_path / names.rules_file,
        lexicon_file=kb_path / names.lexicon_file,
        ambiguous_file=optional(names.ambiguous_file),
        irregular_file=optional(names.irregular_file),
        contractions_file=optional(names.contractions_file),
    )


def check_knowledge(kb_dir: Path | str | None = None) -> list[str]:
    """
    Load a knowledge directory and report its content and any missing seed content.

    Returns:
        Findings, one per line; lines starting with ``missing`` are problems
    """
    try:
        kb = load_knowledge_dir(kb_dir)
    except Exception:
        logger.error(f"Error checking knowledge base: {traceback.format_exc()}")
        raise

    findings = [
        f"concepts: {len(kb.concepts())}",
        f"rules: {len(kb.rules())}",
        f"lexicon entries: {len(kb.to_dict()['lexicon'])}",
    ]
    for concept in SEED_CONCEPTS:
        if not kb.has_concept(concept):
            findings.append(f"missing concept: {concept}")
    for vehicle in ("car", "truck", "hauler", "motorcycle"):
        if kb.has_concept(vehicle) and not kb.is_subtype(vehicle, "vehicle"):
            findings.append(f"missing subtype link: {vehicle} isa vehicle")
    if kb.has_concept("driver") and not kb.is_subtype("driver", "person"):
        findings.append("missing subtype link: driver isa person")
    for part in SEED_PARTS:
        if not kb.has_concept(part) or kb.whole_of(part) != "vehicle":
            findings.append(f"missing part-of link: {part} partof vehicle")
    for rule_id in SEED_RULES:
        if kb.rule(rule_id) is None:
            findings.append(f"missing rule: {rule_id}")
    return findings


class KnowledgeService:
    """Loads the configured knowledge base once and shares it between analyses."""

    def __init__(self):
        self.name = "knowledge_service"
        self._kb: KnowledgeBase | None = None
        logger.info("Knowledge Service initialized")

    @property
    def kb(self) -> KnowledgeBase:
        if self._kb is None:
            self._kb = load_knowledge_dir(settings.knowledge.kb_dir)
        return self._kb

    def reload(self, kb_dir: Path | str | None = None) -> KnowledgeBase:
        self._kb = load_knowledge_dir(kb_dir)
        return self._kb


# Global knowledge service instance
knowledge_service = KnowledgeService()
