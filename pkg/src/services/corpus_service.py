"""Corpus service: report loading, tokenization and clause segmentation."""

import re
import traceback
from collections.abc import Sequence
from itertools import pairwise
from pathlib import Path

from loguru import logger
from nltk.tokenize import RegexpTokenizer

from ..config.settings import Language, settings
from ..models.errors import ReportLoadError
from ..models.schemas import Clause, Report, Span, Token
from .knowledge_service import KnowledgeBase, knowledge_service

# Title abbreviations first so their period never becomes a sentence terminator
TOKEN_PATTERN = r"\b(?:Mrs|Mr|Dr|St)\.|\d+(?:[.,]\d+)?|\w+(?:[-'’]\w+)*|[^\w\s]"

SENTENCE_TERMINATORS = frozenset({".", "?", "!", ";"})
CLAUSE_CONJUNCTIONS = frozenset({"and", "but", "when", "for", "that"})
# Ambiguous with a preposition or a determiner; they open a clause only before a finite verb
FINITE_CONJUNCTIONS = frozenset({"for", "that"})
AUXILIARIES = frozenset(
    {
        "am",
        "is",
        "are",
        "was",
        "were",
        "had",
        "has",
        "have",
        "did",
        "do",
        "does",
        "can",
        "could",
        "will",
        "would",
        "should",
    }
)
NOMINATIVE_PRONOUNS = frozenset({"i", "we", "he", "she", "they", "it"})

_tokenizer = RegexpTokenizer(TOKEN_PATTERN)
_report_name = re.compile(r"^(?P<id>[^.]+)(?:\.(?P<lang>[a-z]{2}))?\.txt$")


def tokenize(text: str, kb: KnowledgeBase | None = None) -> list[Token]:
    """
    Split text into tokens with exact character offsets.

    Contractions found in the contraction table become two tokens; every other token is
    lemmatized through the irregular form table, falling back to lowercase folding.

    Args:
        text: Text to tokenize
        kb: Knowledge base providing the irregular form and contraction tables

    Returns:
        Tokens in text order, indexed from zero
    """
    kb = kb or knowledge_service.kb
    tokens: list[Token] = []
    for start, end in _tokenizer.span_tokenize(text):
        surface = text[start:end]
        split = kb.split_contraction(surface)
        if split:
            offset, first, second = split
            pieces = [(start, start + offset, first), (start + offset, end, second)]
        else:
            pieces = [(start, end, kb.lemma_of(surface))]
        for piece_start, piece_end, lemma in pieces:
            tokens.append(
                Token(
                    index=len(tokens),
                    surface=text[piece_start:piece_end],
                    lemma=lemma,
                    span=Span(start=piece_start, end=piece_end),
                )
            )
    return tokens


def is_verb_token(token: Token, kb: KnowledgeBase, language: Language | None = None) -> bool:
    return any(entry.word_class.is_verb for entry in kb.lookup(token.lemma, language))


def is_finite(tokens: Sequence[Token], i: int, kb: KnowledgeBase, language: Language | None = None) -> bool:
    """Whether ``tokens[i]`` heads a finite verb group.

    Auxiliaries always do. A lexicon verb does when it is inflected (not an -ing form) or directly
    follows a nominative pronoun.
    """
    token = tokens[i]
    folded = token.surface.lower()
    if folded in AUXILIARIES:
        return True
    if not is_verb_token(token, kb, language):
        return False
    if token.lemma != folded and not folded.endswith("ing"):
        return True
    return i > 0 and tokens[i - 1].surface.lower() in NOMINATIVE_PRONOUNS


def _is_participle(token: Token) -> bool:
    return token.surface.isalpha() and token.surface.lower().endswith("ing")


def _split_sentences(tokens: list[Token]) -> list[list[Token]]:
    sentences: list[list[Token]] = []
    current: list[Token] = []
    for token in tokens:
        current.append(token)
        if token.surface in SENTENCE_TERMINATORS:
            sentences.append(current)
            current = []
    if current:
        sentences.append(current)
    return sentences


def _comma_opens_clause(sentence: list[Token], i: int, kb: KnowledgeBase, language: Language) -> bool:
    """A comma-separated segment opens a clause when it starts participially or holds a finite verb."""
    end = next((k for k in range(i, len(sentence)) if sentence[k].surface == ","), len(sentence))
    if end == i:
        return False
    first = i + 1 if sentence[i].lemma == "not" and i + 1 < end else i
    if _is_participle(sentence[first]):
        return True
    return any(is_finite(sentence, k, kb, language) for k in range(i, end))


def _conjunction_opens_clause(sentence: list[Token], i: int, kb: KnowledgeBase, language: Language) -> bool:
    if i + 1 >= len(sentence):
        return False
    following = sentence[i + 1]
    # Coordinated verb phrases stay in one clause
    if is_verb_token(following, kb, language) or _is_participle(following):
        return False
    if sentence[i].surface.lower() in FINITE_CONJUNCTIONS:
        return any(is_finite(sentence, k, kb, language) for k in range(i + 1, len(sentence)))
    return True


def _clause_starts(sentence: list[Token], kb: KnowledgeBase, language: Language) -> list[int]:
    starts = [0]
    for i in range(1, len(sentence)):
        if sentence[i - 1].surface == ",":
            if _comma_opens_clause(sentence, i, kb, language):
                starts.append(i)
                continue
        if (
            sentence[i].surface.lower() in CLAUSE_CONJUNCTIONS
            and i > starts[-1]
            and _conjunction_opens_clause(sentence, i, kb, language)
        ):
            starts.append(i)
    return starts


def segment(report: Report, kb: KnowledgeBase | None = None) -> list[Clause]:
    """
    Segment a report into sentences and clauses.

    Sentences end at ``. ? ! ;``. Within a sentence a clause starts after a comma when the next
    comma-separated segment is participial or contains a finite verb, and at a coordinating
    conjunction that does not coordinate verb phrases. Every token lands in exactly one clause.

    Args:
        report: Report to segment
        kb: Knowledge base used to recognize verbs

    Returns:
        Clauses in text order with sentence and clause ordinals
    """
    kb = kb or knowledge_service.kb
    tokens = tokenize(report.body, kb)
    clauses: list[Clause] = []
    for sentence_index, sentence in enumerate(_split_sentences(tokens)):
        bounds = _clause_starts(sentence, kb, report.language) + [len(sentence)]
        for clause_index, (start, end) in enumerate(pairwise(bounds)):
            clauses.append(
                Clause(
                    index=len(clauses),
                    sentence_index=sentence_index,
                    clause_index=clause_index,
                    tokens=tuple(sentence[start:end]),
                )
            )
    logger.debug(f"Report {report.id}: {len(tokens)} tokens, {len(clauses)} clauses")
    return clauses


def parse_report_name(path: Path) -> tuple[str, Language]:
    """Report id and language from a ``<ID>.<lang>.txt`` file name."""
    match = _report_name.match(path.name)
    if not match:
        return path.stem.split(".")[0], settings.corpus.default_language
    lang = match.group("lang")
    try:
        language = Language(lang) if lang else settings.corpus.default_language
    except ValueError:
        logger.warning(f"Unknown language suffix '{lang}' in {path.name}, using {settings.corpus.default_language}")
        language = settings.corpus.default_language
    return match.group("id"), language


def load_report(path: Path | str) -> Report:
    """
    Load one report file.

    Raises:
        ReportLoadError: if the file cannot be read or is not valid UTF-8
    """
    path = Path(path)
    report_id, language = parse_report_name(path)
    try:
        body = path.read_text(encoding="utf-8")
    except UnicodeDecodeError as e:
        raise ReportLoadError(path, f"not valid UTF-8 ({e.reason})") from e
    except OSError as e:
        raise ReportLoadError(path, e.strerror or str(e)) from e
    fragment = True if report_id in settings.corpus.fragment_ids else None
    return Report(id=report_id, language=language, body=body.strip(), fragment=fragment)


def _natural_key(report_id: str) -> tuple[str, int, str]:
    match = re.match(r"^(\D*)(\d+)(.*)$", report_id)
    if not match:
        return report_id, -1, ""
    return match.group(1), int(match.group(2)), match.group(3)


def load_corpus(corpus_dir: Path | str | None = None) -> list[Report]:
    """Load every ``*.txt`` report of a directory, sorted by id."""
    corpus_path = Path(corpus_dir) if corpus_dir else settings.corpus.corpus_dir
    if not corpus_path.is_dir():
        raise ReportLoadError(corpus_path, "not a directory")
    try:
        reports = [load_report(path) for path in corpus_path.glob("*.txt")]
    except ReportLoadError:
        logger.error(f"Error loading corpus {corpus_path}: {traceback.format_exc()}")
        raise
    reports.sort(key=lambda report: _natural_key(report.id))
    logger.info(f"Loaded {len(reports)} reports from {corpus_path}")
    return reports
