"""Evaluation service: gold annotations and corpus comparison runs."""

import asyncio
import json
import traceback
from collections import Counter
from pathlib import Path

from loguru import logger
from pydantic import ValidationError

from ..agents.analysis_orchestrator import analysis_orchestrator
from ..config.settings import settings
from ..models.errors import GoldParseError
from ..models.schemas import AnalysisReport, CorpusRow, CorpusRun, DeviceKind, GoldAnnotation
from .corpus_service import load_corpus
from .knowledge_service import KnowledgeBase, knowledge_service

TABLE_COLUMNS = ("id", "entities", "impact", "#A", "#B", "ambiguity", "status")


def load_gold(path: Path | str) -> GoldAnnotation:
    """
    Parse one ``<ID>.gold.json`` file.

    Raises:
        GoldParseError: if the file is not JSON or does not match the annotation schema
    """
    path = Path(path)
    try:
        return GoldAnnotation.model_validate(json.loads(path.read_text(encoding="utf-8")))
    except json.JSONDecodeError as e:
        raise GoldParseError(path, f"line {e.lineno}: {e.msg}") from e
    except ValidationError as e:
        reasons = "; ".join(f"{'.'.join(str(part) for part in error['loc'])}: {error['msg']}" for error in e.errors())
        raise GoldParseError(path, reasons) from e
    except (OSError, UnicodeDecodeError) as e:
        raise GoldParseError(path, str(e)) from e


def load_gold_dir(gold_dir: Path | str | None = None) -> dict[str, GoldAnnotation]:
    """Every gold annotation of a directory, keyed by report id."""
    gold_path = Path(gold_dir) if gold_dir else settings.corpus.gold_dir
    if not gold_path.is_dir():
        logger.warning(f"Gold directory {gold_path} does not exist")
        return {}
    annotations = {}
    for path in sorted(gold_path.glob("*.gold.json")):
        gold = load_gold(path)
        annotations[gold.report_id] = gold
    logger.info(f"Loaded {len(annotations)} gold annotations from {gold_path}")
    return annotations


def compare(analysis: AnalysisReport, gold: GoldAnnotation) -> tuple[list[str], list[DeviceKind]]:
    """
    Compare an analysis with its gold annotation.

    Entity count and impact status must match exactly, clue kinds as a multiset and chosen readings
    in text order. Expected device kinds must all be found; devices the gold does not list are
    reported back without failing the report.

    Args:
        analysis: Analysis of the report
        gold: Expected outcome

    Returns:
        Mismatch descriptions and the extra device kinds
    """
    mismatches = []
    entity_count = len(analysis.entities)
    if entity_count != gold.expected_entity_count:
        mismatches.append(f"entities: expected {gold.expected_entity_count}, got {entity_count}")

    status = analysis.impact.status if analysis.impact else None
    if status != gold.expected_impact_status:
        mismatches.append(f"impact: expected {gold.expected_impact_status}, got {status}")

    clues = Counter(evidence.kind for evidence in analysis.impact.evidence) if analysis.impact else Counter()
    if clues != Counter(gold.expected_clue_kinds):
        mismatches.append(f"clues: expected {sorted(gold.expected_clue_kinds)}, got {sorted(clues.elements())}")

    found = Counter(device.kind for device in analysis.devices)
    missing = Counter(gold.expected_device_kinds) - found
    if missing:
        mismatches.append(f"missing devices: {sorted(missing.elements())}")
    extra = sorted((found - Counter(gold.expected_device_kinds)).elements())

    chosen = [site.chosen.label for site in analysis.ambiguity_sites]
    if chosen != gold.expected_chosen_readings:
        mismatches.append(f"readings: expected {gold.expected_chosen_readings}, got {chosen}")

    return mismatches, extra


class EvaluationService:
    """Service for running the analyzer over a corpus and checking it against gold annotations."""

    def __init__(self):
        """Initialize the evaluation service."""
        self.name = "evaluation_service"
        logger.info("Evaluation Service initialized")

    @staticmethod
    def _row(analysis: AnalysisReport, gold: GoldAnnotation | None) -> CorpusRow:
        summary = analysis.strategy_summary
        row = CorpusRow(
            report_id=analysis.report_id,
            entities=len(analysis.entities),
            impact=analysis.impact.status if analysis.impact else None,
            a_count=summary.a_count,
            b_count=summary.b_count,
            ambiguity=[site.chosen.label for site in analysis.ambiguity_sites],
            has_gold=gold is not None,
        )
        if gold is None:
            logger.warning(f"No gold annotation for report {analysis.report_id}")
            return row
        row.mismatches, row.extra_devices = compare(analysis, gold)
        for mismatch in row.mismatches:
            logger.warning(f"Report {analysis.report_id}: {mismatch}")
        if row.extra_devices:
            logger.info(f"Report {analysis.report_id}: devices beyond gold {[str(kind) for kind in row.extra_devices]}")
        return row

    async def run_corpus(
        self,
        corpus_dir: Path | str | None = None,
        gold_dir: Path | str | None = None,
        kb: KnowledgeBase | None = None,
    ) -> CorpusRun:
        """
        Analyze every report of a corpus concurrently and compare each one with its gold file.

        Args:
            corpus_dir: Directory of ``<ID>.<lang>.txt`` reports
            gold_dir: Directory of ``<ID>.gold.json`` files, defaults to the configured one
            kb: Knowledge base shared by every analysis

        Returns:
            One row per report, in report id order

        Raises:
            ReportLoadError: if a report cannot be read
            GoldParseError: if a gold file is malformed
        """
        kb = kb or knowledge_service.kb
        try:
            reports = load_corpus(corpus_dir)
            annotations = load_gold_dir(gold_dir)
            analyses = await asyncio.gather(*(analysis_orchestrator.aanalyze(report, kb) for report in reports))
        except Exception:
            logger.error(f"Error running corpus: {traceback.format_exc()}")
            raise

        run = CorpusRun(rows=[self._row(analysis, annotations.get(analysis.report_id)) for analysis in analyses])
        failed = sum(not row.passed for row in run.rows)
        logger.info(f"Corpus run completed: {len(run.rows)} reports, {failed} failing")
        return run

    @staticmethod
    def render_table(run: CorpusRun) -> str:
        """Plain text table of a corpus run, one line per report."""
        lines = [
            [
                row.report_id,
                str(row.entities),
                str(row.impact or "-"),
                str(row.a_count),
                str(row.b_count),
                ", ".join(row.ambiguity) or "-",
                ("PASS" if row.passed else "FAIL") if row.has_gold else "NO GOLD",
            ]
            for row in run.rows
        ]
        widths = [max(len(cells[i]) for cells in [list(TABLE_COLUMNS), *lines]) for i in range(len(TABLE_COLUMNS))]
        rendered = [
            "  ".join(cell.ljust(width) for cell, width in zip(cells, widths, strict=True)).rstrip()
            for cells in [list(TABLE_COLUMNS), *lines]
        ]
        rendered.insert(1, "  ".join("-" * width for width in widths))
        return "\n".join(rendered)


# Global evaluation service instance
evaluation_service = EvaluationService()
