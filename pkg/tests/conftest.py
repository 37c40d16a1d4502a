"""Shared fixtures for the analyzer tests."""

from pathlib import Path

import pytest

from src.agents.analysis_orchestrator import analysis_orchestrator
from src.config.settings import PROJECT_ROOT
from src.models.schemas import AnalysisReport, Report
from src.services.corpus_service import load_report
from src.services.knowledge_service import KnowledgeBase, load_knowledge_dir

KB_DIR = PROJECT_ROOT / "data" / "kb"
CORPUS_DIR = PROJECT_ROOT / "data" / "corpus"
CORPUS_FR_DIR = PROJECT_ROOT / "data" / "corpus_fr"


@pytest.fixture(scope="session")
def kb() -> KnowledgeBase:
    return load_knowledge_dir(KB_DIR)


@pytest.fixture(scope="session")
def corpus_dir() -> Path:
    return CORPUS_DIR


@pytest.fixture(scope="session")
def load_text():
    """Load a shipped report by id."""

    def load(report_id: str, language: str = "en") -> Report:
        directory = CORPUS_FR_DIR if language == "fr" else CORPUS_DIR
        return load_report(directory / f"{report_id}.{language}.txt")

    return load


@pytest.fixture(scope="session")
def analyze(kb, load_text):
    """Analyze a shipped report by id, caching the result for the session."""
    cache: dict[tuple[str, str], AnalysisReport] = {}

    def run(report_id: str, language: str = "en") -> AnalysisReport:
        key = (report_id, language)
        if key not in cache:
            cache[key] = analysis_orchestrator.analyze(load_text(report_id, language), kb)
        return cache[key]

    return run
