"""Exception hierarchy for the claim report analyzer."""

from pathlib import Path


class AnalyzerError(Exception):
    """Base class for every error raised by the analyzer."""


class KnowledgeParseError(AnalyzerError):
    """A knowledge base file line does not follow its format."""

    def __init__(self, path: Path | str, line: int, reason: str):
        self.path = Path(path)
        self.line = line
        self.reason = reason
        super().__init__(f"{self.path.name}:{line}: {reason}")


class HierarchyCycleError(AnalyzerError):
    """The subtype relation contains a cycle."""

    def __init__(self, cycle: list[str]):
        self.cycle = cycle
        super().__init__(f"Cycle in type hierarchy: {' -> '.join(cycle)}")


class UnknownConceptError(AnalyzerError):
    """A concept id is not declared in the type hierarchy."""

    def __init__(self, concept: str, context: str | None = None):
        self.concept = concept
        self.context = context
        message = f"Unknown concept '{concept}'"
        super().__init__(f"{message} ({context})" if context else message)


class CorefCapExceededError(AnalyzerError):
    """Too many mentions for the exact coreference search."""

    def __init__(self, size: int, cap: int):
        self.size = size
        self.cap = cap
        super().__init__(f"{size} mentions exceed the coreference cap of {cap}")


class OracleSizeError(AnalyzerError):
    """Too many mentions for the brute-force partition oracle."""

    def __init__(self, size: int, cap: int):
        self.size = size
        self.cap = cap
        super().__init__(f"Brute-force oracle accepts at most {cap} mentions, got {size}")


class ReportLoadError(AnalyzerError):
    """A report file cannot be read or decoded."""

    def __init__(self, path: Path | str, reason: str):
        self.path = Path(path)
        self.reason = reason
        super().__init__(f"Cannot load report {self.path}: {reason}")


class GoldParseError(AnalyzerError):
    """A gold annotation file is not valid."""

    def __init__(self, path: Path | str, reason: str):
        self.path = Path(path)
        self.reason = reason
        super().__init__(f"Invalid gold file {self.path.name}: {reason}")
