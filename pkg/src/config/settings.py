"""Configuration management using Pydantic settings."""

from enum import StrEnum
from pathlib import Path

from dotenv import load_dotenv
from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict

PROJECT_ROOT = Path(__file__).resolve().parents[2]


class Language(StrEnum):
    en = "en"
    fr = "fr"


class ApplicationSettings(BaseSettings):
    model_config = SettingsConfigDict(env_prefix="APP_", env_file=".env", extra="ignore", case_sensitive=False)
    name: str = Field(
        default="Claim Report Analyzer",
        description="Application name",
    )
    version: str = Field(
        default="0.1.0",
        description="Application version",
    )
    debug: bool = Field(
        default=False,
        description="Enable debug mode",
    )


class LoggingSettings(BaseSettings):
    model_config = SettingsConfigDict(env_prefix="LOG_", env_file=".env", extra="ignore", case_sensitive=False)
    level: str = Field(
        default="INFO",
        description="Minimum level of records written to stderr",
    )
    json_output: bool = Field(
        default=False,
        description="Serialize log records as JSON lines",
    )


class KnowledgeSettings(BaseSettings):
    model_config = SettingsConfigDict(env_prefix="KB_", env_file=".env", extra="ignore", case_sensitive=False)
    kb_dir: Path = Field(
        default=PROJECT_ROOT / "data" / "kb",
        description="Directory holding the knowledge base files",
    )
    hierarchy_file: str = Field(
        default="hierarchy.tsv",
        description="Type hierarchy file name (isa / partof links)",
    )
    rules_file: str = Field(
        default="rules.tsv",
        description="Traffic rule registry file name",
    )
    lexicon_file: str = Field(
        default="lexicon.tsv",
        description="Lexicon file name",
    )
    ambiguous_file: str = Field(
        default="ambiguous.tsv",
        description="Ambiguous token table file name",
    )
    irregular_file: str = Field(
        default="irregular.tsv",
        description="Inflected form to lemma table file name",
    )
    contractions_file: str = Field(
        default="contractions.tsv",
        description="Contraction split table file name",
    )


class CorpusSettings(BaseSettings):
    model_config = SettingsConfigDict(env_prefix="CORPUS_", env_file=".env", extra="ignore", case_sensitive=False)
    corpus_dir: Path = Field(
        default=PROJECT_ROOT / "data" / "corpus",
        description="Directory of <ID>.<lang>.txt report files",
    )
    gold_dir: Path = Field(
        default=PROJECT_ROOT / "data" / "corpus",
        description="Directory of <ID>.gold.json annotation files",
    )
    default_language: Language = Field(
        default=Language.en,
        description="Language assumed when the file name carries no language suffix",
    )
    fragment_ids: list[str] = Field(
        default=["T1", "T3", "T4", "T9", "T10", "T11"],
        description="Report ids known to be excerpts of longer reports",
    )


class AnalyzerSettings(BaseSettings):
    model_config = SettingsConfigDict(env_prefix="ANALYZER_", env_file=".env", extra="ignore", case_sensitive=False)
    coref_cap: int = Field(
        default=64,
        description="Maximum number of mentions the exact coreference search accepts",
        ge=1,
    )
    oracle_cap: int = Field(
        default=10,
        description="Maximum number of mentions the brute-force partition oracle accepts",
        ge=0,
        le=12,
    )
    max_paragraphs: int = Field(
        default=1,
        description="Number of paragraphs above which a report is flagged as too long",
        ge=1,
    )
    max_body_chars: int = Field(
        default=1200,
        description="Body length in characters above which a report is flagged as too long",
        ge=1,
    )
    warnings_enabled: bool = Field(
        default=True,
        description="Emit analyzer warnings (participants, length, fragments)",
    )
    assume_accident: bool = Field(
        default=True,
        description="Every report narrates an accident; off, a text without clues gets an absent impact",
    )


class Settings(BaseSettings):
    """Application settings with default values."""

    model_config = SettingsConfigDict(env_file=".env", extra="ignore", case_sensitive=False)
    app: ApplicationSettings = Field(default_factory=ApplicationSettings)
    log: LoggingSettings = Field(default_factory=LoggingSettings)
    knowledge: KnowledgeSettings = Field(default_factory=KnowledgeSettings)
    corpus: CorpusSettings = Field(default_factory=CorpusSettings)
    analyzer: AnalyzerSettings = Field(default_factory=AnalyzerSettings)


load_dotenv()
settings = Settings()
