#!/usr/bin/env python3

import argparse
import asyncio
import sys
import traceback
from collections.abc import Sequence

from loguru import logger

from src.config.log_setup import configure_logging
from src.config.settings import settings
from src.models.errors import AnalyzerError

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_INPUT_ERROR = 2


def build_parser() -> argparse.ArgumentParser:
    """Command line parser with the analyze, corpus and kb commands."""
    parser = argparse.ArgumentParser(prog="claim-report-analyzer", description=settings.app.name)
    parser.add_argument("--log-level", default=None, help="Log level, overrides LOG_LEVEL")
    commands = parser.add_subparsers(dest="command", required=True)

    analyze = commands.add_parser("analyze", help="Analyze one report file")
    analyze.add_argument("file", help="Report file named <ID>.<lang>.txt")
    analyze.add_argument("--kb", default=None, help="Knowledge base directory")
    output = analyze.add_mutually_exclusive_group()
    output.add_argument("--json", action="store_true", help="Compact JSON (default)")
    output.add_argument("--pretty", action="store_true", help="Indented JSON")

    corpus = commands.add_parser("corpus", help="Analyze a corpus and compare it with gold annotations")
    corpus.add_argument("dir", help="Corpus directory")
    corpus.add_argument("--gold", default=None, help="Gold directory, defaults to the corpus directory")
    corpus.add_argument("--kb", default=None, help="Knowledge base directory")

    kb = commands.add_parser("kb", help="Knowledge base commands")
    kb_commands = kb.add_subparsers(dest="kb_command", required=True)
    check = kb_commands.add_parser("check", help="Load a knowledge directory and list its content")
    check.add_argument("dir", help="Knowledge base directory")

    return parser


def run_analyze(args: argparse.Namespace) -> int:
    from src.agents.analysis_orchestrator import analysis_orchestrator, render_json
    from src.services.corpus_service import load_report
    from src.services.knowledge_service import knowledge_service

    kb = knowledge_service.reload(args.kb) if args.kb else knowledge_service.kb
    analysis = analysis_orchestrator.analyze(load_report(args.file), kb)
    sys.stdout.write(render_json(analysis, pretty=args.pretty) + "\n")
    return EXIT_OK


def run_corpus(args: argparse.Namespace) -> int:
    from src.services.evaluation_service import evaluation_service
    from src.services.knowledge_service import knowledge_service

    kb = knowledge_service.reload(args.kb) if args.kb else knowledge_service.kb
    run = asyncio.run(evaluation_service.run_corpus(args.dir, args.gold or args.dir, kb))
    sys.stdout.write(evaluation_service.render_table(run) + "\n")
    return EXIT_MISMATCH if run.exit_status else EXIT_OK


def run_kb_check(args: argparse.Namespace) -> int:
    from src.services.knowledge_service import check_knowledge

    findings = check_knowledge(args.dir)
    sys.stdout.write("\n".join(findings) + "\n")
    return EXIT_INPUT_ERROR if any(finding.startswith("missing") for finding in findings) else EXIT_OK


COMMANDS = {"analyze": run_analyze, "corpus": run_corpus, "kb": run_kb_check}


def main(argv: Sequence[str] | None = None) -> None:
    """Main application entry point."""
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level)
    try:
        logger.info(f"Starting {settings.app.name} v{settings.app.version}")
        sys.exit(COMMANDS[args.command](args))

    except KeyboardInterrupt:
        logger.info("Application interrupted by user")
    except (AnalyzerError, OSError) as e:
        logger.error(f"Error running {args.command}: {e}")
        sys.exit(EXIT_INPUT_ERROR)
    except Exception:
        logger.error(f"Error running {args.command}: {traceback.format_exc()}")
        sys.exit(EXIT_INPUT_ERROR)


if __name__ == "__main__":
    main()
