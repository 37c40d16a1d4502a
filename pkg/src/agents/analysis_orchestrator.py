"""Analysis Orchestrator for running the claim report pipeline as a LangGraph workflow."""

import traceback
from typing import TypedDict

from langgraph.graph import END, StateGraph
from langgraph.graph.state import CompiledStateGraph
from loguru import logger

from ..config.settings import settings
from ..models.schemas import (
    AmbiguitySite,
    AnalysisReport,
    ArgDevice,
    Clause,
    CoercionRecord,
    Event,
    ImpactFinding,
    ImpactStatus,
    Mention,
    Partition,
    Report,
    SignificantModifier,
    StrategySummary,
    WarningKind,
)
from ..services.corpus_service import segment
from ..services.knowledge_service import KnowledgeBase, knowledge_service
from .ambiguity_agent import AmbiguityState, ambiguity_agent
from .argumentation_agent import ArgumentationState, argumentation_agent
from .coref_agent import CorefState, coref_agent
from .event_agent import EventState, event_agent
from .mention_agent import MentionState, mention_agent


class AnalysisState(TypedDict):
    """State for the claim report analysis pipeline."""

    # Input
    report: Report
    kb: KnowledgeBase

    # Segmentation
    clauses: list[Clause]

    # Mentions and coreference
    mentions: list[Mention]
    coercions: list[CoercionRecord]
    partition: Partition

    # Events and impact
    events: list[Event]
    impact: ImpactFinding | None

    # Argumentation
    devices: list[ArgDevice]
    strategy_summary: StrategySummary | None
    significant_modifiers: list[SignificantModifier]
    ambiguity_sites: list[AmbiguitySite]

    # Output
    warnings: list[WarningKind]
    analysis: AnalysisReport | None
    error: str | None


def detect_warnings(report: Report, impact: ImpactFinding | None) -> list[WarningKind]:
    """
    Analyzer warnings for a non-empty report.

    Args:
        report: Analyzed report
        impact: Impact finding

    Returns:
        Warnings in a fixed order
    """
    body = report.body
    warnings = []
    if impact is None or impact.participants is None:
        warnings.append(WarningKind.missing_second_participant)
    fragment = report.fragment
    if fragment is None:
        # An excerpt starts mid-sentence
        fragment = next((char for char in body if char.isalpha()), "").islower()
    if fragment:
        warnings.append(WarningKind.fragment)
    paragraphs = [block for block in body.split("\n\n") if block.strip()]
    if len(paragraphs) > settings.analyzer.max_paragraphs or len(body) > settings.analyzer.max_body_chars:
        warnings.append(WarningKind.text_too_long)
    if impact is not None and impact.status != ImpactStatus.explicit:
        warnings.append(WarningKind.no_accident_lexeme)
    return warnings


class AnalysisOrchestrator:
    """Orchestrator for coordinating the mention, coreference, event, argumentation and ambiguity agents."""

    def __init__(self):
        """Initialize the analysis orchestrator."""
        self.name = "analysis_orchestrator"

        # Initialize agents
        self.agents = {
            "mentions": mention_agent,
            "coref": coref_agent,
            "events": event_agent,
            "argumentation": argumentation_agent,
            "ambiguity": ambiguity_agent,
        }

        # Build the graph
        self.graph = self._build_graph()

        logger.info("Analysis Orchestrator initialized")

    @staticmethod
    def _initial_state(report: Report, kb: KnowledgeBase | None) -> AnalysisState:
        return {
            "report": report,
            "kb": kb or knowledge_service.kb,
            "clauses": [],
            "mentions": [],
            "coercions": [],
            "partition": Partition(),
            "events": [],
            "impact": None,
            "devices": [],
            "strategy_summary": None,
            "significant_modifiers": [],
            "ambiguity_sites": [],
            "warnings": [],
            "analysis": None,
            "error": None,
        }

    def analyze(self, report: Report, kb: KnowledgeBase | None = None) -> AnalysisReport:
        """
        Analyze one report.

        Args:
            report: Report to analyze
            kb: Knowledge base, defaults to the shared one

        Returns:
            Analysis report

        Raises:
            CorefCapExceededError: if the report has more mentions than the coreference cap
        """
        logger.info(f"Starting analysis of report {report.id}")
        final_state = self.graph.invoke(self._initial_state(report, kb))
        return final_state["analysis"]

    async def aanalyze(self, report: Report, kb: KnowledgeBase | None = None) -> AnalysisReport:
        """Analyze one report from async code; the knowledge base is shared read-only."""
        logger.info(f"Starting analysis of report {report.id}")
        final_state = await self.graph.ainvoke(self._initial_state(report, kb))
        return final_state["analysis"]

    def _build_graph(self) -> CompiledStateGraph:
        """Build the LangGraph workflow for the analysis pipeline."""
        builder = StateGraph(AnalysisState)

        # Add nodes for each stage
        builder.add_node("segment", self._segment_node)
        builder.add_node("mentions", self._mentions_node)
        builder.add_node("coref", self._coref_node)
        builder.add_node("events", self._events_node)
        builder.add_node("impact", self._impact_node)
        builder.add_node("devices", self._devices_node)
        builder.add_node("ambiguity", self._ambiguity_node)
        builder.add_node("summary", self._summary_node)

        # Add edges
        builder.set_entry_point("segment")

        # An empty body has nothing to analyze
        builder.add_conditional_edges(
            "segment",
            self._should_continue_after_segment,
            {"continue": "mentions", "skip_to_summary": "summary"},
        )
        builder.add_edge("mentions", "coref")
        builder.add_edge("coref", "events")
        builder.add_edge("events", "impact")
        builder.add_edge("impact", "devices")
        builder.add_edge("devices", "ambiguity")
        builder.add_edge("ambiguity", "summary")
        builder.add_edge("summary", END)

        return builder.compile()

    @staticmethod
    def _should_continue_after_segment(state: AnalysisState) -> str:
        """Determine whether to analyze the clauses or go straight to the summary."""
        if not state["clauses"]:
            logger.warning(f"Report {state['report'].id} has an empty body")
            return "skip_to_summary"
        return "continue"

    def _segment_node(self, state: AnalysisState) -> AnalysisState:
        """Segmentation node."""
        try:
            logger.info("Executing segment node")
            state["clauses"] = segment(state["report"], state["kb"])
            return state

        except Exception as e:
            logger.error(f"Error in segment node: {traceback.format_exc()}")
            state["error"] = str(e)
            raise

    def _mentions_node(self, state: AnalysisState) -> AnalysisState:
        """Mention extraction node."""
        logger.info("Executing mentions node")

        mention_state: MentionState = {
            "clauses": state["clauses"],
            "language": state["report"].language,
            "mentions": [],
            "coercions": [],
            "error": None,
        }

        result_state = self.agents["mentions"].process_state(mention_state, state["kb"])

        state["mentions"] = result_state["mentions"]
        state["coercions"] = result_state["coercions"]
        return state

    def _coref_node(self, state: AnalysisState) -> AnalysisState:
        """Coreference node."""
        logger.info("Executing coref node")

        coref_state: CorefState = {
            "mentions": state["mentions"],
            "coercions": state["coercions"],
            "partition": None,
            "error": None,
        }

        result_state = self.agents["coref"].process_state(coref_state, state["kb"])

        state["partition"] = result_state["partition"]
        return state

    def _events_node(self, state: AnalysisState) -> AnalysisState:
        """Event extraction node."""
        logger.info("Executing events node")

        event_state: EventState = {
            "clauses": state["clauses"],
            "language": state["report"].language,
            "partition": state["partition"],
            "events": [],
            "error": None,
        }

        result_state = self.agents["events"].process_state(event_state, state["kb"])

        state["events"] = result_state["events"]
        return state

    def _impact_node(self, state: AnalysisState) -> AnalysisState:
        """Impact detection node."""
        logger.info("Executing impact node")
        state["impact"] = self.agents["events"].assess_impact(state["events"], state["partition"], state["kb"])
        return state

    def _devices_node(self, state: AnalysisState) -> AnalysisState:
        """Argumentative device node."""
        logger.info("Executing devices node")

        argumentation_state: ArgumentationState = {
            "clauses": state["clauses"],
            "language": state["report"].language,
            "partition": state["partition"],
            "events": state["events"],
            "devices": [],
            "strategy_summary": None,
            "significant_modifiers": [],
            "error": None,
        }

        result_state = self.agents["argumentation"].process_state(argumentation_state, state["kb"])

        state["devices"] = result_state["devices"]
        state["strategy_summary"] = result_state["strategy_summary"]
        state["significant_modifiers"] = result_state["significant_modifiers"]
        return state

    def _ambiguity_node(self, state: AnalysisState) -> AnalysisState:
        """Ambiguity node."""
        logger.info("Executing ambiguity node")

        ambiguity_state: AmbiguityState = {
            "clauses": state["clauses"],
            "language": state["report"].language,
            "partition": state["partition"],
            "events": state["events"],
            "impact": state["impact"],
            "ambiguity_sites": [],
            "error": None,
        }

        result_state = self.agents["ambiguity"].process_state(ambiguity_state, state["kb"])

        state["ambiguity_sites"] = result_state["ambiguity_sites"]
        return state

    def _summary_node(self, state: AnalysisState) -> AnalysisState:
        """Report assembly node."""
        logger.info("Executing summary node")

        report = state["report"]
        if not state["clauses"]:
            state["warnings"] = [WarningKind.empty_body]
        elif settings.analyzer.warnings_enabled:
            state["warnings"] = detect_warnings(report, state["impact"])
        for warning in state["warnings"]:
            logger.warning(f"Report {report.id}: {warning}")

        state["analysis"] = AnalysisReport(
            report_id=report.id,
            entities=state["partition"].entities,
            events=state["events"],
            impact=state["impact"],
            devices=state["devices"],
            ambiguity_sites=state["ambiguity_sites"],
            warnings=state["warnings"],
            strategy_summary=state["strategy_summary"] or StrategySummary(),
            significant_modifiers=state["significant_modifiers"],
        )
        logger.info(
            f"Analysis of {report.id} completed: {len(state['partition'].entities)} entities, "
            f"{len(state['devices'])} devices, {len(state['ambiguity_sites'])} ambiguity sites"
        )
        return state


def render_json(analysis: AnalysisReport, pretty: bool = False) -> str:
    """
    Serialize an analysis with a stable key order.

    Spans are character offsets into the report body; token ranges are kept next to them.
    """
    return analysis.model_dump_json(indent=2 if pretty else None)


# Global analysis orchestrator instance
analysis_orchestrator = AnalysisOrchestrator()
