"""Package initialization files."""

from .ambiguity_agent import ambiguity_agent
from .analysis_orchestrator import analysis_orchestrator
from .argumentation_agent import argumentation_agent
from .coref_agent import coref_agent
from .event_agent import event_agent
from .mention_agent import mention_agent

__all__ = [
    "ambiguity_agent",
    "analysis_orchestrator",
    "argumentation_agent",
    "coref_agent",
    "event_agent",
    "mention_agent",
]
