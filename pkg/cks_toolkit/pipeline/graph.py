"""Condition report LangGraph definition."""
from langgraph.graph import END, START, StateGraph

from cks_toolkit.core.logging import logger
from cks_toolkit.pipeline.nodes.alpha import build_alpha
from cks_toolkit.pipeline.nodes.conditions import check_conditions
from cks_toolkit.pipeline.nodes.evidence import collect_u_evidence
from cks_toolkit.pipeline.nodes.lattice import cross_check_lattice
from cks_toolkit.pipeline.state import ReportState


def create_report_graph() -> StateGraph:
    """
    Create and configure the condition report graph.

    Returns:
        Compiled graph
    """
    logger.debug("Creating report graph")

    workflow = StateGraph(ReportState)

    workflow.add_node("collect_u_evidence", collect_u_evidence)
    workflow.add_node("build_alpha", build_alpha)
    workflow.add_node("check_conditions", check_conditions)
    workflow.add_node("cross_check_lattice", cross_check_lattice)

    # U-evidence and the weight sequence are independent
    workflow.add_edge(START, "collect_u_evidence")
    workflow.add_edge(START, "build_alpha")

    workflow.add_edge("collect_u_evidence", "check_conditions")
    workflow.add_edge("build_alpha", "check_conditions")
    workflow.add_edge("check_conditions", "cross_check_lattice")
    workflow.add_edge("cross_check_lattice", END)

    return workflow.compile()


_report_graph = None


def get_report_graph() -> StateGraph:
    """
    Get the report graph instance (singleton).

    Returns:
        Compiled report graph
    """
    global _report_graph
    if _report_graph is None:
        _report_graph = create_report_graph()
    return _report_graph
