"""Implication cross-check node."""
from typing import Any, Dict

from cks_toolkit.core.logging import logger
from cks_toolkit.core.trace_helpers import trace_node
from cks_toolkit.pipeline.state import ReportState
from cks_toolkit.services.conditions import check_lattice


@trace_node("cross_check_lattice")
def cross_check_lattice(state: ReportState) -> Dict[str, Any]:
    broken = check_lattice(state.get("entries") or {})
    for item in broken:
        logger.warning(f"{state['subject']}: {item}")
    return {"inconsistencies": broken}
