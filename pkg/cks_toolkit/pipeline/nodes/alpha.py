"""Weight sequence node."""
from typing import Any, Dict

from cks_toolkit.core.logging import logger
from cks_toolkit.core.trace_helpers import trace_node
from cks_toolkit.pipeline.state import ReportState
from cks_toolkit.services.sequences import alpha_from_growth


@trace_node("build_alpha")
def build_alpha(state: ReportState) -> Dict[str, Any]:
    """alpha(n) = 1/(l_u(n) n!) for growth subjects; sequence subjects pass through."""
    if state.get("alpha") is not None:
        return {"notes": []}
    u = state["growth"]
    alpha = alpha_from_growth(u, state["N"])
    logger.info(f"Weight sequence for {u.descriptor} built up to N={state['N']}")
    return {"alpha": alpha, "notes": []}
