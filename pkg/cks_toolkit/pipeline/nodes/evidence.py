"""U-condition evidence node."""
from typing import Any, Dict

from cks_toolkit.core.exceptions import CksError
from cks_toolkit.core.logging import logger
from cks_toolkit.core.trace_helpers import trace_node
from cks_toolkit.models.growth import GridSpec, Status
from cks_toolkit.pipeline.state import ReportState
from cks_toolkit.services.growth import check_u_conditions

# U-conditions the sequence-level guarantees rest on
HYPOTHESES = ("U0", "U2", "U3")


@trace_node("collect_u_evidence")
def collect_u_evidence(state: ReportState) -> Dict[str, Any]:
    """Sample U0-U3 for growth-function subjects."""
    u = state.get("growth")
    if u is None:
        return {"u_evidence": None, "notes": ["sequence subject: U-conditions not applicable"]}

    try:
        grid = GridSpec()
        evidence = check_u_conditions(u, grid)
    except CksError as e:
        logger.error(f"U-evidence failed for {u.descriptor}: {e}", exc_info=True)
        return {
            "u_evidence": None,
            "notes": [f"U-evidence unavailable ({e.code}): {e.message}"],
            "metadata": {"hypotheses_met": False},
        }

    failed = [e.cls for e in evidence if e.cls in HYPOTHESES and e.status == Status.FAIL]
    notes = []
    if failed:
        notes.append(f"hypotheses unmet: {', '.join(failed)} FAIL; sequence-level conditions reported anyway")
    logger.info(f"U-evidence for {u.descriptor}: " + ", ".join(f"{e.cls}={e.status.value}" for e in evidence))
    return {"u_evidence": evidence, "grid": grid, "notes": notes, "metadata": {"hypotheses_met": not failed}}
