"""Condition fan-out node."""
from typing import Any, Dict

from cks_toolkit.core.trace_helpers import trace_node
from cks_toolkit.models.conditions import CONDITION_NAMES
from cks_toolkit.pipeline.state import ReportState
from cks_toolkit.services.conditions import check_condition
from cks_toolkit.services.worker_pool import get_worker_pool


@trace_node("check_conditions")
def check_conditions(state: ReportState) -> Dict[str, Any]:
    """Run every condition on the worker pool and merge in the fixed order."""
    alpha = state["alpha"]
    verdicts = get_worker_pool().map_ordered(lambda name: check_condition(name, alpha), CONDITION_NAMES)
    entries = dict(zip(CONDITION_NAMES, verdicts))
    notes = [f"{name}: {v.note}" for name, v in entries.items() if v.note and v.status.value == "INCONCLUSIVE"]
    return {"entries": entries, "notes": notes}
