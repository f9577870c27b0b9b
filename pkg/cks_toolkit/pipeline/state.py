"""Report pipeline state definition for LangGraph."""
from typing import Annotated, Any, Dict, List, Optional, TypedDict

from cks_toolkit.models.conditions import Verdict
from cks_toolkit.models.growth import ClassEvidence, GridSpec, GrowthFunction
from cks_toolkit.models.sequences import AlphaSequence


def merge_notes(left: Optional[List[str]], right: Optional[List[str]]) -> List[str]:
    """
    Concatenate note lists written by parallel nodes.

    Args:
        left: Notes accumulated so far (or None)
        right: Notes returned by a node (or None)

    Returns:
        Combined list, left entries first
    """
    return list(left or []) + list(right or [])


def merge_metadata(left: Optional[Dict[str, Any]], right: Optional[Dict[str, Any]]) -> Dict[str, Any]:
    """Merge two metadata dictionaries; right wins on key clashes."""
    result = {}
    if left:
        result.update(left)
    if right:
        result.update(right)
    return result


class ReportState(TypedDict):
    """State schema for the condition report graph."""

    # Input
    subject: str  # descriptor of the growth function or sequence
    N: int
    growth: Optional[GrowthFunction]

    # Processing
    alpha: Optional[AlphaSequence]
    u_evidence: Optional[List[ClassEvidence]]
    grid: Optional[GridSpec]
    entries: Optional[Dict[str, Verdict]]

    # Output
    inconsistencies: Optional[List[str]]
    notes: Annotated[Optional[List[str]], merge_notes]
    metadata: Annotated[Optional[Dict[str, Any]], merge_metadata]  # run id, hypotheses flag
