"""Condition verdicts and reports."""
from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel

from cks_toolkit.models.equivalence import EquivalenceCertificate
from cks_toolkit.models.growth import ClassEvidence, GridSpec, Status

CONDITION_NAMES = (
    "A1", "A2", "A2_tilde", "B1", "B1_tilde", "B2", "B2_near", "B2_tilde", "B3", "C1", "C2", "C3",
)

# premise -> conclusion
IMPLICATIONS = (
    ("A1", "A2_tilde"),
    ("B3", "B2_tilde"),
    ("B2_tilde", "B1_tilde"),
    ("B2", "B1"),
    ("B2_near", "B1"),
    ("C3", "C1"),
)


class Verdict(BaseModel):
    """Finite-prefix evidence for one condition.

    A FAIL carries the witness pair at which the defining inequality breaks.
    """

    status: Status
    witness: Optional[Tuple[int, int]] = None
    margin: float = 0.0
    constant: Optional[float] = None
    note: Optional[str] = None


class ConditionReport(BaseModel):
    subject: str
    provenance: str
    params: Dict[str, float] = {}
    N: int
    entries: Dict[str, Verdict]
    u_evidence: Optional[List[ClassEvidence]] = None
    grid: Optional[GridSpec] = None  # where u_evidence was sampled
    hypotheses_met: Optional[bool] = None  # U0, U2, U3 not FAIL
    inconsistencies: List[str] = []
    notes: List[str] = []
    certificates: List[EquivalenceCertificate] = []

    def status_of(self, name: str) -> Status:
        return self.entries[name].status
