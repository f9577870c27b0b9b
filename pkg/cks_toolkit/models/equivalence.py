"""Equivalence certificates and example reports."""
from enum import Enum
from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel

from cks_toolkit.models.growth import Status
from cks_toolkit.models.legendre import IdentityCheck
from cks_toolkit.models.sequences import SequenceEquivalence


class BoundSide(str, Enum):
    GENERALIZED = "GENERALIZED"
    TEST = "TEST"


class EquivalenceCertificate(BaseModel):
    """c1 u(a1 r) <= v(r) <= c2 u(a2 r) on the tested grid."""

    u: str
    v: str
    c1: float
    a1: float
    c2: float
    a2: float
    tested_range: Tuple[float, float]
    grid_size: int
    holds: bool
    worst_margin: float  # largest edge drift of the chosen margins
    skipped_dilations: List[float] = []
    note: Optional[str] = None


class Thm27Report(BaseModel):
    """Pairwise certificates between u*, L_{u*} and L#_u."""

    subject: str
    N: int
    status: Status
    certificates: Dict[str, EquivalenceCertificate] = {}
    note: Optional[str] = None


class ExamplesReport(BaseModel):
    which: str
    params: Dict[str, float]
    N: int
    checks: List[IdentityCheck]
    sequence_equivalence: Optional[SequenceEquivalence] = None
    certificate: Optional[EquivalenceCertificate] = None

    @property
    def passed(self) -> bool:
        return all(c.status in (Status.PASS, Status.SKIPPED) for c in self.checks)
