"""Legendre tables and theorem-check reports."""
from typing import List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field

from cks_toolkit.models.growth import GridSpec, GrowthFunction, Status
from cks_toolkit.models.numerics import LogValue


class LegendreTable(BaseModel):
    """log l_u(n) for n = 0..N with the minimizing abscissas."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    source: GrowthFunction = Field(exclude=True)
    n_max: int
    log_ell: List[float]
    argmin: List[float]  # minimizing r per n
    certified_convex: bool = False

    @property
    def N(self) -> int:
        return self.n_max

    def ell(self, n: int) -> LogValue:
        return LogValue(logv=self.log_ell[n])


class IdentityCheck(BaseModel):
    """Outcome of one inequality or identity checked over a table."""

    name: str
    status: Status
    worst_margin: float = 0.0
    witness: Optional[Tuple[float, float]] = None
    note: Optional[str] = None


class IdentityReport(BaseModel):
    """Per-identity verdicts for one growth function."""

    subject: str
    N: int
    k: float
    checks: List[IdentityCheck]

    @property
    def passed(self) -> bool:
        return all(c.status in (Status.PASS, Status.SKIPPED) for c in self.checks)


class BoundsReport(BaseModel):
    """L-function upper bound and the reverse-bound constant estimate."""

    subject: str
    a: float
    k: float
    grid: GridSpec
    checks: List[IdentityCheck]
    constant_estimate: Optional[float] = None  # C with u(r) <= C L_u(2^k r) on the grid
