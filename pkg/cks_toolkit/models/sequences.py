"""Weight sequences and sequence equivalence."""
import math
from enum import Enum
from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy.special import gammaln

from cks_toolkit.models.growth import GrowthFunction
from cks_toolkit.models.numerics import LogValue


class ProvenanceKind(str, Enum):
    GROWTH = "growth"
    BELL = "bell"
    USER = "user"


class Which(str, Enum):
    """Generating function selector: G_alpha or G_{1/alpha}."""
    ALPHA = "ALPHA"
    INV_ALPHA = "INV_ALPHA"


class Shape(str, Enum):
    LOG_CONCAVE = "LOG_CONCAVE"
    LOG_CONVEX = "LOG_CONVEX"


class Provenance(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: ProvenanceKind
    descriptor: str


class AlphaSequence(BaseModel):
    """
    log alpha(n) for n = 0..N.

    ``source`` is the growth function for sequences built from one, ``exact``
    the integer values when they are known exactly (order-2 Bell numbers).
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    n_max: int
    log_alpha: List[float]
    provenance: Provenance
    exact: Optional[List[int]] = None
    precision_loss: bool = False
    error_estimate: float = 0.0
    source: Optional[GrowthFunction] = Field(default=None, exclude=True)

    @model_validator(mode="after")
    def _check_entries(self) -> "AlphaSequence":
        if len(self.log_alpha) != self.n_max + 1:
            raise ValueError(f"expected {self.n_max + 1} entries, got {len(self.log_alpha)}")
        bad = [n for n, v in enumerate(self.log_alpha) if not math.isfinite(v)]
        if bad:
            raise ValueError(f"log alpha must be finite, first bad index {bad[0]}")
        return self

    @property
    def N(self) -> int:
        return self.n_max

    @property
    def subject(self) -> str:
        return self.provenance.descriptor

    def alpha(self, n: int) -> LogValue:
        return LogValue(logv=self.log_alpha[n])

    def as_array(self) -> np.ndarray:
        return np.asarray(self.log_alpha, dtype=float)

    @property
    def log_gamma(self) -> np.ndarray:
        """log gamma(n) = log alpha(n) - log n!."""
        n = np.arange(self.n_max + 1, dtype=float)
        return self.as_array() - gammaln(n + 1.0)


class SequenceEquivalence(BaseModel):
    """Constants with K1 c1^n a(n) <= b(n) <= K2 c2^n a(n) on the tested prefix."""

    K1: float
    c1: float
    K2: float
    c2: float
    tested_N: int
    holds: bool
    spread: float  # width of the per-n exponent over the inspected window
    window: Tuple[int, int]


class StirlingReport(BaseModel):
    """Worst margins of n log n - n <= log n! <= 1 + (n/2) log 2 + n (log n - 1)."""

    n_max: int
    lower_margin: float
    upper_margin: float
    holds: bool
