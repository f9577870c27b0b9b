"""Growth function representation and class evidence."""
import math
from enum import Enum
from typing import Any, Callable, Dict, FrozenSet, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from cks_toolkit.core.exceptions import EvalFailure, OverflowDomain


class Status(str, Enum):
    """Finite-prefix evidence status."""
    PASS = "PASS"
    FAIL = "FAIL"
    INCONCLUSIVE = "INCONCLUSIVE"
    SKIPPED = "SKIPPED"


class GridSpec(BaseModel):
    """Geometric sample grid on (0, inf), optionally with r = 0 prepended."""

    model_config = ConfigDict(frozen=True)

    r_min: float = 2.0 ** -20
    r_max: float = 2.0 ** 40
    points: int = 61
    include_zero: bool = False

    @model_validator(mode="after")
    def _check_range(self) -> "GridSpec":
        if not (self.r_min > 0 and self.r_min < self.r_max):
            raise ValueError(f"grid needs 0 < r_min < r_max, got [{self.r_min}, {self.r_max}]")
        if self.points < 2:
            raise ValueError("grid needs at least 2 points")
        return self

    def values(self) -> np.ndarray:
        r = np.geomspace(self.r_min, self.r_max, self.points)
        if self.include_zero:
            r = np.concatenate(([0.0], r))
        return r


class GrowthFunction(BaseModel):
    """A positive continuous function u on [0, inf), known through log u.

    ``log_eval`` must accept a float; when ``vectorized`` is set it must also
    accept a numpy array elementwise.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    name: str
    params: Dict[str, float] = Field(default_factory=dict)
    log_eval: Callable[[Any], Any] = Field(exclude=True, repr=False)
    claimed_classes: FrozenSet[str] = frozenset()
    increasing: bool = False  # analytically nondecreasing on [0, inf)
    domain_max: float = math.inf  # largest r with a representable log u
    vectorized: bool = True
    dual_log_eval: Optional[Callable[[Any], Any]] = Field(default=None, exclude=True, repr=False)
    expression: Optional[str] = None

    @property
    def descriptor(self) -> str:
        if self.expression is not None:
            return f"{self.name}({self.expression})"
        if not self.params:
            return self.name
        inner = ",".join(f"{k}={v:g}" for k, v in sorted(self.params.items()))
        return f"{self.name}({inner})"

    @property
    def log_domain_max(self) -> float:
        """log of ``domain_max``; +inf for unrestricted functions."""
        return math.log(self.domain_max) if math.isfinite(self.domain_max) else math.inf

    def log_u(self, r: float) -> float:
        """log u(r) for a single r >= 0."""
        if r < 0 or math.isnan(r):
            raise ValueError(f"growth functions live on [0, inf), got r={r}")
        if r > self.domain_max:
            raise OverflowDomain(f"{self.descriptor} is not representable at r={r:.6g}")
        value = float(self.log_eval(float(r)))
        if math.isnan(value) or value == math.inf:
            raise EvalFailure(f"{self.descriptor} evaluated to {value} at r={r:.6g}")
        return value

    def log_u_many(self, r) -> np.ndarray:
        """log u over an array of abscissas."""
        r = np.asarray(r, dtype=float)
        if np.any(r > self.domain_max):
            raise OverflowDomain(f"{self.descriptor} is not representable up to r={float(r.max()):.6g}")
        if self.vectorized:
            values = np.asarray(self.log_eval(r), dtype=float)
            if values.shape != r.shape:
                values = np.broadcast_to(values, r.shape).astype(float)
        else:
            values = np.array([float(self.log_eval(float(x))) for x in r.ravel()]).reshape(r.shape)
        if np.any(np.isnan(values)) or np.any(values == math.inf):
            bad = float(r[np.isnan(values) | (values == math.inf)].ravel()[0])
            raise EvalFailure(f"{self.descriptor} is not finite at r={bad:.6g}")
        return values


class ClassEvidence(BaseModel):
    """Sampled evidence for one class membership or U-condition."""

    cls: str
    status: Status
    witness: Optional[Tuple[float, float, float]] = None
    margin: float = 0.0
    grid: Optional[GridSpec] = None
    note: Optional[str] = None
