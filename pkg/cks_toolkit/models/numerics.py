"""Log-domain value carriers shared by every numeric module."""
import math
from enum import Enum
from typing import Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator

NEG_INF = float("-inf")


class Mode(str, Enum):
    """Direction of a scalar optimization."""
    MIN = "MIN"
    MAX = "MAX"


class LogValue(BaseModel):
    """A nonnegative real stored as its natural logarithm.

    ``logv == -inf`` is the exact zero state.
    """

    model_config = ConfigDict(frozen=True)

    logv: float

    @field_validator("logv")
    @classmethod
    def _check_logv(cls, v: float) -> float:
        if math.isnan(v) or v == math.inf:
            raise ValueError(f"log value must be finite or -inf, got {v}")
        return float(v)

    @classmethod
    def from_real(cls, x: float) -> "LogValue":
        if x < 0 or math.isnan(x):
            raise ValueError(f"LogValue represents nonnegative reals only, got {x}")
        if x == 0:
            return cls(logv=NEG_INF)
        return cls(logv=math.log(x))

    @classmethod
    def zero(cls) -> "LogValue":
        return cls(logv=NEG_INF)

    @classmethod
    def one(cls) -> "LogValue":
        return cls(logv=0.0)

    @property
    def is_zero(self) -> bool:
        return self.logv == NEG_INF

    def to_real(self) -> float:
        """Plain value; ``inf`` when it does not fit in a double."""
        if self.logv > 709.782712893384:
            return math.inf
        return math.exp(self.logv)

    def __add__(self, other: "LogValue") -> "LogValue":
        return LogValue(logv=float(np.logaddexp(self.logv, other.logv)))

    def __mul__(self, other: "LogValue") -> "LogValue":
        if self.is_zero or other.is_zero:
            return LogValue.zero()
        return LogValue(logv=self.logv + other.logv)

    def __truediv__(self, other: "LogValue") -> "LogValue":
        if other.is_zero:
            raise ZeroDivisionError("division by a zero LogValue")
        if self.is_zero:
            return LogValue.zero()
        return LogValue(logv=self.logv - other.logv)

    def __lt__(self, other: "LogValue") -> bool:
        return self.logv < other.logv

    def __le__(self, other: "LogValue") -> bool:
        return self.logv <= other.logv

    def __gt__(self, other: "LogValue") -> bool:
        return self.logv > other.logv

    def __ge__(self, other: "LogValue") -> bool:
        return self.logv >= other.logv


class SeriesResult(BaseModel):
    """Partial sum of a positive series with a geometric tail bound."""

    model_config = ConfigDict(frozen=True)

    sum: LogValue
    terms_used: int
    tail_bound: LogValue
    converged: bool

    @property
    def log_sum(self) -> float:
        return self.sum.logv

    @property
    def value(self) -> float:
        return self.sum.to_real()


class OptimResult(BaseModel):
    """Outcome of a bracketed golden-section search."""

    model_config = ConfigDict(frozen=True)

    arg_opt: float
    value_opt: float  # objective value, in the objective's own scale
    bracket: Tuple[float, float]
    iterations: int
