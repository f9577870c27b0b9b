"""Pydantic schemas for the CLI run configuration and the HTTP API."""
from typing import Dict, List, Literal, Optional

from pydantic import BaseModel, Field, model_validator


class FunctionSpec(BaseModel):
    """A catalog entry with its parameters, or a custom expression."""
    name: str = "ks"
    beta: Optional[float] = None
    k: Optional[float] = None
    a: Optional[float] = None
    expr: Optional[str] = None

    def params(self) -> Dict[str, float]:
        return {key: getattr(self, key) for key in ("beta", "k", "a") if getattr(self, key) is not None}


class RunConfig(BaseModel):
    """Merged --config file and command-line flags for one CLI run."""
    command: str
    function: Optional[str] = None
    expr: Optional[str] = None
    beta: Optional[float] = None
    k: Optional[float] = None
    a: Optional[float] = None
    N: Optional[int] = Field(default=None, ge=2)
    t: Optional[float] = Field(default=None, ge=0)
    r: Optional[float] = Field(default=None, ge=0)
    rmin: Optional[float] = None
    rmax: Optional[float] = Field(default=None, gt=0)
    points: int = Field(default=40, ge=3)
    tol: Optional[float] = Field(default=None, gt=0)
    format: Literal["json", "csv"] = "json"
    out: Optional[str] = None
    strict: bool = False
    certify: bool = False
    sequence: Optional[str] = None
    against: Literal["thm27", "L"] = "thm27"
    other_expr: Optional[str] = None
    family: Optional[Literal["KS", "BELL"]] = None

    @model_validator(mode="after")
    def _check_range(self) -> "RunConfig":
        if self.rmin is not None and self.rmax is not None and not self.rmin < self.rmax:
            raise ValueError(f"rmin must be below rmax, got [{self.rmin}, {self.rmax}]")
        return self

    def function_spec(self) -> FunctionSpec:
        name = self.function or ("custom" if self.expr else "ks")
        return FunctionSpec(name=name, beta=self.beta, k=self.k, a=self.a, expr=self.expr)


class CatalogEntry(BaseModel):
    name: str
    params: List[str]
    formula: str


class LegendreRequest(BaseModel):
    function: FunctionSpec
    t: float = Field(ge=0)


class LegendreResponse(BaseModel):
    subject: str
    t: float
    log_ell: float
    ell: float


class DualRequest(BaseModel):
    function: FunctionSpec
    r: float = Field(ge=0)


class DualResponse(BaseModel):
    subject: str
    r: float
    log_value: float


class AlphaRequest(BaseModel):
    function: FunctionSpec
    N: int = Field(default=20, ge=2, le=1000)


class AlphaResponse(BaseModel):
    subject: str
    N: int
    log_alpha: List[float]


class CheckRequest(BaseModel):
    """Either a growth function or explicit log alpha values."""
    function: Optional[FunctionSpec] = None
    sequence: Optional[List[float]] = None
    N: Optional[int] = Field(default=None, ge=10, le=1000)

    @model_validator(mode="after")
    def _one_subject(self) -> "CheckRequest":
        if (self.function is None) == (self.sequence is None):
            raise ValueError("give exactly one of 'function' and 'sequence'")
        return self


class EquivRequest(BaseModel):
    function: FunctionSpec
    other: FunctionSpec
    rmin: float = 0.0
    rmax: float = 10.0
    points: int = Field(default=40, ge=3, le=400)
