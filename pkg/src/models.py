"""
Result models shared by the search, the battery and the CLI.

Exact rationals are carried as ``"p/q"`` strings so JSON output stays exact.
"""

from datetime import datetime
from fractions import Fraction
from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, Field, field_validator, model_validator


def fraction_str(value: Any) -> Any:
    """Render Fractions (also inside lists and dicts) as "p/q" strings."""
    if isinstance(value, Fraction):
        return str(value) if value.denominator != 1 else str(value.numerator)
    if isinstance(value, dict):
        return {str(k) if isinstance(k, Fraction) else k: fraction_str(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [fraction_str(v) for v in value]
    return value


class SearchConfig(BaseModel):
    """Parameters of a minimum k-dense set search."""

    m: int = Field(ge=1)
    n: int = Field(ge=1)
    q: int = Field(ge=2)
    k: int = Field(ge=1)
    poly: Optional[List[int]] = None
    target: Literal["minimum", "decide"] = "minimum"
    decide_size: Optional[int] = None
    symmetry: bool = True
    node_budget: int = Field(default=50_000_000, gt=0)
    time_budget: float = Field(default=1800.0, gt=0)
    seed: Optional[int] = None
    threads: int = Field(default=1, ge=1)

    @model_validator(mode="after")
    def check_target(self) -> "SearchConfig":
        if self.k > min(self.m, self.n):
            raise ValueError(f"k={self.k} exceeds min(m, n)={min(self.m, self.n)}")
        if self.target == "decide" and (self.decide_size is None or self.decide_size < 1):
            raise ValueError("decide target requires decide_size >= 1")
        return self


class SearchResult(BaseModel):
    """Outcome of a search; ``proof`` is set only when the space was exhausted."""

    m: int
    n: int
    q: int
    k: int
    target: Literal["minimum", "decide"] = "minimum"
    minimum: Optional[int] = None
    lower_bound: int = 0
    decide_size: Optional[int] = None
    feasible: Optional[bool] = None
    witness: Optional[List[List[List[int]]]] = None
    witness_indices: Optional[List[int]] = None
    nodes: int = 0
    seconds: float = 0.0
    proof: bool = False
    symmetry: str = "none"


class CheckResult(BaseModel):
    """One acceptance check of the battery."""

    name: str
    anchor: str
    expected: Any
    actual: Any
    passed: bool
    seconds: float = 0.0
    detail: Dict[str, Any] = Field(default_factory=dict)

    @field_validator("expected", "actual", mode="before")
    @classmethod
    def exact_values(cls, value: Any) -> Any:
        return fraction_str(value)

    @field_validator("detail", mode="before")
    @classmethod
    def exact_detail(cls, value: Any) -> Any:
        return fraction_str(value)


class RunReport(BaseModel):
    """A battery run."""

    scope: Literal["all", "fast"]
    started_at: datetime = Field(default_factory=datetime.now)
    checks: List[CheckResult] = Field(default_factory=list)
    seconds: float = 0.0

    @property
    def passed(self) -> int:
        return sum(1 for c in self.checks if c.passed)

    @property
    def failed(self) -> int:
        return sum(1 for c in self.checks if not c.passed)

    @property
    def ok(self) -> bool:
        return self.failed == 0

    def totals(self) -> Dict[str, Any]:
        return {"checks": len(self.checks), "passed": self.passed, "failed": self.failed}
