from __future__ import annotations

from typing import Any, Literal, Optional, Union

from pydantic import BaseModel, Field

PointValue = Union[int, float]

ConditionVerdict = Literal["pass-on-grid", "counterexample", "not-applicable"]
HypothesisVerdict = Literal["verified", "asserted", "counterexample", "not-checkable"]
OverallVerdict = Literal["verified", "counterexample", "not-checkable"]
VerdictKind = Literal[
    "CoincidenceHit",
    "CauchyDetected",
    "NoCoincidenceWithinBudget",
    "Diverged",
    "PreconditionFailed",
]


class Violation(BaseModel):
    axiom: str
    witness: list[PointValue]
    detail: str = ""


class ValidationReport(BaseModel):
    flavor: str
    exhaustive: bool
    violations: list[Violation] = Field(default_factory=list)

    @property
    def valid(self) -> bool:
        return not self.violations


class ConditionReport(BaseModel):
    condition: str
    verdict: ConditionVerdict
    witness: Optional[dict[str, Any]] = None
    grid: str = ""
    checked: int = 0
    skipped: int = 0
    reason: Optional[str] = None

    @property
    def passed(self) -> bool:
        return self.verdict == "pass-on-grid"


class TraceStep(BaseModel):
    n: int
    x: PointValue
    Sx: PointValue
    Tx: PointValue
    gap: Optional[float] = None  # d(Tx_n, Tx_{n+1}); None on the last step


class TraceVerdict(BaseModel):
    kind: VerdictKind
    n: Optional[int] = None
    candidate: Optional[PointValue] = None
    reason: str = ""


class IterationTrace(BaseModel):
    x0: PointValue
    direction: str
    budget: int
    steps: list[TraceStep] = Field(default_factory=list)
    verdict: TraceVerdict
    residual: Optional[float] = None

    def gaps(self) -> list[float]:
        return [step.gap for step in self.steps if step.gap is not None]


class CauchyCheck(BaseModel):
    eps: float
    threshold: float
    detected: bool
    index: Optional[int] = None
    containment_violations: list[int] = Field(default_factory=list)

    def __bool__(self) -> bool:
        return self.detected


class FixedPointResult(BaseModel):
    coincidence_point: PointValue
    point_of_coincidence: PointValue
    residual: float
    weakly_compatible_at_point: bool = False
    common_fixed_point: Optional[PointValue] = None
    common_fixed_point_residual: Optional[float] = None
    source: Literal["trace", "search"] = "trace"


class OracleResult(BaseModel):
    points_examined: int
    coincidence_points: list[PointValue] = Field(default_factory=list)
    common_fixed_points: list[PointValue] = Field(default_factory=list)
    points_of_coincidence: list[PointValue] = Field(default_factory=list)
    exhaustive: bool = True


class HypothesisEntry(BaseModel):
    name: str
    title: str
    verdict: HypothesisVerdict
    stage: str
    required: bool = True
    witness: Optional[dict[str, Any]] = None
    note: Optional[str] = None


class StageResult(BaseModel):
    name: str
    conclusion: str
    verdict: OverallVerdict


class ConclusionCheck(BaseModel):
    stage: str
    trace_verdict: Optional[str] = None
    solver_point: Optional[PointValue] = None
    common_fixed_point: Optional[PointValue] = None
    oracle: Optional[OracleResult] = None
    confirmed: bool = False
    discrepancies: list[str] = Field(default_factory=list)
    diagnostics: list[HypothesisEntry] = Field(default_factory=list)


class HypothesisReport(BaseModel):
    variant: str
    direction: str
    x0: Optional[PointValue] = None
    entries: list[HypothesisEntry] = Field(default_factory=list)
    stages: list[StageResult] = Field(default_factory=list)
    overall: OverallVerdict
    established: Optional[str] = None
    conclusion: Optional[ConclusionCheck] = None

    def entry(self, name: str) -> HypothesisEntry:
        for entry in self.entries:
            if entry.name == name:
                return entry
        raise KeyError(name)

    def stage(self, name: str) -> StageResult:
        for stage in self.stages:
            if stage.name == name:
                return stage
        raise KeyError(name)


class CatalogEntryView(BaseModel):
    id: str
    formula: str
    companion: Optional[str]
    params: dict[str, float]
    claims: list[str]
    denies: list[str]
    not_applicable: list[str]
    disputed: list[str]
    note: str = ""


class SolveResult(BaseModel):
    """T-S-sequence run with its Cauchy checks and the extracted point, if any."""

    trace: IterationTrace
    cauchy: list[CauchyCheck] = Field(default_factory=list)
    fixed_point: Optional[FixedPointResult] = None
    error: Optional[str] = None
