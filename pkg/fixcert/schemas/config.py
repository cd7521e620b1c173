from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field

from fixcert.core.expr import Expr


class _Block(BaseModel):
    model_config = ConfigDict(extra="forbid", arbitrary_types_allowed=True)


class SpaceBlock(_Block):
    """
    [space] block.

    finite:   points + metric (rows) + order pairs, or values (a chain on the line)
    indexed:  value expression in i, optional overrides, budget
    interval: lower / upper with endpoint flags, optional order predicate in x, y
    """

    flavor: Literal["finite", "indexed", "interval"]
    points: list[str] = Field(default_factory=list)
    values: list[float] = Field(default_factory=list)
    metric: list[list[float]] = Field(default_factory=list)
    order: list[tuple[str, str]] = Field(default_factory=list)
    close_order: bool = False
    value: Optional[Expr] = None
    overrides: dict[int, float] = Field(default_factory=dict)
    budget: Optional[int] = None
    label: str = "x"
    lower: Optional[float] = None
    upper: Optional[float] = None
    lower_closed: bool = True
    upper_closed: bool = True
    relation: Optional[Expr] = None
    asserted: list[str] = Field(default_factory=list)


class MappingsBlock(_Block):
    """Expressions for indexed / interval spaces, label tables for finite ones."""

    T: Optional[Expr] = None
    S: Optional[Expr] = None
    T_table: list[int] = Field(default_factory=list)
    S_table: list[int] = Field(default_factory=list)
    S_inverse: Optional[Expr] = None
    S_monotone: bool = False


class ContractionBlock(_Block):
    id: Optional[str] = None
    params: dict[str, float] = Field(default_factory=dict)
    F: Optional[Expr] = None
    phi: Optional[Expr] = None
    rho: Optional[Expr] = None
    claims: list[str] = Field(default_factory=list)


class RunBlock(_Block):
    variant: Optional[str] = None
    direction: str = "increasing"
    x0: Optional[str] = None
    budget: Optional[int] = None
    eps: Optional[float] = None
    E: Literal["X", "T(X)", "S(X)", "points"] = "X"
    E_points: list[str] = Field(default_factory=list)
    tol: Optional[float] = None


class ProblemConfig(_Block):
    space: SpaceBlock
    mappings: Optional[MappingsBlock] = None
    contraction: Optional[ContractionBlock] = None
    run: RunBlock = Field(default_factory=RunBlock)
