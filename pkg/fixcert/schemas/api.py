from __future__ import annotations

from typing import Optional

from pydantic import BaseModel, Field, model_validator

from fixcert.schemas.reports import CatalogEntryView, ConditionReport


class ConditionsRequest(BaseModel):
    contraction: Optional[str] = Field(default=None, description="catalog entry as ID or ID:name=value,...")
    config: Optional[str] = Field(default=None, description="problem config text with a [contraction] block")
    grid_points: Optional[int] = Field(default=None, ge=2)

    @model_validator(mode="after")
    def _one_source(self):
        if (self.contraction is None) == (self.config is None):
            raise ValueError("give exactly one of contraction or config")
        return self


class ConditionsResponse(BaseModel):
    contraction: CatalogEntryView
    conditions: list[ConditionReport]


class ProblemRequest(BaseModel):
    config: str = Field(min_length=1, description="problem config text")
    direction: Optional[str] = None
    budget: Optional[int] = Field(default=None, ge=0)
    x0: Optional[str] = None


class SolveRequest(ProblemRequest):
    eps: list[float] = Field(default_factory=list)


class OracleRequest(BaseModel):
    config: str = Field(min_length=1)
    limit: Optional[int] = Field(default=None, ge=0)


class CertifyRequest(ProblemRequest):
    variant: Optional[str] = None
    confirm: bool = True
