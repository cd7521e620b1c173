"""
Comparison functions and implicit contractions

Technical Explanation:
- ComparisonFn wraps an increasing phi: [0, inf) -> [0, inf) whose iterates
  tend to zero; every such phi satisfies phi(t) < t and phi(0) = 0
- HalfComparisonFn wraps rho such that t -> rho(2t) is a comparison function
- ImplicitContraction is a real function F(t1, ..., t6) together with the
  comparison function phi its F1 conditions conclude with, the conditions it
  is claimed to satisfy and its parameters
- The four conditions are characterised by one "characteristic tuple" each
  and one coordinate in which F must be non-increasing
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional

import numpy as np

from fixcert.core.config import settings
from fixcert.core.expr import Expr


@dataclass(frozen=True)
class ComparisonFn:
    label: str
    fn: Callable[[float], float] = field(compare=False)

    def __call__(self, t: float) -> float:
        return float(self.fn(t))

    @classmethod
    def linear(cls, k: float) -> "ComparisonFn":
        return cls(f"{k:g}*t", lambda t: k * t)

    @classmethod
    def from_expr(cls, expr: Expr) -> "ComparisonFn":
        return cls(expr.source, lambda t: expr.evaluate({"t": t}))


@dataclass(frozen=True)
class HalfComparisonFn:
    label: str
    fn: Callable[[float], float] = field(compare=False)

    def __call__(self, t: float) -> float:
        return float(self.fn(t))

    def doubled(self) -> ComparisonFn:
        """t -> rho(2t), the comparison function the F1 conditions use."""
        return ComparisonFn(f"({self.label})[t:=2t]", lambda t: self.fn(2.0 * t))

    @classmethod
    def linear(cls, k: float) -> "HalfComparisonFn":
        return cls(f"{k:g}*t", lambda t: k * t)

    @classmethod
    def from_expr(cls, expr: Expr) -> "HalfComparisonFn":
        return cls(expr.source, lambda t: expr.evaluate({"t": t}))


class Condition(str, Enum):
    F1A = "F1a"
    F1B = "F1b"
    F1C = "F1c"
    F2 = "F2"

    @classmethod
    def parse(cls, text: str) -> "Condition":
        for member in cls:
            if member.value.lower() == text.strip().lower():
                return member
        raise ValueError(f"unknown condition {text!r}; expected one of {[m.value for m in cls]}")


# zero-based coordinate in which F must be non-increasing
DECREASING_COORDINATE = {Condition.F1A: 4, Condition.F1B: 3, Condition.F1C: 2}


def characteristic_tuple(condition: Condition, u: float, v: float) -> tuple[float, ...]:
    if condition is Condition.F1A:
        return (u, v, v, u, u + v, 0.0)
    if condition is Condition.F1B:
        return (u, v, 0.0, u + v, u, v)
    if condition is Condition.F1C:
        return (u, v, u + v, 0.0, v, u)
    return (u, u, 0.0, 0.0, u, u)


SixArgFn = Callable[[float, float, float, float, float, float], float]


@dataclass(frozen=True)
class ImplicitContraction:
    """
    F with its claimed conditions.

    claims: conditions asserted to hold.
    denies: conditions asserted to fail.
    not_applicable: conditions F cannot even be evaluated for (zero denominators).
    disputed: claims that the grid certifier refutes with a witness.
    """

    id: str
    formula: str
    F: SixArgFn = field(compare=False)
    companion: Optional[ComparisonFn] = None
    claims: frozenset[Condition] = frozenset()
    denies: frozenset[Condition] = frozenset()
    not_applicable: frozenset[Condition] = frozenset()
    disputed: frozenset[Condition] = frozenset()
    params: tuple[tuple[str, float], ...] = ()
    rho: Optional[HalfComparisonFn] = None
    note: str = ""

    def __call__(self, *t: float) -> float:
        return float(self.F(*t))

    def param(self, name: str) -> Optional[float]:
        return dict(self.params).get(name)

    @classmethod
    def from_expr(
        cls,
        expr: Expr,
        *,
        functions: Optional[dict[str, Callable[[float], float]]] = None,
        companion: Optional[ComparisonFn] = None,
        claims: frozenset[Condition] = frozenset(),
        rho: Optional[HalfComparisonFn] = None,
        identifier: str = "custom",
    ) -> "ImplicitContraction":
        bound = dict(functions or {})

        def F(t1, t2, t3, t4, t5, t6):
            return expr.evaluate({"t1": t1, "t2": t2, "t3": t3, "t4": t4, "t5": t5, "t6": t6}, bound)

        return cls(id=identifier, formula=expr.source, F=F, companion=companion, claims=claims, rho=rho)


@dataclass(frozen=True)
class GridSpec:
    """Logarithmic grid over [lower, upper] plus the zero boundary."""

    points: int = field(default_factory=lambda: settings.GRID_POINTS)
    lower: float = field(default_factory=lambda: settings.GRID_MIN)
    upper: float = field(default_factory=lambda: settings.GRID_MAX)
    include_zero: bool = True

    def values(self) -> np.ndarray:
        grid = np.logspace(np.log10(self.lower), np.log10(self.upper), self.points)
        if self.include_zero:
            grid = np.concatenate(([0.0], grid))
        return grid

    def positive(self) -> np.ndarray:
        grid = self.values()
        return grid[grid > 0]

    def describe(self) -> str:
        zero = " + {0}" if self.include_zero else ""
        return f"log grid of {self.points} points over [{self.lower:g}, {self.upper:g}]{zero}"
