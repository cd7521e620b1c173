from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from fixcert.core.exceptions import BudgetExceededException, DomainErrorException, InvalidPointException
from fixcert.core.expr import Expr
from fixcert.models.spaces import OrderedMetricSpace, Point


@dataclass(frozen=True)
class MappingPair:
    """
    The pair (T, S) of self-maps.

    T and S are plain callables on point handles: table lookups for finite
    spaces, index maps for indexed spaces, compiled expressions in x for
    interval spaces. S_inverse (numeric only) selects an S-preimage
    explicitly; S_monotone allows bisection instead. T_continuous / S_continuous record
    structural continuity of expression maps.
    """

    T: Callable[[Point], Point]
    S: Callable[[Point], Point]
    T_label: str = "T"
    S_label: str = "S"
    S_inverse: Optional[Callable[[float], float]] = None
    S_monotone: bool = False
    S_identity: bool = False
    T_identity: bool = False
    T_continuous: bool = False
    S_continuous: bool = False
    tables: Optional[tuple[tuple[int, ...], tuple[int, ...]]] = field(default=None, compare=False)

    @classmethod
    def from_tables(cls, t_table: Sequence[int], s_table: Sequence[int]) -> "MappingPair":
        t, s = tuple(int(v) for v in t_table), tuple(int(v) for v in s_table)
        if len(t) != len(s):
            raise InvalidPointException("T and S tables must have the same length")

        def lookup(table: tuple[int, ...], name: str) -> Callable[[Point], Point]:
            def apply(x: Point) -> Point:
                try:
                    return table[x]
                except (IndexError, TypeError):
                    raise InvalidPointException(f"{name} is not defined at {x!r}")

            return apply

        return cls(
            T=lookup(t, "T"),
            S=lookup(s, "S"),
            T_label=" ".join(map(str, t)),
            S_label=" ".join(map(str, s)),
            S_identity=s == tuple(range(len(s))),
            T_identity=t == tuple(range(len(t))),
            tables=(t, s),
        )

    @classmethod
    def from_index_expressions(cls, t_expr: Expr, s_expr: Expr) -> "MappingPair":
        def as_index(expr: Expr) -> Callable[[Point], Point]:
            def apply(i: Point) -> Point:
                value = expr.evaluate({"i": i})
                if float(value) != int(value):
                    raise InvalidPointException(f"{expr.source!r} gives non-integer index {value} at i={i}")
                return int(value)

            return apply

        return cls(
            T=as_index(t_expr),
            S=as_index(s_expr),
            T_label=t_expr.source,
            S_label=s_expr.source,
            S_identity=s_expr == Expr.parse("i"),
            T_identity=t_expr == Expr.parse("i"),
        )

    @classmethod
    def from_expressions(
        cls,
        t_expr: Expr,
        s_expr: Expr,
        *,
        s_inverse: Optional[Expr] = None,
        s_monotone: bool = False,
    ) -> "MappingPair":
        def as_map(expr: Expr) -> Callable[[Point], Point]:
            return lambda x: float(expr.evaluate({"x": x}))

        identity = Expr.parse("x")
        return cls(
            T=as_map(t_expr),
            S=as_map(s_expr),
            T_label=t_expr.source,
            S_label=s_expr.source,
            S_inverse=as_map(s_inverse) if s_inverse is not None else None,
            S_monotone=s_monotone,
            S_identity=s_expr == identity,
            T_identity=t_expr == identity,
            T_continuous=t_expr.continuous,
            S_continuous=s_expr.continuous,
        )

    def apply_T(self, space: OrderedMetricSpace, x: Point) -> Point:
        return self._apply(space, self.T, "T", x)

    def apply_S(self, space: OrderedMetricSpace, x: Point) -> Point:
        return self._apply(space, self.S, "S", x)

    @staticmethod
    def _apply(space: OrderedMetricSpace, fn: Callable[[Point], Point], name: str, x: Point) -> Point:
        x = space.validate_point(x)
        image = fn(x)
        try:
            return space.validate_point(image)
        except InvalidPointException:
            raise InvalidPointException(f"{name} maps {space.describe(x)} to {image!r}, outside the space")

    def is_coincidence(self, space: OrderedMetricSpace, x: Point) -> bool:
        return space.same(self.apply_S(space, x), self.apply_T(space, x))


def safe_image(space: OrderedMetricSpace, pair: MappingPair, name: str, x: Point) -> Optional[Point]:
    """Image under T or S, or None when it cannot be materialised (past the budget, outside the space)."""
    try:
        return pair.apply_T(space, x) if name == "T" else pair.apply_S(space, x)
    except (BudgetExceededException, InvalidPointException, DomainErrorException, OverflowError):
        return None
