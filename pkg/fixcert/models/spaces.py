"""
Ordered Metric Spaces

Technical Explanation:
- Three concrete flavors share one query surface (metric, leq, comparable):
  * FiniteOrderedMetricSpace: labelled points, an n x n distance matrix and
    the order stored as a boolean matrix (its reflexive closure)
  * IndexedSequenceSpace: points are indices i >= 0 with a real value(i);
    metric |value(i) - value(j)|, usual order on values, materialised lazily
    up to a budget
  * NumericIntervalSpace: an interval of reals with |x - y| and either the
    usual order or a user-declared predicate
- Properties that cannot be decided numerically (completeness, regularity,
  continuity, ...) are user-asserted flags carried by the space
- Spaces are immutable after construction; caches are internal memos only
"""

from __future__ import annotations

import copy
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Callable, ClassVar, Iterable, Optional, Sequence, Union

import numpy as np

from fixcert.core.config import settings
from fixcert.core.exceptions import (
    BudgetExceededException,
    InvalidPointException,
    InvalidSpaceException,
    NotCheckableException,
)

Point = Union[int, float]

ASSERTABLE_FLAGS = frozenset(
    {
        "complete",
        "I_regular",
        "D_regular",
        "M_regular",
        "S_increasing",
        "range_inclusion",
        "T_continuous",
        "S_continuous",
        "T_O_continuous",
        "S_O_continuous",
        "T_S_O_continuous",
        "O_compatible",
        "weakly_compatible",
        "injective",
        "T_comparable",
        "S_comparable",
        "directed",
        "totally_ordered",
        "a2",
        "a5",
    }
)


class OrderedMetricSpace(ABC):
    """Common surface of the three space flavors."""

    flavor: ClassVar[str]

    def __init__(self, asserted: Iterable[str] = ()):
        flags = frozenset(asserted)
        unknown = flags - ASSERTABLE_FLAGS
        if unknown:
            raise InvalidSpaceException(f"unknown asserted properties: {sorted(unknown)}")
        self.asserted = flags
        self.total_relation = False

    # -- point handling -------------------------------------------------
    @abstractmethod
    def validate_point(self, p: Point) -> Point:
        """Return the normalised handle or raise InvalidPoint / BudgetExceeded."""

    def contains(self, p: Point) -> bool:
        try:
            self.validate_point(p)
        except (InvalidPointException, BudgetExceededException):
            return False
        return True

    @property
    def enumerable(self) -> bool:
        return False

    def points(self) -> list[Point]:
        raise NotCheckableException(f"{self.flavor} space cannot be enumerated")

    def describe(self, p: Point) -> str:
        return repr(p)

    # -- queries ----------------------------------------------------------
    def metric(self, a: Point, b: Point) -> float:
        return self._distance(self.validate_point(a), self.validate_point(b))

    def leq(self, a: Point, b: Point) -> bool:
        a, b = self.validate_point(a), self.validate_point(b)
        if self.total_relation or self.same(a, b):
            return True
        return self._leq(a, b)

    def comparable(self, a: Point, b: Point) -> bool:
        return self.leq(a, b) or self.leq(b, a)

    def same(self, a: Point, b: Point) -> bool:
        """Point equality: handle equality on discrete flavors."""
        return a == b

    def is_asserted(self, flag: str) -> bool:
        return flag in self.asserted

    def with_total_relation(self) -> "OrderedMetricSpace":
        """Copy of this space where every pair of points is related both ways."""
        clone = copy.copy(self)
        clone.total_relation = True
        return clone

    @abstractmethod
    def _distance(self, a: Point, b: Point) -> float: ...

    @abstractmethod
    def _leq(self, a: Point, b: Point) -> bool: ...


class FiniteOrderedMetricSpace(OrderedMetricSpace):
    """
    Finite ordered metric space backed by numpy matrices.

    order_pairs lists (i, j) meaning i <= j; the reflexive closure is always
    stored. With close_order=True the transitive closure is taken as well,
    otherwise transitivity is left to validate_space.
    """

    flavor = "finite"

    def __init__(
        self,
        labels: Sequence[str],
        distances: Sequence[Sequence[float]],
        order_pairs: Iterable[tuple[int, int]] = (),
        *,
        close_order: bool = False,
        asserted: Iterable[str] = (),
    ):
        super().__init__(asserted)
        self.labels = tuple(str(label) for label in labels)
        n = len(self.labels)
        if n == 0:
            raise InvalidSpaceException("a finite space needs at least one point")
        if len(set(self.labels)) != n:
            raise InvalidSpaceException("point labels must be unique")
        matrix = np.asarray(distances, dtype=float)
        if matrix.shape != (n, n):
            raise InvalidSpaceException(f"metric must be a {n}x{n} matrix, got shape {matrix.shape}")
        matrix.setflags(write=False)
        self.distances = matrix

        order = np.eye(n, dtype=bool)
        for i, j in order_pairs:
            if not (0 <= i < n and 0 <= j < n):
                raise InvalidSpaceException(f"order pair ({i}, {j}) refers to a missing point")
            order[i, j] = True
        if close_order:
            # Warshall closure
            for k in range(n):
                order |= np.outer(order[:, k], order[k, :])
        order.setflags(write=False)
        self.order = order

    @classmethod
    def chain(
        cls,
        values: Sequence[float],
        labels: Optional[Sequence[str]] = None,
        *,
        asserted: Iterable[str] = (),
    ) -> "FiniteOrderedMetricSpace":
        """Points on the real line with |x - y| and the usual order of values."""
        vals = np.asarray(values, dtype=float)
        names = labels or [f"p{i}" for i in range(len(vals))]
        pairs = [(i, j) for i in range(len(vals)) for j in range(len(vals)) if vals[i] <= vals[j]]
        return cls(names, np.abs(vals[:, None] - vals[None, :]), pairs, asserted=asserted)

    @property
    def size(self) -> int:
        return len(self.labels)

    @property
    def enumerable(self) -> bool:
        return True

    def points(self) -> list[Point]:
        return list(range(self.size))

    def index_of(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise InvalidPointException(f"unknown point label {label!r}")

    def describe(self, p: Point) -> str:
        return self.labels[int(p)]

    def validate_point(self, p: Point) -> Point:
        if isinstance(p, (bool, np.bool_)) or not isinstance(p, (int, np.integer)) or not 0 <= p < self.size:
            raise InvalidPointException(f"{p!r} is not a point of this {self.size}-point space")
        return int(p)

    def _distance(self, a: int, b: int) -> float:
        return float(self.distances[a, b])

    def _leq(self, a: int, b: int) -> bool:
        return bool(self.order[a, b])


class IndexedSequenceSpace(OrderedMetricSpace):
    """
    Countable space {x_0, x_1, ...} with x_i identified by its index.

    value maps an index to a real; overrides pin individual indices (the
    counterexample space uses value(i) = -(1/4)^i with value(0) = 0).
    """

    flavor = "indexed"

    def __init__(
        self,
        value: Callable[[int], float],
        budget: int,
        *,
        overrides: Optional[dict[int, float]] = None,
        label: str = "x",
        asserted: Iterable[str] = (),
    ):
        super().__init__(asserted)
        if budget < 0:
            raise InvalidSpaceException("budget must be non-negative")
        self._value = value
        self.budget = int(budget)
        self.overrides = dict(overrides or {})
        self.label = label
        self._cache: dict[int, float] = {}

    @property
    def enumerable(self) -> bool:
        return True

    def points(self) -> list[Point]:
        return list(range(self.budget + 1))

    def value(self, i: Point) -> float:
        i = self.validate_point(i)
        cached = self._cache.get(i)
        if cached is None:
            cached = float(self.overrides[i]) if i in self.overrides else float(self._value(i))
            if not math.isfinite(cached):
                raise InvalidSpaceException(f"value({i}) is not finite")
            self._cache[i] = cached
        return cached

    def describe(self, p: Point) -> str:
        return f"{self.label}{p}"

    def validate_point(self, p: Point) -> Point:
        if isinstance(p, (bool, np.bool_)) or not isinstance(p, (int, np.integer)) or p < 0:
            raise InvalidPointException(f"{p!r} is not a valid index")
        if p > self.budget:
            raise BudgetExceededException(f"index {p} exceeds budget {self.budget}", index=int(p))
        return int(p)

    def _distance(self, a: int, b: int) -> float:
        return abs(self.value(a) - self.value(b))

    def _leq(self, a: int, b: int) -> bool:
        return self.value(a) <= self.value(b)


class NumericIntervalSpace(OrderedMetricSpace):
    """
    Interval of the real line with the usual metric.

    order is an optional predicate (x, y) -> bool; None means the usual order.
    Reflexivity is always enforced regardless of the predicate.
    """

    flavor = "interval"

    def __init__(
        self,
        lower: float,
        upper: float,
        *,
        lower_closed: bool = True,
        upper_closed: bool = True,
        order: Optional[Callable[[float, float], bool]] = None,
        order_label: str = "usual",
        asserted: Iterable[str] = (),
    ):
        super().__init__(asserted)
        if not lower < upper:
            raise InvalidSpaceException(f"interval needs lower < upper, got [{lower}, {upper}]")
        self.lower = float(lower)
        self.upper = float(upper)
        self.lower_closed = bool(lower_closed) and math.isfinite(self.lower)
        self.upper_closed = bool(upper_closed) and math.isfinite(self.upper)
        self.order_predicate = order
        self.order_label = order_label

    @property
    def closed(self) -> bool:
        """Closed subset of the reals (hence complete)."""
        lower_ok = self.lower_closed or math.isinf(self.lower)
        upper_ok = self.upper_closed or math.isinf(self.upper)
        return lower_ok and upper_ok

    @property
    def usual_order(self) -> bool:
        return self.order_predicate is None

    def same(self, a: Point, b: Point) -> bool:
        return abs(a - b) <= settings.METRIC_ATOL

    def describe(self, p: Point) -> str:
        return f"{p:.12g}"

    def validate_point(self, p: Point) -> Point:
        if isinstance(p, bool):
            raise InvalidPointException(f"{p!r} is not a real number")
        try:
            x = float(p)
        except (TypeError, ValueError):
            raise InvalidPointException(f"{p!r} is not a real number")
        if not math.isfinite(x):
            raise InvalidPointException(f"{p!r} is not finite")
        below = x < self.lower or (x == self.lower and not self.lower_closed)
        above = x > self.upper or (x == self.upper and not self.upper_closed)
        if below or above:
            raise InvalidPointException(f"{x!r} lies outside {self.interval_text()}")
        return x

    def interval_text(self) -> str:
        left = "[" if self.lower_closed else "("
        right = "]" if self.upper_closed else ")"
        return f"{left}{self.lower:g}, {self.upper:g}{right}"

    def search_bounds(self) -> tuple[float, float]:
        """Finite window used for sampling and root finding."""
        window = settings.SEARCH_WINDOW
        lower = self.lower if math.isfinite(self.lower) else -window
        upper = self.upper if math.isfinite(self.upper) else window
        if math.isinf(self.lower) and upper <= lower:
            lower = upper - window
        if math.isinf(self.upper) and upper <= lower:
            upper = lower + window
        return lower, upper

    def sample(self, count: int, extra: Iterable[float] = ()) -> list[float]:
        """
        Evenly spaced interior sample plus closed endpoints, zero (when inside)
        and any extra points, deduplicated and sorted.
        """
        lower, upper = self.search_bounds()
        raw = list(np.linspace(lower, upper, max(count, 2)))
        raw.extend([0.0, *extra])
        picked = sorted({float(x) for x in raw if self.contains(float(x))})
        if not picked:
            picked = [float((lower + upper) / 2)]
        return picked

    def _distance(self, a: float, b: float) -> float:
        return abs(a - b)

    def _leq(self, a: float, b: float) -> bool:
        if self.order_predicate is None:
            return a <= b
        return bool(self.order_predicate(a, b))


SUBSPACE_KINDS = ("X", "T(X)", "S(X)", "points")


@dataclass(frozen=True)
class Subspace:
    """
    The subspace E of the main theorems: the whole space, one of the images
    T(X) / S(X), or an explicit finite point set.
    """

    kind: str = "X"
    points: tuple[Point, ...] = ()

    def __post_init__(self):
        if self.kind not in SUBSPACE_KINDS:
            raise InvalidSpaceException(f"unknown subspace {self.kind!r}; expected one of {SUBSPACE_KINDS}")
        if self.kind != "points" and self.points:
            raise InvalidSpaceException(f"subspace {self.kind} takes no explicit points")

    @classmethod
    def of_points(cls, points: Iterable[Point]) -> "Subspace":
        return cls("points", tuple(points))

    def describe(self) -> str:
        if self.kind == "points":
            return "{" + ", ".join(str(p) for p in self.points) + "}"
        return self.kind
