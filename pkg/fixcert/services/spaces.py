from __future__ import annotations

import numpy as np

from fixcert.core.config import settings
from fixcert.core.exceptions import DomainErrorException, InvalidSpaceException
from fixcert.models.spaces import (
    FiniteOrderedMetricSpace,
    IndexedSequenceSpace,
    NumericIntervalSpace,
    OrderedMetricSpace,
)
from fixcert.schemas.reports import ValidationReport, Violation


class SpaceService:
    @staticmethod
    def validate_space(space: OrderedMetricSpace) -> ValidationReport:
        """
        Metric and order axioms, one violation per axiom with its first witness.

        Finite spaces are checked exhaustively; indexed and interval spaces
        structurally (finite values, a sane interval).
        """
        if isinstance(space, FiniteOrderedMetricSpace):
            return SpaceService._validate_finite(space)
        violations: list[Violation] = []
        if isinstance(space, IndexedSequenceSpace):
            for i in range(min(space.budget, settings.INDEXED_SAMPLE_LIMIT) + 1):
                try:
                    space.value(i)
                except (InvalidSpaceException, DomainErrorException) as exc:
                    violations.append(Violation(axiom="finite-values", witness=[i], detail=str(exc)))
                    break
        elif isinstance(space, NumericIntervalSpace):
            if not space.lower < space.upper:
                violations.append(
                    Violation(axiom="interval", witness=[space.lower, space.upper], detail="lower >= upper")
                )
        return ValidationReport(flavor=space.flavor, exhaustive=False, violations=violations)

    @staticmethod
    def _validate_finite(space: FiniteOrderedMetricSpace) -> ValidationReport:
        d = space.distances
        order = space.order
        n = space.size
        atol = settings.METRIC_ATOL
        violations: list[Violation] = []

        def first(mask: np.ndarray) -> list[int]:
            return [int(i) for i in np.argwhere(mask)[0]]

        checks = [
            ("nonnegativity", d < -atol, "d(a,b) < 0"),
            ("finite", ~np.isfinite(d), "d(a,b) is not finite"),
            ("identity", np.abs(np.diag(d)) > atol, "d(a,a) != 0"),
            ("symmetry", np.abs(d - d.T) > atol, "d(a,b) != d(b,a)"),
        ]
        for axiom, mask, detail in checks:
            if mask.any():
                witness = first(mask)
                if axiom == "identity":
                    witness = witness * 2
                violations.append(Violation(axiom=axiom, witness=witness, detail=detail))

        separation = (np.abs(d) <= atol) & ~np.eye(n, dtype=bool)
        if separation.any():
            violations.append(Violation(axiom="separation", witness=first(separation), detail="d(a,b)=0 with a != b"))

        # triangle[a, c, b] = d(a,b) > d(a,c) + d(c,b)
        triangle = d[:, None, :] > d[:, :, None] + d[None, :, :] + atol
        if triangle.any():
            a, c, b = first(triangle)
            violations.append(
                Violation(
                    axiom="triangle",
                    witness=[a, b, c],
                    detail=f"d({a},{b})={d[a, b]:g} > d({a},{c})+d({c},{b})={d[a, c] + d[c, b]:g}",
                )
            )

        if not np.all(np.diag(order)):
            i = int(np.argmin(np.diag(order)))
            violations.append(Violation(axiom="reflexivity", witness=[i, i], detail="a <= a fails"))

        antisymmetric = order & order.T & ~np.eye(n, dtype=bool)
        if antisymmetric.any():
            violations.append(
                Violation(axiom="antisymmetry", witness=first(antisymmetric), detail="a <= b and b <= a with a != b")
            )

        # transitive[a, b, c] = a <= b, b <= c, not a <= c
        transitive = order[:, :, None] & order[None, :, :] & ~order[:, None, :]
        if transitive.any():
            violations.append(
                Violation(axiom="transitivity", witness=first(transitive), detail="a <= b <= c but not a <= c")
            )

        return ValidationReport(flavor=space.flavor, exhaustive=True, violations=violations)

    @staticmethod
    def is_valid(space: OrderedMetricSpace) -> bool:
        return SpaceService.validate_space(space).valid


def describe_space(space: OrderedMetricSpace) -> str:
    if isinstance(space, FiniteOrderedMetricSpace):
        return f"finite space with {space.size} points"
    if isinstance(space, IndexedSequenceSpace):
        return f"indexed space {space.label}0..{space.label}{space.budget}"
    if isinstance(space, NumericIntervalSpace):
        order = "usual order" if space.usual_order else f"order {space.order_label}"
        return f"interval {space.interval_text()} with {order}"
    return space.flavor
