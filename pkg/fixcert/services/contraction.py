"""
Contraction Service

Technical Explanation:
- Comparison functions are certified on a logarithmic grid: phi(0) = 0,
  phi(t) < t, monotone increase between consecutive grid points and decay of
  the iterates below DECAY_THRESHOLD
- F1a / F1b / F1c are checked in two parts: the implication carried by the
  condition's characteristic tuple and non-increase of F in the designated
  coordinate, sampled from deterministic base tuples
- A tuple at which F cannot be evaluated (zero denominator, overflow) is
  skipped and counted; a condition with no evaluable tuple is "not-applicable"
- evaluate_contraction checks the contractive inequality of a concrete
  problem: exhaustively on finite spaces, on a sample elsewhere
"""

from __future__ import annotations

import logging
import math
from typing import Iterable, Optional, Sequence

import numpy as np

from fixcert.core.config import settings
from fixcert.core.exceptions import DomainErrorException, MissingCompanionException
from fixcert.models.contraction import (
    DECREASING_COORDINATE,
    ComparisonFn,
    Condition,
    GridSpec,
    HalfComparisonFn,
    ImplicitContraction,
    characteristic_tuple,
)
from fixcert.models.mapping import MappingPair, safe_image
from fixcert.models.spaces import IndexedSequenceSpace, NumericIntervalSpace, OrderedMetricSpace, Point
from fixcert.repositories.catalog import CatalogRepository
from fixcert.schemas.reports import ConditionReport

logger = logging.getLogger("fixcert.contraction")

Tuple6 = tuple[float, float, float, float, float, float]


def evaluate_F(ic: ImplicitContraction, t: Sequence[float]) -> Optional[float]:
    """F at t, or None when F is not applicable there."""
    try:
        value = ic(*t)
    except (ZeroDivisionError, OverflowError, ValueError, DomainErrorException):
        return None
    if not math.isfinite(value):
        return None
    return value


def _scale(*values: float) -> float:
    return max(1.0, *(abs(v) for v in values))


def evaluate_phi(phi: ComparisonFn, t: float) -> Optional[float]:
    """phi(t), or None when t is outside the domain of phi."""
    try:
        value = phi(t)
    except (ZeroDivisionError, OverflowError, ValueError, DomainErrorException):
        return None
    return value if math.isfinite(value) else None


def _as_list(t: Iterable[float]) -> list[float]:
    return [float(v) for v in t]


class ContractionService:
    @staticmethod
    def check_comparison(
        phi: ComparisonFn,
        grid: Optional[GridSpec] = None,
        *,
        condition: str = "comparison",
    ) -> ConditionReport:
        grid = grid or GridSpec()
        values = grid.values()
        tol = settings.EPS_TOL

        def failed(witness: dict) -> ConditionReport:
            logger.debug("%s check of %s failed: %s", condition, phi.label, witness)
            return ConditionReport(
                condition=condition,
                verdict="counterexample",
                witness=witness,
                grid=grid.describe(),
                checked=len(values),
            )

        images = []
        for t in values:
            image = evaluate_phi(phi, float(t))
            if image is None:
                return failed({"kind": "domain", "t": float(t)})
            if image < -tol:
                return failed({"kind": "negative", "t": float(t), "phi_t": image})
            images.append(image)

        phi_zero = evaluate_phi(phi, 0.0)
        if phi_zero is None or abs(phi_zero) > tol:
            return failed({"kind": "phi(0)", "t": 0.0, "phi_t": phi_zero})

        for t, image in zip(values, images):
            if t > 0 and image >= t - tol * t:
                return failed({"kind": "strict", "t": float(t), "phi_t": image})

        for (s, phi_s), (t, phi_t) in zip(zip(values, images), zip(values[1:], images[1:])):
            if phi_s > phi_t + tol * _scale(phi_s, phi_t):
                return failed(
                    {"kind": "monotone", "s": float(s), "t": float(t), "phi_s": phi_s, "phi_t": phi_t}
                )

        for t in values[values > 0]:
            current = float(t)
            for _ in range(settings.DECAY_MAX_ITERATIONS):
                if current < settings.DECAY_THRESHOLD:
                    break
                current = evaluate_phi(phi, current)
                if current is None:
                    return failed({"kind": "domain", "t": float(t)})
            if current >= settings.DECAY_THRESHOLD:
                return failed(
                    {
                        "kind": "decay",
                        "t": float(t),
                        "iterations": settings.DECAY_MAX_ITERATIONS,
                        "last": current,
                    }
                )

        return ConditionReport(condition=condition, verdict="pass-on-grid", grid=grid.describe(), checked=len(values))

    @staticmethod
    def check_half_comparison(rho: HalfComparisonFn, grid: Optional[GridSpec] = None) -> ConditionReport:
        grid = grid or GridSpec()
        phi = rho.doubled()
        for t in grid.positive():
            doubled = evaluate_phi(phi, float(t))
            if doubled is None:
                witness = {"kind": "domain", "t": float(t)}
            elif doubled >= t:
                witness = {"kind": "half-strict", "t": float(t), "rho_2t": doubled}
            else:
                continue
            logger.debug("half-comparison check of %s failed: %s", rho.label, witness)
            return ConditionReport(condition="half-comparison", verdict="counterexample", witness=witness, grid=grid.describe())
        return ContractionService.check_comparison(phi, grid, condition="half-comparison")

    @staticmethod
    def monotone_bases(ic: ImplicitContraction, condition: Condition, grid: GridSpec) -> list[Tuple6]:
        """All-ones tuple, the characteristic tuple at (1, 1) and seeded random grid tuples."""
        bases: list[Tuple6] = [(1.0,) * 6, characteristic_tuple(condition, 1.0, 1.0)]
        rng = np.random.default_rng(settings.GRID_SEED)
        picks = rng.choice(grid.values(), size=(settings.MONOTONE_BASES, 6))
        bases.extend(tuple(float(v) for v in row) for row in picks)
        return bases

    @staticmethod
    def check_condition_F1(
        ic: ImplicitContraction,
        which: Condition,
        grid: Optional[GridSpec] = None,
    ) -> ConditionReport:
        if which is Condition.F2:
            return ContractionService.check_condition_F2(ic, grid)
        if ic.companion is None:
            raise MissingCompanionException(f"{ic.id}: {which.value} needs a companion comparison function")
        grid = grid or GridSpec()
        tol = settings.EPS_TOL
        phi = ic.companion
        values = grid.values()
        checked = skipped = 0

        def report(verdict: str, witness: Optional[dict] = None, reason: Optional[str] = None) -> ConditionReport:
            return ConditionReport(
                condition=which.value,
                verdict=verdict,
                witness=witness,
                grid=grid.describe(),
                checked=checked,
                skipped=skipped,
                reason=reason,
            )

        for u in values:
            for v in values:
                u_, v_ = float(u), float(v)
                t = characteristic_tuple(which, u_, v_)
                value = evaluate_F(ic, t)
                if value is None:
                    skipped += 1
                    continue
                checked += 1
                s = _scale(u_, v_)
                if value <= tol * s:
                    phi_v = evaluate_phi(phi, v_)
                    if phi_v is None:
                        return report("counterexample", {"kind": "domain", "v": v_, "tuple": _as_list(t)})
                    if u_ > phi_v + tol * s:
                        return report(
                            "counterexample",
                            {
                                "kind": "implication",
                                "u": u_,
                                "v": v_,
                                "tuple": _as_list(t),
                                "value": value,
                                "phi_v": phi_v,
                            },
                        )

        coordinate = DECREASING_COORDINATE[which]
        sweep = np.sort(values)
        for base in ContractionService.monotone_bases(ic, which, grid):
            previous: Optional[tuple[list[float], float]] = None
            for level in sweep:
                t = list(base)
                t[coordinate] = float(level)
                value = evaluate_F(ic, t)
                if value is None:
                    skipped += 1
                    continue
                checked += 1
                if previous is not None:
                    low, low_value = previous
                    if value > low_value + tol * _scale(*low, *t):
                        return report(
                            "counterexample",
                            {
                                "kind": "monotone",
                                "coordinate": coordinate + 1,
                                "low": low,
                                "high": t,
                                "low_value": low_value,
                                "high_value": value,
                            },
                        )
                previous = (t, value)

        if checked == 0:
            return report("not-applicable", reason=f"F cannot be evaluated at any {which.value} tuple")
        return report("pass-on-grid")

    @staticmethod
    def check_condition_F2(ic: ImplicitContraction, grid: Optional[GridSpec] = None) -> ConditionReport:
        grid = grid or GridSpec()
        checked = skipped = 0
        for u in grid.positive():
            t = characteristic_tuple(Condition.F2, float(u), float(u))
            value = evaluate_F(ic, t)
            if value is None:
                skipped += 1
                continue
            checked += 1
            if value <= settings.EPS_TOL:
                return ConditionReport(
                    condition=Condition.F2.value,
                    verdict="counterexample",
                    witness={"kind": "positivity", "u": float(u), "tuple": _as_list(t), "value": value},
                    grid=grid.describe(),
                    checked=checked,
                    skipped=skipped,
                )
        if checked == 0:
            return ConditionReport(
                condition=Condition.F2.value,
                verdict="not-applicable",
                grid=grid.describe(),
                skipped=skipped,
                reason="F(u, u, 0, 0, u, u) cannot be evaluated for any u > 0",
            )
        return ConditionReport(
            condition=Condition.F2.value,
            verdict="pass-on-grid",
            grid=grid.describe(),
            checked=checked,
            skipped=skipped,
        )

    @staticmethod
    def check_all(ic: ImplicitContraction, grid: Optional[GridSpec] = None) -> list[ConditionReport]:
        """Reports for F1a, F1b, F1c and F2, in that order."""
        grid = grid or GridSpec()
        reports = []
        for which in (Condition.F1A, Condition.F1B, Condition.F1C):
            if ic.companion is None:
                reports.append(
                    ConditionReport(
                        condition=which.value,
                        verdict="not-applicable",
                        grid=grid.describe(),
                        reason="no companion comparison function given",
                    )
                )
            else:
                reports.append(ContractionService.check_condition_F1(ic, which, grid))
        reports.append(ContractionService.check_condition_F2(ic, grid))
        logger.info(
            "Conditions of %s: %s",
            ic.id,
            ", ".join(f"{r.condition}={r.verdict}" for r in reports),
        )
        return reports

    @staticmethod
    def check_contraction(ic: ImplicitContraction, grid: Optional[GridSpec] = None) -> list[ConditionReport]:
        """check_all plus the half-comparison check when the entry carries a rho."""
        reports = ContractionService.check_all(ic, grid)
        if ic.rho is not None:
            reports.append(ContractionService.check_half_comparison(ic.rho, grid))
        return reports

    @staticmethod
    def catalog() -> list[ImplicitContraction]:
        return CatalogRepository.list_entries()

    @staticmethod
    def sample_points(
        space: OrderedMetricSpace,
        pair: MappingPair,
        extra: Iterable[Point] = (),
    ) -> tuple[list[Point], bool]:
        """
        Points the contractive inequality is checked on, and whether the set is exhaustive.

        Indexed spaces keep the indices up to INDEXED_SAMPLE_LIMIT whose images
        stay inside the materialisation budget.
        """
        if isinstance(space, NumericIntervalSpace):
            return space.sample(settings.PAIR_SAMPLES, extra=[float(p) for p in extra]), False
        if isinstance(space, IndexedSequenceSpace):
            limit = min(space.budget, settings.INDEXED_SAMPLE_LIMIT)
            kept = [
                i
                for i in range(limit + 1)
                if safe_image(space, pair, "T", i) is not None and safe_image(space, pair, "S", i) is not None
            ]
            return kept, False
        return space.points(), True

    @staticmethod
    def distance_tuple(space: OrderedMetricSpace, pair: MappingPair, x: Point, y: Point) -> Tuple6:
        Tx, Ty = pair.apply_T(space, x), pair.apply_T(space, y)
        Sx, Sy = pair.apply_S(space, x), pair.apply_S(space, y)
        d = space.metric
        return (d(Tx, Ty), d(Sx, Sy), d(Sx, Tx), d(Sy, Ty), d(Sx, Ty), d(Sy, Tx))

    @staticmethod
    def evaluate_contraction(
        space: OrderedMetricSpace,
        pair: MappingPair,
        ic: ImplicitContraction,
        points: Optional[Sequence[Point]] = None,
        *,
        extra: Iterable[Point] = (),
    ) -> ConditionReport:
        """
        F(d(Tx,Ty), d(Sx,Sy), d(Sx,Tx), d(Sy,Ty), d(Sx,Ty), d(Sy,Tx)) <= 0
        for every checked pair with Sx <= Sy.

        A pair whose six distances all vanish satisfies the inequality even
        when F is not defined at the zero tuple.
        """
        if points is None:
            points, exhaustive = ContractionService.sample_points(space, pair, extra)
        else:
            exhaustive = False
        rtol = settings.CONTRACTIVE_RTOL
        checked = skipped = 0
        images = {p: pair.apply_S(space, p) for p in points}
        grid = f"{'all' if exhaustive else 'sample of'} {len(points)} points"

        for x in points:
            for y in points:
                if not space.leq(images[x], images[y]):
                    continue
                t = ContractionService.distance_tuple(space, pair, x, y)
                value = evaluate_F(ic, t)
                if value is None:
                    if all(v == 0 for v in t):
                        checked += 1
                    else:
                        skipped += 1
                    continue
                checked += 1
                largest = max(abs(v) for v in t)
                # relative to the tuple; the all-zero tuple keeps rtol as an absolute floor
                if value > rtol * (largest if largest > 0 else 1.0):
                    logger.info("Contractive inequality of %s fails at (%s, %s)", ic.id, x, y)
                    return ConditionReport(
                        condition="contractive",
                        verdict="counterexample",
                        witness={"x": x, "y": y, "tuple": _as_list(t), "value": value},
                        grid=grid,
                        checked=checked,
                        skipped=skipped,
                    )

        if checked == 0 and skipped > 0:
            return ConditionReport(
                condition="contractive",
                verdict="not-applicable",
                grid=grid,
                skipped=skipped,
                reason="F cannot be evaluated at any comparable pair",
            )
        return ConditionReport(
            condition="contractive",
            verdict="pass-on-grid",
            grid=grid,
            checked=checked,
            skipped=skipped,
        )
