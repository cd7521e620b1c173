"""
Certifier Service

Technical Explanation:
- A theorem variant is a list of stages (coincidence point, common fixed
  point, uniqueness ...) preceded by standing hypotheses; each stage lists
  the extra labelled conditions (b1..b6, c2..c6, d1..d6, g1..g4, a1..a6) it
  needs and the earlier stages it builds on
- certify runs exactly the checks the variant names, records each as an
  entry and derives one verdict per stage:
  * any counterexample -> counterexample
  * else any not-checkable -> not-checkable
  * else verified (asserted entries count, and stay visible in the report)
- When some stage is established, the solver and (on enumerable spaces) the
  brute-force oracle are run and compared with the promised conclusion;
  mismatches are listed as discrepancies and followed by completeness
  diagnostics of T(X) and S(X)
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

from fixcert.core.config import settings
from fixcert.core.exceptions import (
    BudgetExceededException,
    InvalidParameterException,
    MissingCompanionException,
    NoCoincidenceException,
    NotCheckableException,
    PreconditionFailedException,
)
from fixcert.models.contraction import Condition, GridSpec, HalfComparisonFn, ImplicitContraction
from fixcert.models.mapping import MappingPair
from fixcert.models.spaces import NumericIntervalSpace, OrderedMetricSpace, Point, Subspace
from fixcert.repositories.catalog import CatalogRepository
from fixcert.schemas.reports import (
    ConclusionCheck,
    ConditionReport,
    FixedPointResult,
    HypothesisEntry,
    HypothesisReport,
    OracleResult,
    StageResult,
)
from fixcert.services.contraction import ContractionService, evaluate_phi
from fixcert.services.hypotheses import HypothesisService, combine, entry
from fixcert.services.solver import SolverService

logger = logging.getLogger("fixcert.certifier")

STAGE_CONCLUSIONS = {
    "coincidence": "(T, S) has a coincidence point",
    "common-fixed-point": "(T, S) has a common fixed point",
    "unique-point-of-coincidence": "(T, S) has a unique point of coincidence",
    "unique-coincidence-point": "(T, S) has a unique coincidence point",
    "unique-common-fixed-point": "(T, S) has a unique common fixed point",
}

CERT_DIRECTIONS = {
    "increasing": "increasing",
    "inc": "increasing",
    "decreasing": "decreasing",
    "dec": "decreasing",
    "monotone": "monotone",
    "mono": "monotone",
    "either": "either",
}

REGULARITY_KIND = {"increasing": "I", "decreasing": "D", "monotone": "M"}

Check = Callable[[], HypothesisEntry]


@dataclass
class Stage:
    name: str
    checks: list[tuple[str, Check, bool]] = field(default_factory=list)
    after: tuple[str, ...] = ()


@dataclass
class Plan:
    standing: list[tuple[str, Check, bool]]
    stages: list[Stage]
    space: OrderedMetricSpace


VARIANTS = (
    "bv-ordered",
    "main-regular",
    "main-continuity-i",
    "main-continuity-ii",
    "main-continuity-iii",
    "poc-unique",
    "poc-continuity-i",
    "poc-continuity-ii",
    "poc-continuity-iii",
    "quasi-corollary",
    "quasi-corollary-i",
    "quasi-corollary-ii",
    "quasi-corollary-iii",
    "metric",
    "metric-quasi",
)


def normalize_variant(variant: str) -> str:
    """'Main-continuity(ii)' -> 'main-continuity-ii'."""
    key = variant.strip().lower().replace("(", "-").replace(")", "").replace("_", "-")
    if key not in VARIANTS:
        raise InvalidParameterException(f"unknown variant {variant!r}; expected one of {', '.join(VARIANTS)}")
    return key


def _condition_entry(report: ConditionReport, name: str, title: str) -> HypothesisEntry:
    verdict = {"pass-on-grid": "verified", "counterexample": "counterexample"}.get(report.verdict, "not-checkable")
    note = report.reason or report.grid
    return entry(name, title, verdict, witness=report.witness, note=note)


def _f_condition(ic: ImplicitContraction, which: Condition, name: str, *, linear: bool = False) -> HypothesisEntry:
    title = f"F satisfies {which.value}"
    try:
        if which is Condition.F2:
            report = ContractionService.check_condition_F2(ic)
        else:
            report = ContractionService.check_condition_F1(ic, which)
    except MissingCompanionException as exc:
        return entry(name, title, "not-checkable", note=exc.message)
    result = _condition_entry(report, name, title)
    if not linear or result.verdict != "verified" or which is Condition.F2:
        return result
    # the ordered Berinde-Vetro form concludes with phi(t) = h t, h < 1
    images = [(float(t), evaluate_phi(ic.companion, float(t))) for t in GridSpec().positive()]
    if any(image is None for _, image in images):
        return entry(name, f"{title} with linear phi(t) = h t, h < 1", "counterexample", witness={"kind": "domain"})
    ratios = [image / t for t, image in images]
    h = max(ratios)
    if h >= 1 or max(ratios) - min(ratios) > settings.EPS_TOL * max(1.0, h):
        return entry(
            name,
            f"{title} with linear phi(t) = h t, h < 1",
            "counterexample",
            witness={"kind": "nonlinear", "h_min": min(ratios), "h_max": h},
        )
    return entry(name, f"{title} with phi(t) = {h:g} t", "verified", note=report.grid)


def _contractive(
    space: OrderedMetricSpace,
    pair: MappingPair,
    ic: ImplicitContraction,
    x0: Optional[Point],
    scope: str,
) -> HypothesisEntry:
    extra = [x0] if x0 is not None and isinstance(space, NumericIntervalSpace) else []
    report = ContractionService.evaluate_contraction(space, pair, ic, extra=extra)
    return _condition_entry(report, "contractive", f"F(d(Tx,Ty), ...) <= 0 {scope}")


class CertifierService:
    @staticmethod
    def resolve(
        space: OrderedMetricSpace,
        pair: MappingPair,
        x0: Optional[Point],
        direction: str,
    ) -> tuple[str, Optional[Point]]:
        """Concrete direction (increasing / decreasing / monotone) and an initial point if one is needed."""
        try:
            direction = CERT_DIRECTIONS[direction.strip().lower()]
        except KeyError:
            raise InvalidParameterException(f"unknown direction {direction!r}")
        if direction != "either":
            if x0 is None:
                x0 = HypothesisService.find_x0(space, pair, direction)
            return direction, x0
        if x0 is not None:
            return SolverService.resolve_direction(space, pair, x0, "either") or "increasing", x0
        for candidate in ("increasing", "decreasing"):
            found = HypothesisService.find_x0(space, pair, candidate)
            if found is not None:
                return candidate, found
        return "increasing", None

    @staticmethod
    def plan(
        space: OrderedMetricSpace,
        pair: MappingPair,
        ic: ImplicitContraction,
        variant: str,
        E: Subspace,
        x0: Optional[Point],
        direction: str,
    ) -> Plan:
        H = HypothesisService
        family, _, option = variant.partition("-continuity-")
        if variant.startswith("quasi-corollary"):
            family, option = "quasi-corollary", variant.removeprefix("quasi-corollary").lstrip("-")
        kind = REGULARITY_KIND[direction]

        def x0_check(name: str) -> Check:
            def run() -> HypothesisEntry:
                if x0 is None:
                    return entry(name, "initial point", "counterexample", note=f"no sampled x0 fits the {direction} condition")
                return H.check_x0(space, pair, x0, direction)

            return run

        def coincidences() -> list[Point]:
            return SolverService.locate_coincidences(space, pair)

        def one_comparable() -> HypothesisEntry:
            parts = []
            for which in ("T", "S"):
                try:
                    parts.append(H.check_comparable_mapping(space, pair, which))
                except NotCheckableException as exc:
                    parts.append(entry(f"{which}-comparable", which, "not-checkable", note=exc.message))
            return combine("comparable", "one of T and S is a comparable mapping", parts, mode="any")

        def standing(scope: str = "for Sx <= Sy") -> list[tuple[str, Check, bool]]:
            return [
                ("range-inclusion", lambda: H.check_range_inclusion(space, pair, E), True),
                ("S-increasing", lambda: H.check_S_increasing(space, pair), True),
                ("E-complete", lambda: H.check_completeness(space, pair, E), True),
                ("F1a", lambda: _f_condition(ic, Condition.F1A, "F1a"), True),
                ("contractive", lambda: _contractive(space, pair, ic, x0, scope), True),
            ]

        if variant == "bv-ordered":
            return Plan(
                standing=[
                    ("range-inclusion", lambda: H.check_range_inclusion(space, pair, Subspace("S(X)")), True),
                    ("S-increasing", lambda: H.check_S_increasing(space, pair), True),
                    ("complete", lambda: H.check_completeness(space, pair, Subspace("X")), True),
                    ("f1a", lambda: _f_condition(ic, Condition.F1A, "f1a", linear=True), True),
                    ("contractive", lambda: _contractive(space, pair, ic, x0, "for Sx <= Sy"), True),
                ],
                stages=[
                    Stage(
                        "coincidence",
                        [
                            ("a1", x0_check("a1"), True),
                            ("a2", lambda: H.check_regularity(space, pair, kind, flag="a2", name="a2"), True),
                        ],
                    ),
                    Stage(
                        "common-fixed-point",
                        [
                            ("a3", lambda: H.check_weak_compatibility(space, pair), True),
                            ("a4", lambda: _f_condition(ic, Condition.F2, "a4"), True),
                        ],
                        after=("coincidence",),
                    ),
                    Stage(
                        "unique-common-fixed-point",
                        [
                            ("a5", lambda: H.check_a5(space, pair), True),
                            ("a6", lambda: _f_condition(ic, Condition.F1C, "a6"), True),
                        ],
                        after=("coincidence", "common-fixed-point"),
                    ),
                ],
                space=space,
            )

        if family in ("main-regular", "main"):
            continuity = variant != "main-regular"
            second = (
                ("c2", lambda: H.check_continuity(space, pair, option), True)
                if continuity
                else ("b2", lambda: H.check_regularity(space, pair, kind), True)
            )
            uniqueness = (
                [
                    ("c5", lambda: H.check_totally_ordered(space, coincidences()), True),
                    ("c6", one_comparable, True),
                ]
                if continuity
                else [
                    ("b5", lambda: H.check_directedness(space, pair, coincidences()), True),
                    ("b6", lambda: _f_condition(ic, Condition.F1C, "b6"), True),
                ]
            )
            return Plan(
                standing=standing(),
                stages=[
                    Stage("coincidence", [("b1", x0_check("b1"), True), second]),
                    Stage(
                        "common-fixed-point",
                        [
                            ("b3", lambda: _f_condition(ic, Condition.F2, "b3"), True),
                            ("b4", lambda: H.check_weak_compatibility(space, pair), option != "ii"),
                        ],
                        after=("coincidence",),
                    ),
                    Stage("unique-common-fixed-point", uniqueness, after=("coincidence", "common-fixed-point")),
                ],
                space=space,
            )

        if family in ("poc-unique", "poc"):
            second = (
                ("c2", lambda: H.check_continuity(space, pair, option), True)
                if option
                else ("d2", lambda: H.check_regularity(space, pair, kind), True)
            )

            def injective() -> HypothesisEntry:
                parts = []
                for which in ("T", "S"):
                    try:
                        parts.append(H.check_injective(space, pair, which))
                    except NotCheckableException as exc:
                        parts.append(entry(f"{which}-injective", which, "not-checkable", note=exc.message))
                return combine("d5", "one of T and S is one-one", parts, mode="any")

            return Plan(
                standing=standing(),
                stages=[
                    Stage("coincidence", [("d1", x0_check("d1"), True), second]),
                    Stage(
                        "unique-point-of-coincidence",
                        [
                            ("d3", lambda: H.check_directedness(space, pair, coincidences()), True),
                            ("d4", lambda: _f_condition(ic, Condition.F1B, "d4"), True),
                        ],
                        after=("coincidence",),
                    ),
                    Stage(
                        "unique-coincidence-point",
                        [("d5", injective, True)],
                        after=("coincidence", "unique-point-of-coincidence"),
                    ),
                    Stage(
                        "unique-common-fixed-point",
                        [("d6", lambda: H.check_weak_compatibility(space, pair), True)],
                        after=("coincidence", "unique-point-of-coincidence"),
                    ),
                ],
                space=space,
            )

        quasi = CertifierService.quasi_contraction(ic) if variant != "metric" else ic

        def half_comparison() -> HypothesisEntry:
            report = ContractionService.check_half_comparison(quasi.rho)
            return _condition_entry(report, "rho-half-comparison", f"rho(t) = {quasi.rho.label} is a half-comparison function")

        half = ("rho-half-comparison", half_comparison, True)

        if family == "quasi-corollary":
            second = (
                ("g2", lambda: H.check_continuity(space, pair, option), True)
                if option
                else ("g2", lambda: H.check_regularity(space, pair, kind, name="g2"), True)
            )

            def g4() -> HypothesisEntry:
                C = coincidences()
                parts = [H.check_directedness(space, pair, C)]
                ordered = combine(
                    "ordered", "C(T, S) totally ordered and one map comparable",
                    [H.check_totally_ordered(space, C), one_comparable()],
                )
                parts.append(ordered)
                return combine("g4", "C(T, S) is directed, or totally ordered with a comparable map", parts, mode="any")

            return Plan(
                standing=[
                    ("range-inclusion", lambda: H.check_range_inclusion(space, pair, E), True),
                    ("S-increasing", lambda: H.check_S_increasing(space, pair), True),
                    ("E-complete", lambda: H.check_completeness(space, pair, E), True),
                    half,
                    ("contractive", lambda: _contractive(space, pair, quasi, x0, "for Sx <= Sy"), True),
                ],
                stages=[
                    Stage("coincidence", [("g1", x0_check("g1"), True), second]),
                    Stage(
                        "unique-common-fixed-point",
                        [("g3", lambda: H.check_weak_compatibility(space, pair), True), ("g4", g4, True)],
                        after=("coincidence",),
                    ),
                ],
                space=space,
            )

        # metric variants: every pair of points is compared
        metric_space = space.with_total_relation()
        contraction = quasi if variant == "metric-quasi" else ic
        rows = [
            ("range-inclusion", lambda: H.check_range_inclusion(metric_space, pair, E), True),
            ("E-complete", lambda: H.check_completeness(metric_space, pair, E), True),
            half if variant == "metric-quasi" else ("F1a", lambda: _f_condition(ic, Condition.F1A, "F1a"), True),
            ("contractive", lambda: _contractive(metric_space, pair, contraction, x0, "for all x, y"), True),
        ]
        def weakly_compatible() -> HypothesisEntry:
            result = H.check_weak_compatibility(metric_space, pair)
            if variant == "metric-quasi":
                # the quasi-contraction form does not list it; required here
                result = result.model_copy(update={"title": f"{result.title} (strengthening: required here)"})
            return result

        final = [("weakly-compatible", weakly_compatible, True)]
        if variant == "metric":
            final.append(("F2", lambda: _f_condition(ic, Condition.F2, "F2"), True))
        return Plan(
            standing=rows,
            stages=[
                Stage("coincidence"),
                Stage("unique-common-fixed-point", final, after=("coincidence",)),
            ],
            space=metric_space,
        )

    @staticmethod
    def quasi_contraction(ic: ImplicitContraction) -> ImplicitContraction:
        """The quasi-contraction F for ic's rho (linear-quasi maps to rho(t) = k t)."""
        rho = ic.rho
        if rho is None and ic.id == "linear-quasi":
            rho = HalfComparisonFn.linear(ic.param("k"))
        if rho is None:
            raise PreconditionFailedException(
                f"contraction {ic.id!r} carries no half-comparison function; use nonlinear-quasi:rho=<k>"
            )
        return CatalogRepository.get("nonlinear-quasi", rho=rho)

    @staticmethod
    def certify(
        space: OrderedMetricSpace,
        pair: MappingPair,
        ic: ImplicitContraction,
        variant: str,
        E: Optional[Subspace] = None,
        x0: Optional[Point] = None,
        direction: str = "increasing",
        *,
        budget: Optional[int] = None,
        confirm: bool = True,
    ) -> HypothesisReport:
        variant = normalize_variant(variant)
        E = E or Subspace("X")
        if variant.startswith("metric"):
            direction = "increasing"
            direction, x0 = CertifierService.resolve(space.with_total_relation(), pair, x0, direction)
        else:
            direction, x0 = CertifierService.resolve(space, pair, x0, direction)
        plan = CertifierService.plan(space, pair, ic, variant, E, x0, direction)

        def run(name: str, check: Check, required: bool, stage: str) -> HypothesisEntry:
            try:
                result = check()
            except NotCheckableException as exc:
                result = entry(name, name, "not-checkable", note=exc.message)
            return result.model_copy(update={"name": name, "stage": stage, "required": required})

        entries = [run(name, check, req, "standing") for name, check, req in plan.standing]
        by_stage: dict[str, list[HypothesisEntry]] = {}
        for stage in plan.stages:
            by_stage[stage.name] = [run(name, check, req, stage.name) for name, check, req in stage.checks]
            entries.extend(by_stage[stage.name])

        standing = [e for e in entries if e.stage == "standing"]
        stages: list[StageResult] = []
        for stage in plan.stages:
            relevant = standing + [e for s in (*stage.after, stage.name) for e in by_stage[s]]
            verdict = _overall([e for e in relevant if e.required])
            stages.append(StageResult(name=stage.name, conclusion=STAGE_CONCLUSIONS[stage.name], verdict=verdict))

        established = next((s.name for s in reversed(stages) if s.verdict == "verified"), None)
        overall = _overall([e for e in entries if e.required])
        logger.info(
            "certify %s (%s): overall %s, established %s",
            variant,
            direction,
            overall,
            established or "nothing",
        )
        report = HypothesisReport(
            variant=variant,
            direction=direction,
            x0=x0,
            entries=entries,
            stages=stages,
            overall=overall,
            established=established,
        )
        if confirm and established is not None and x0 is not None:
            report.conclusion = CertifierService.confirm(plan.space, pair, established, x0, direction, budget)
        return report

    @staticmethod
    def confirm(
        space: OrderedMetricSpace,
        pair: MappingPair,
        stage: str,
        x0: Point,
        direction: str,
        budget: Optional[int] = None,
    ) -> ConclusionCheck:
        """Run the solver and the oracle and compare them with the established conclusion."""
        solver_direction = "either" if direction == "monotone" else direction
        trace = SolverService.jungck_sequence(space, pair, x0, budget, direction=solver_direction)
        check = ConclusionCheck(stage=stage, trace_verdict=trace.verdict.kind)

        fixed: Optional[FixedPointResult] = None
        try:
            fixed = SolverService.extract_fixed_point(space, pair, trace)
            check.solver_point = fixed.coincidence_point
            check.common_fixed_point = fixed.common_fixed_point
        except NoCoincidenceException as exc:
            check.discrepancies.append(
                f"solver found no coincidence point (minimal d(Sx, Tx) = {exc.min_residual:.6g})"
                if exc.min_residual is not None and math.isfinite(exc.min_residual)
                else "solver found no coincidence point"
            )

        oracle: Optional[OracleResult] = None
        if space.enumerable:
            try:
                oracle = HypothesisService.coincidence_points_bruteforce(space, pair)
            except (NotCheckableException, BudgetExceededException):
                oracle = None
        check.oracle = oracle

        if oracle is not None:
            scope = f"among {oracle.points_examined} points"
            if not oracle.coincidence_points:
                check.discrepancies.append(f"brute force finds no coincidence point {scope}")
            if stage in ("common-fixed-point", "unique-common-fixed-point") and not oracle.common_fixed_points:
                check.discrepancies.append(f"brute force finds no common fixed point {scope}")
            if stage == "unique-point-of-coincidence" and len(oracle.points_of_coincidence) > 1:
                check.discrepancies.append(f"brute force finds {len(oracle.points_of_coincidence)} points of coincidence")
            if stage == "unique-coincidence-point" and len(oracle.coincidence_points) > 1:
                check.discrepancies.append(f"brute force finds {len(oracle.coincidence_points)} coincidence points")
            if stage == "unique-common-fixed-point":
                if len(oracle.common_fixed_points) > 1:
                    check.discrepancies.append(
                        f"brute force finds {len(oracle.common_fixed_points)} common fixed points"
                    )
                elif fixed is not None and oracle.common_fixed_points and fixed.common_fixed_point is not None:
                    if not space.same(fixed.common_fixed_point, oracle.common_fixed_points[0]):
                        check.discrepancies.append("solver and brute force disagree on the common fixed point")
        elif fixed is not None and stage in ("common-fixed-point", "unique-common-fixed-point"):
            if fixed.common_fixed_point is None:
                check.discrepancies.append("the point of coincidence found is not a common fixed point")

        if check.discrepancies:
            logger.warning("Conclusion %s not confirmed: %s", stage, "; ".join(check.discrepancies))
            for kind in ("T(X)", "S(X)"):
                diagnostic = HypothesisService.check_completeness(space, pair, Subspace(kind))
                check.diagnostics.append(diagnostic.model_copy(update={"name": f"diagnostic-{kind}-complete", "stage": "diagnostic"}))
        check.confirmed = not check.discrepancies
        return check


def _overall(entries: list[HypothesisEntry]) -> str:
    verdict = combine("overall", "overall", entries).verdict
    return "verified" if verdict == "asserted" else verdict
