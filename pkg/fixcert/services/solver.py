"""
Solver Service

Technical Explanation:
- jungck_sequence builds the T-S-sequence T x_n = S x_{n+1} from x0, choosing
  S-preimages deterministically:
  * finite / indexed spaces: the smallest index with S(i) = target
  * interval spaces: identity S, an explicit inverse expression, or
    bisection when S is declared monotone
- Iteration stops on a coincidence hit (T x_m = T x_{m+1}, so x_{m+1} is a
  coincidence point), on numeric Cauchy detection, on divergence or when a
  budget runs out; the verdict records which
- detect_cauchy applies the eps - phi(eps) rule to a recorded trace and
  checks the tail stays within eps of the detection point
- extract_fixed_point turns a trace into a coincidence point, the point of
  coincidence and, when it is one, a common fixed point; interval spaces
  without a usable trace fall back to minimising d(Sx, Tx)
"""

from __future__ import annotations

import logging
import math
from typing import Callable, Optional

import numpy as np
from scipy.optimize import bisect, brentq, minimize_scalar

from fixcert.core.config import settings
from fixcert.core.exceptions import (
    BudgetExceededException,
    DomainErrorException,
    InvalidEpsException,
    InvalidPointException,
    NoCoincidenceException,
    NoPreimageException,
)
from fixcert.models.contraction import ComparisonFn
from fixcert.models.mapping import MappingPair, safe_image
from fixcert.models.spaces import NumericIntervalSpace, OrderedMetricSpace, Point
from fixcert.schemas.reports import CauchyCheck, FixedPointResult, IterationTrace, TraceStep, TraceVerdict

logger = logging.getLogger("fixcert.solver")

DIRECTIONS = {
    "increasing": "increasing",
    "inc": "increasing",
    "decreasing": "decreasing",
    "dec": "decreasing",
    "either": "either",
}

_DIVERGENCE = (OverflowError, DomainErrorException, InvalidPointException)


def normalize_direction(direction: str) -> str:
    try:
        return DIRECTIONS[direction.strip().lower()]
    except KeyError:
        raise InvalidPointException(f"unknown direction {direction!r}; expected increasing, decreasing or either")


class PreimageSelector:
    """Deterministic S-preimage choice for one (space, pair)."""

    def __init__(self, space: OrderedMetricSpace, pair: MappingPair):
        self.space = space
        self.pair = pair
        self._inverse: Optional[dict[Point, Point]] = None

    def __call__(self, target: Point) -> Point:
        if isinstance(self.space, NumericIntervalSpace):
            return self._numeric(float(target))
        if self._inverse is None:
            self._inverse = {}
            for p in self.space.points():
                image = safe_image(self.space, self.pair, "S", p)
                if image is not None:
                    self._inverse.setdefault(image, p)
        try:
            return self._inverse[target]
        except KeyError:
            raise NoPreimageException(
                f"{self.space.describe(target)} has no S-preimage, so T(X) is not contained in S(X)",
                target=target,
            )

    def _numeric(self, target: float) -> float:
        space, pair = self.space, self.pair
        if pair.S_identity:
            return target
        tol = settings.SOLVE_TOL * max(1.0, abs(target))
        if pair.S_inverse is not None:
            try:
                x = space.validate_point(pair.S_inverse(target))
                if abs(pair.S(x) - target) <= max(tol, settings.FIXED_POINT_TOL * max(1.0, abs(target))):
                    return x
            except _DIVERGENCE:
                pass
            raise NoPreimageException(f"S_inverse gives no S-preimage of {target:.12g} in the space", target=target)
        if pair.S_monotone:
            lower, upper = space.search_bounds()

            def g(x: float) -> float:
                return pair.S(x) - target

            try:
                g_lower, g_upper = g(lower), g(upper)
            except _DIVERGENCE:
                raise NoPreimageException(f"S cannot be evaluated at the search bounds for {target:.12g}", target=target)
            if g_lower == 0:
                return space.validate_point(lower)
            if g_upper == 0:
                return space.validate_point(upper)
            if g_lower * g_upper > 0:
                raise NoPreimageException(f"{target:.12g} is outside S(X) on {space.interval_text()}", target=target)
            root = bisect(g, lower, upper, xtol=settings.SOLVE_TOL, maxiter=500)
            try:
                return space.validate_point(root)
            except InvalidPointException:
                raise NoPreimageException(f"S-preimage {root:.12g} of {target:.12g} lies outside the space", target=target)
        raise NoPreimageException(
            "S has no declared inverse and is not declared monotone; cannot select an S-preimage",
            target=target,
        )


def _residual(space: OrderedMetricSpace, pair: MappingPair, x: Point) -> float:
    return space.metric(pair.apply_S(space, x), pair.apply_T(space, x))


class SolverService:
    @staticmethod
    def preimage(space: OrderedMetricSpace, pair: MappingPair, target: Point) -> Point:
        return PreimageSelector(space, pair)(target)

    @staticmethod
    def resolve_direction(space: OrderedMetricSpace, pair: MappingPair, x0: Point, direction: str) -> Optional[str]:
        """Direction whose x0 condition holds (increasing first), or None."""
        direction = normalize_direction(direction)
        Sx0, Tx0 = pair.apply_S(space, x0), pair.apply_T(space, x0)
        candidates = ("increasing", "decreasing") if direction == "either" else (direction,)
        for candidate in candidates:
            holds = space.leq(Sx0, Tx0) if candidate == "increasing" else space.leq(Tx0, Sx0)
            if holds:
                return candidate
        return None

    @staticmethod
    def jungck_sequence(
        space: OrderedMetricSpace,
        pair: MappingPair,
        x0: Point,
        budget: Optional[int] = None,
        direction: str = "increasing",
    ) -> IterationTrace:
        budget = settings.DEFAULT_BUDGET if budget is None else int(budget)
        if budget < 1:
            raise InvalidPointException("budget must be a positive integer")
        x0 = space.validate_point(x0)
        resolved = SolverService.resolve_direction(space, pair, x0, direction)
        if resolved is None:
            relation = {"increasing": "S x0 <= T x0", "decreasing": "S x0 >= T x0"}.get(
                normalize_direction(direction), "S x0 comparable to T x0"
            )
            logger.info("Precondition %s fails at x0=%s", relation, space.describe(x0))
            return IterationTrace(
                x0=x0,
                direction=normalize_direction(direction),
                budget=budget,
                verdict=TraceVerdict(kind="PreconditionFailed", reason=f"{relation} does not hold"),
            )

        numeric = isinstance(space, NumericIntervalSpace)
        select = PreimageSelector(space, pair)
        steps: list[TraceStep] = []
        x = x0
        Sx, Tx = pair.apply_S(space, x), pair.apply_T(space, x)
        verdict: Optional[TraceVerdict] = None

        for n in range(budget):
            try:
                x_next = select(Tx)
                S_next, T_next = pair.apply_S(space, x_next), pair.apply_T(space, x_next)
                gap = space.metric(Tx, T_next)
                if numeric and not all(math.isfinite(v) for v in (x_next, T_next, gap)):
                    raise OverflowError("non-finite iterate")
            except BudgetExceededException as exc:
                steps.append(TraceStep(n=n, x=x, Sx=Sx, Tx=Tx))
                verdict = TraceVerdict(
                    kind="NoCoincidenceWithinBudget",
                    n=n,
                    reason=f"space budget exceeded at index {exc.index}",
                )
                break
            except _DIVERGENCE as exc:
                steps.append(TraceStep(n=n, x=x, Sx=Sx, Tx=Tx))
                verdict = TraceVerdict(kind="Diverged", n=n, reason=f"iteration left the space: {exc}")
                break

            steps.append(TraceStep(n=n, x=x, Sx=Sx, Tx=Tx, gap=gap))
            logger.debug("step %s: x=%s Tx=%s gap=%s", n, space.describe(x), space.describe(Tx), gap)

            if Tx == T_next:
                steps.append(TraceStep(n=n + 1, x=x_next, Sx=S_next, Tx=T_next))
                verdict = TraceVerdict(kind="CoincidenceHit", n=n, candidate=x_next)
                break
            if numeric and gap <= settings.SOLVE_TOL * max(1.0, abs(Tx)):
                steps.append(TraceStep(n=n + 1, x=x_next, Sx=S_next, Tx=T_next))
                verdict = TraceVerdict(kind="CauchyDetected", n=n, candidate=x_next)
                break
            x, Sx, Tx = x_next, S_next, T_next

        if verdict is None:
            steps.append(TraceStep(n=budget, x=x, Sx=Sx, Tx=Tx))
            verdict = TraceVerdict(kind="NoCoincidenceWithinBudget", n=budget, reason="iteration budget exhausted")

        residual = None
        if verdict.candidate is not None:
            residual = _residual(space, pair, verdict.candidate)
        logger.info(
            "T-S-sequence from %s (%s): %s after %s steps",
            space.describe(x0),
            resolved,
            verdict.kind,
            len(steps),
        )
        return IterationTrace(
            x0=x0,
            direction=resolved,
            budget=budget,
            steps=steps,
            verdict=verdict,
            residual=residual,
        )

    @staticmethod
    def detect_cauchy(
        trace: IterationTrace,
        phi: ComparisonFn,
        eps: float,
        space: Optional[OrderedMetricSpace] = None,
    ) -> CauchyCheck:
        """
        First n with d(Tx_n, Tx_{n+1}) < eps - phi(eps); every later Tx must
        stay within eps of Tx_n, and indices where it does not are listed.
        """
        if not eps > 0:
            raise InvalidEpsException(f"eps must be positive, got {eps}")
        phi_eps = phi(eps)
        if phi_eps >= eps:
            raise InvalidEpsException(f"phi(eps) = {phi_eps:g} is not below eps = {eps:g}")
        threshold = eps - phi_eps
        distance: Callable[[Point, Point], float] = space.metric if space is not None else (lambda a, b: abs(a - b))

        for step in trace.steps:
            if step.gap is not None and step.gap < threshold:
                anchor = step.Tx
                violations = [
                    later.n for later in trace.steps[step.n + 1 :] if not distance(later.Tx, anchor) < eps
                ]
                return CauchyCheck(
                    eps=eps,
                    threshold=threshold,
                    detected=True,
                    index=step.n,
                    containment_violations=violations,
                )
        return CauchyCheck(eps=eps, threshold=threshold, detected=False)

    @staticmethod
    def _refine_numeric(space: NumericIntervalSpace, pair: MappingPair, candidate: float) -> float:
        """Root of S - T bracketed around candidate, or candidate itself."""

        def g(x: float) -> float:
            return pair.S(x) - pair.T(x)

        delta = 1e-6 * max(1.0, abs(candidate))
        for _ in range(12):
            a, b = candidate - delta, candidate + delta
            if space.contains(a) and space.contains(b):
                try:
                    ga, gb = g(a), g(b)
                except _DIVERGENCE:
                    break
                if ga == 0:
                    return a
                if gb == 0:
                    return b
                if ga * gb < 0:
                    return float(brentq(g, a, b, xtol=settings.SOLVE_TOL))
            delta *= 4
        return candidate

    @staticmethod
    def residual_scan(space: NumericIntervalSpace, pair: MappingPair) -> tuple[np.ndarray, np.ndarray]:
        """Grid points of the interval and d(Sx, Tx) on them (inf where undefined)."""
        lower, upper = space.search_bounds()
        grid = np.array([x for x in np.linspace(lower, upper, settings.SEARCH_GRID) if space.contains(float(x))])
        residuals = np.full(grid.shape, np.inf)
        for i, x in enumerate(grid):
            try:
                residuals[i] = _residual(space, pair, float(x))
            except _DIVERGENCE:
                continue
        return grid, residuals

    @staticmethod
    def _polish(space: NumericIntervalSpace, pair: MappingPair, grid: np.ndarray, residuals: np.ndarray, i: int) -> tuple[float, float]:
        a = float(grid[max(i - 1, 0)])
        b = float(grid[min(i + 1, len(grid) - 1)])
        best_x, best_r = float(grid[i]), float(residuals[i])
        if a < b:

            def objective(x: float) -> float:
                try:
                    return _residual(space, pair, x)
                except _DIVERGENCE:
                    return math.inf

            result = minimize_scalar(objective, bounds=(a, b), method="bounded", options={"xatol": 1e-10})
            if result.success and float(result.fun) < best_r:
                best_x, best_r = float(result.x), float(result.fun)
        return best_x, best_r

    @staticmethod
    def minimize_residual(space: NumericIntervalSpace, pair: MappingPair) -> tuple[float, float]:
        """(argmin, min) of d(Sx, Tx) over the interval's search window."""
        grid, residuals = SolverService.residual_scan(space, pair)
        if not len(grid) or not np.isfinite(residuals).any():
            raise NoCoincidenceException("d(Sx, Tx) cannot be evaluated anywhere on the interval")
        return SolverService._polish(space, pair, grid, residuals, int(np.argmin(residuals)))

    @staticmethod
    def locate_coincidences(
        space: OrderedMetricSpace,
        pair: MappingPair,
        tol: Optional[float] = None,
    ) -> list[Point]:
        """
        Coincidence points: exact enumeration on enumerable spaces, local
        minima of d(Sx, Tx) polished below tol on interval spaces.
        """
        tol = settings.FIXED_POINT_TOL if tol is None else tol
        if not isinstance(space, NumericIntervalSpace):
            return [
                p
                for p in space.points()
                if (s := safe_image(space, pair, "S", p)) is not None
                and (t := safe_image(space, pair, "T", p)) is not None
                and space.same(s, t)
            ]
        grid, residuals = SolverService.residual_scan(space, pair)
        found: list[float] = []
        for i in range(len(grid)):
            left = residuals[i - 1] if i > 0 else math.inf
            right = residuals[i + 1] if i + 1 < len(grid) else math.inf
            if not (residuals[i] <= left and residuals[i] <= right and math.isfinite(residuals[i])):
                continue
            x, r = SolverService._polish(space, pair, grid, residuals, i)
            if r <= tol and not any(abs(x - y) <= 1e-6 * max(1.0, abs(y)) for y in found):
                found.append(x)
        return found

    @staticmethod
    def extract_fixed_point(
        space: OrderedMetricSpace,
        pair: MappingPair,
        trace: IterationTrace,
        tol: Optional[float] = None,
    ) -> FixedPointResult:
        tol = settings.FIXED_POINT_TOL if tol is None else tol
        verdict = trace.verdict
        source = "trace"

        if verdict.kind in ("CoincidenceHit", "CauchyDetected") and verdict.candidate is not None:
            x = verdict.candidate
            if isinstance(space, NumericIntervalSpace):
                x = SolverService._refine_numeric(space, pair, float(x))
            residual = _residual(space, pair, x)
        elif isinstance(space, NumericIntervalSpace):
            x, residual = SolverService.minimize_residual(space, pair)
            source = "search"
        else:
            points = [p for p in space.points() if safe_image(space, pair, "T", p) is not None]
            residuals = {p: _residual(space, pair, p) for p in points if safe_image(space, pair, "S", p) is not None}
            if not residuals:
                raise NoCoincidenceException("no point of the space has both images materialised")
            # exact coincidences first
            x = min(residuals, key=lambda p: (not pair.is_coincidence(space, p), residuals[p], p))
            residual = residuals[x]
            source = "search"

        numeric = isinstance(space, NumericIntervalSpace)
        coincident = residual <= tol if numeric else pair.is_coincidence(space, x)
        if not coincident:
            logger.info("No coincidence point: minimal residual %.12g at %s", residual, space.describe(x))
            raise NoCoincidenceException(
                f"no coincidence point: minimal d(Sx, Tx) = {residual:.12g} at x = {space.describe(x)}",
                min_residual=residual,
                argmin=x,
            )

        z = pair.apply_T(space, x)
        weakly = SolverService.commutes_at(space, pair, x)
        common = None
        common_residual = None
        Tz, Sz = safe_image(space, pair, "T", z), safe_image(space, pair, "S", z)
        if Tz is not None and Sz is not None:
            r = max(space.metric(Tz, z), space.metric(Sz, z))
            if (r <= tol) if numeric else (space.same(Tz, z) and space.same(Sz, z)):
                common, common_residual = z, r
        return FixedPointResult(
            coincidence_point=x,
            point_of_coincidence=z,
            residual=residual,
            weakly_compatible_at_point=weakly,
            common_fixed_point=common,
            common_fixed_point_residual=common_residual,
            source=source,
        )

    @staticmethod
    def commutes_at(space: OrderedMetricSpace, pair: MappingPair, x: Point) -> bool:
        """S(Tx) = T(Sx)."""
        Tx, Sx = safe_image(space, pair, "T", x), safe_image(space, pair, "S", x)
        if Tx is None or Sx is None:
            return False
        STx, TSx = safe_image(space, pair, "S", Tx), safe_image(space, pair, "T", Sx)
        if STx is None or TSx is None:
            return False
        if isinstance(space, NumericIntervalSpace):
            return space.metric(STx, TSx) <= settings.FIXED_POINT_TOL * max(1.0, abs(STx))
        return space.same(STx, TSx)
