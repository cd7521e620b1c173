"""
Problem Building

Technical Explanation:
- Turns a parsed ProblemConfig into live domain objects: the space, the
  mapping pair, the implicit contraction and the run parameters
- Point tokens in the [run] block are read per flavor: labels on finite
  spaces, indices on indexed spaces, reals on interval spaces
- Command-line flags override [run] values through Problem.with_overrides
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional, Sequence

from fixcert.core.config import settings
from fixcert.core.exceptions import (
    ConfigException,
    FixCertException,
    InvalidEpsException,
    InvalidPointException,
    NoCoincidenceException,
)
from fixcert.models.contraction import ComparisonFn, Condition, HalfComparisonFn, ImplicitContraction
from fixcert.models.mapping import MappingPair
from fixcert.models.spaces import (
    FiniteOrderedMetricSpace,
    IndexedSequenceSpace,
    NumericIntervalSpace,
    OrderedMetricSpace,
    Point,
    Subspace,
)
from fixcert.repositories.catalog import CatalogRepository
from fixcert.schemas.config import ContractionBlock, MappingsBlock, ProblemConfig, SpaceBlock
from fixcert.schemas.reports import HypothesisReport, SolveResult
from fixcert.services.certifier import CertifierService, normalize_variant
from fixcert.services.config_format import parse_config, parse_contraction_spec
from fixcert.services.solver import SolverService

logger = logging.getLogger("fixcert.cli")


@dataclass(frozen=True)
class Problem:
    space: OrderedMetricSpace
    pair: Optional[MappingPair]
    contraction: Optional[ImplicitContraction]
    variant: Optional[str] = None
    direction: str = "increasing"
    x0: Optional[Point] = None
    budget: Optional[int] = None
    eps: Optional[float] = None
    E: Subspace = Subspace()
    tol: Optional[float] = None

    def with_overrides(self, **overrides) -> "Problem":
        """Replace the fields given with a non-None value."""
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})

    def require_pair(self) -> MappingPair:
        if self.pair is None:
            raise ConfigException("this command needs a [mappings] block")
        return self.pair

    def require_contraction(self) -> ImplicitContraction:
        if self.contraction is None:
            raise ConfigException("this command needs a [contraction] block or --contraction")
        return self.contraction


class ProblemService:
    @staticmethod
    def build_space(block: SpaceBlock) -> OrderedMetricSpace:
        if block.flavor == "finite":
            if block.values:
                return FiniteOrderedMetricSpace.chain(block.values, block.points, asserted=block.asserted)
            index = {label: i for i, label in enumerate(block.points)}
            return FiniteOrderedMetricSpace(
                block.points,
                block.metric,
                [(index[a], index[b]) for a, b in block.order],
                close_order=block.close_order,
                asserted=block.asserted,
            )
        if block.flavor == "indexed":
            expr = block.value
            return IndexedSequenceSpace(
                lambda i: expr.evaluate({"i": i}),
                budget=settings.INDEXED_SAMPLE_LIMIT if block.budget is None else block.budget,
                overrides=block.overrides,
                label=block.label,
                asserted=block.asserted,
            )
        relation = block.relation
        order = None if relation is None else (lambda x, y: bool(relation.evaluate({"x": x, "y": y})))
        return NumericIntervalSpace(
            block.lower,
            block.upper,
            lower_closed=block.lower_closed,
            upper_closed=block.upper_closed,
            order=order,
            order_label="usual" if relation is None else relation.source,
            asserted=block.asserted,
        )

    @staticmethod
    def build_pair(space: OrderedMetricSpace, block: MappingsBlock) -> MappingPair:
        if isinstance(space, FiniteOrderedMetricSpace):
            return MappingPair.from_tables(block.T_table, block.S_table)
        if isinstance(space, IndexedSequenceSpace):
            return MappingPair.from_index_expressions(block.T, block.S)
        return MappingPair.from_expressions(block.T, block.S, s_inverse=block.S_inverse, s_monotone=block.S_monotone)

    @staticmethod
    def build_contraction(block: ContractionBlock) -> ImplicitContraction:
        if block.id is not None:
            return CatalogRepository.get(block.id, block.params)
        phi = ComparisonFn.from_expr(block.phi) if block.phi is not None else None
        rho = HalfComparisonFn.from_expr(block.rho) if block.rho is not None else None
        functions = {}
        if phi is not None:
            functions["psi"] = phi
        if rho is not None:
            functions["rho"] = rho
        return ImplicitContraction.from_expr(
            block.F,
            functions=functions,
            companion=phi or (rho.doubled() if rho is not None else None),
            claims=frozenset(Condition.parse(c) for c in block.claims),
            rho=rho,
        )

    @staticmethod
    def contraction_from_spec(spec: str) -> ImplicitContraction:
        entry_id, params = parse_contraction_spec(spec)
        return CatalogRepository.get(entry_id, params)

    @staticmethod
    def point(space: OrderedMetricSpace, token: str) -> Point:
        """A [run] point token read in the space's own terms."""
        try:
            if isinstance(space, FiniteOrderedMetricSpace):
                return space.index_of(token)
            if isinstance(space, IndexedSequenceSpace):
                return space.validate_point(int(token))
            return space.validate_point(float(token))
        except ValueError:
            raise InvalidPointException(f"{token!r} is not a point of the {space.flavor} space")

    @staticmethod
    def build(config: ProblemConfig) -> Problem:
        space = ProblemService.build_space(config.space)
        pair = ProblemService.build_pair(space, config.mappings) if config.mappings is not None else None
        contraction = ProblemService.build_contraction(config.contraction) if config.contraction else None
        run = config.run
        x0 = ProblemService.point(space, run.x0) if run.x0 is not None else None
        if run.E == "points":
            E = Subspace.of_points(ProblemService.point(space, p) for p in run.E_points)
        else:
            E = Subspace(run.E)
        logger.debug("Built %s space with contraction %s", space.flavor, contraction.id if contraction else None)
        return Problem(
            space=space,
            pair=pair,
            contraction=contraction,
            variant=run.variant,
            direction=run.direction,
            x0=x0,
            budget=run.budget,
            eps=run.eps,
            E=E,
            tol=run.tol,
        )

    @staticmethod
    def with_run_overrides(
        problem: Problem,
        *,
        direction: Optional[str] = None,
        budget: Optional[int] = None,
        x0: Optional[str] = None,
        variant: Optional[str] = None,
    ) -> Problem:
        """Apply command-line or request overrides; x0 is a point token read in the space's terms."""
        point = ProblemService.point(problem.space, x0) if x0 else None
        return problem.with_overrides(direction=direction, budget=budget, x0=point, variant=variant)

    @staticmethod
    def from_text(text: str) -> Problem:
        return ProblemService.build(parse_config(text))

    @staticmethod
    def load(path: str | Path) -> Problem:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigException(f"cannot read config {path}: {exc.strerror or exc}")
        return ProblemService.from_text(text)

    @staticmethod
    def solve(problem: Problem, eps: Optional[Sequence[float]] = None) -> SolveResult:
        """
        Run the T-S-sequence of a problem and extract its coincidence point

        Technical Note:
        - Cauchy checks need the contraction's companion phi; explicit eps values
          (argument, then [run] eps) must satisfy 0 < phi(eps) < eps, while the
          default ladder silently skips rungs that do not
        - A failed precondition or a missing coincidence point is reported in
          the result, not raised
        """
        pair = problem.require_pair()
        direction, x0 = CertifierService.resolve(problem.space, pair, problem.x0, problem.direction)
        if x0 is None:
            raise FixCertException("no initial point given and none found; pass x0", status_code=400)
        trace = SolverService.jungck_sequence(
            problem.space,
            pair,
            x0,
            problem.budget,
            direction="either" if direction == "monotone" else direction,
        )

        checks = []
        companion = problem.contraction.companion if problem.contraction is not None else None
        if companion is not None:
            explicit = list(eps) if eps else ([problem.eps] if problem.eps is not None else None)
            for value in explicit or settings.EPS_LADDER:
                try:
                    checks.append(SolverService.detect_cauchy(trace, companion, value, problem.space))
                except InvalidEpsException:
                    if explicit:
                        raise
                    logger.debug("eps %s skipped: phi(eps) >= eps", value)

        result = SolveResult(trace=trace, cauchy=checks)
        if trace.verdict.kind == "PreconditionFailed":
            return result
        try:
            result.fixed_point = SolverService.extract_fixed_point(problem.space, pair, trace, problem.tol)
        except NoCoincidenceException as exc:
            result.error = exc.message
        return result

    @staticmethod
    def certify(problem: Problem, *, confirm: bool = True) -> HypothesisReport:
        return CertifierService.certify(
            problem.space,
            problem.require_pair(),
            problem.require_contraction(),
            normalize_variant(problem.variant or "main-regular"),
            problem.E,
            problem.x0,
            problem.direction,
            budget=problem.budget,
            confirm=confirm,
        )
