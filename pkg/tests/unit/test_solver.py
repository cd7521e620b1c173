from __future__ import annotations

import pytest

from fixcert.core.exceptions import InvalidEpsException, InvalidPointException, NoCoincidenceException, NoPreimageException
from fixcert.core.expr import Expr
from fixcert.models.contraction import ComparisonFn
from fixcert.models.mapping import MappingPair
from fixcert.models.spaces import FiniteOrderedMetricSpace, NumericIntervalSpace
from fixcert.services.solver import SolverService, normalize_direction
from tests import oracles


def _interval_pair(T: str, S: str, **kwargs) -> MappingPair:
    inverse = kwargs.pop("s_inverse", None)
    return MappingPair.from_expressions(
        Expr.parse(T),
        Expr.parse(S),
        s_inverse=Expr.parse(inverse) if inverse else None,
        **kwargs,
    )


@pytest.fixture
def chain_pair():
    # T = (b, c, c), S = identity
    return MappingPair.from_tables([1, 2, 2], [0, 1, 2])


@pytest.fixture
def counterexample_pair():
    return MappingPair.from_index_expressions(Expr.parse("i + 2"), Expr.parse("i + 1"))


class TestDirections:
    @pytest.mark.parametrize(("alias", "expected"), [("inc", "increasing"), ("DEC", "decreasing"), ("either", "either")])
    def test_aliases(self, alias, expected):
        assert normalize_direction(alias) == expected

    def test_unknown(self):
        with pytest.raises(InvalidPointException):
            normalize_direction("sideways")

    def test_either_prefers_increasing(self, chain_space, chain_pair):
        assert SolverService.resolve_direction(chain_space, chain_pair, 0, "either") == "increasing"
        assert SolverService.resolve_direction(chain_space, chain_pair, 0, "decreasing") is None


class TestPreimage:
    def test_smallest_index_wins(self, chain_space):
        pair = MappingPair.from_tables([0, 0, 0], [0, 2, 2])
        assert SolverService.preimage(chain_space, pair, 2) == 1

    def test_missing_preimage(self, chain_space):
        pair = MappingPair.from_tables([0, 0, 0], [0, 0, 2])
        with pytest.raises(NoPreimageException):
            SolverService.preimage(chain_space, pair, 1)

    def test_explicit_inverse(self):
        space = NumericIntervalSpace(0.0, float("inf"))
        pair = _interval_pair("x^2 + 1", "2*x/3", s_inverse="3*x/2")
        assert SolverService.preimage(space, pair, 2.0) == pytest.approx(3.0)

    def test_bisection_for_monotone_S(self):
        space = NumericIntervalSpace(0.0, 10.0)
        pair = _interval_pair("x/2", "x^3", s_monotone=True)
        assert SolverService.preimage(space, pair, 8.0) == pytest.approx(2.0, abs=1e-9)

    def test_undeclared_inverse(self):
        space = NumericIntervalSpace(0.0, 10.0)
        with pytest.raises(NoPreimageException):
            SolverService.preimage(space, _interval_pair("x/2", "x^3"), 8.0)


class TestJungckSequence:
    def test_finite_chain_hits_a_coincidence(self, chain_space, chain_pair):
        trace = SolverService.jungck_sequence(chain_space, chain_pair, 0)
        assert trace.direction == "increasing"
        assert trace.verdict.kind == "CoincidenceHit"
        assert trace.verdict.n == 1
        assert trace.verdict.candidate == 2
        assert [step.x for step in trace.steps] == [0, 1, 2]
        assert trace.residual == 0.0

    def test_matches_the_reference_sequence(self, chain_space, chain_pair):
        trace = SolverService.jungck_sequence(chain_space, chain_pair, 0)
        expected = oracles.ts_sequence([0, 1, 2], lambda p: [0, 1, 2][p], lambda p: [1, 2, 2][p], 0, 2)
        assert [step.x for step in trace.steps] == expected

    def test_counterexample_runs_out_of_space(self, counterexample_space, counterexample_pair):
        trace = SolverService.jungck_sequence(counterexample_space, counterexample_pair, 1)
        assert trace.verdict.kind == "NoCoincidenceWithinBudget"
        assert trace.verdict.n == 61
        assert "index 65" in trace.verdict.reason
        gaps = trace.gaps()
        assert all(later < earlier for earlier, later in zip(gaps, gaps[1:]))

    def test_iteration_budget(self, counterexample_space, counterexample_pair):
        trace = SolverService.jungck_sequence(counterexample_space, counterexample_pair, 1, budget=5)
        assert trace.verdict.kind == "NoCoincidenceWithinBudget"
        assert trace.verdict.n == 5
        assert trace.verdict.reason == "iteration budget exhausted"

    def test_precondition_failure_is_a_verdict(self, chain_space):
        pair = MappingPair.from_tables([0, 0, 0], [0, 1, 2])
        trace = SolverService.jungck_sequence(chain_space, pair, 2, direction="increasing")
        assert trace.verdict.kind == "PreconditionFailed"
        assert trace.steps == []

    def test_bad_budget(self, chain_space, chain_pair):
        with pytest.raises(InvalidPointException):
            SolverService.jungck_sequence(chain_space, chain_pair, 0, budget=0)

    def test_numeric_cauchy_detection(self):
        space = NumericIntervalSpace(0.0, 1.0)
        trace = SolverService.jungck_sequence(space, _interval_pair("x/3", "x"), 0.9, direction="decreasing")
        assert trace.verdict.kind == "CauchyDetected"
        assert trace.verdict.candidate == pytest.approx(0.0, abs=1e-9)

    def test_divergence(self):
        space = NumericIntervalSpace(0.0, float("inf"))
        pair = _interval_pair("x^2 + 1", "2*x/3", s_inverse="3*x/2")
        trace = SolverService.jungck_sequence(space, pair, 0.0)
        assert trace.verdict.kind == "Diverged"


class TestCauchy:
    def test_detected_without_containment_violations(self):
        space = NumericIntervalSpace(0.0, 1.0)
        trace = SolverService.jungck_sequence(space, _interval_pair("x/3", "x"), 0.9, direction="decreasing")
        check = SolverService.detect_cauchy(trace, ComparisonFn.linear(0.5), 1e-3, space)
        assert check.detected
        assert check.threshold == pytest.approx(5e-4)
        assert check.containment_violations == []
        assert trace.steps[check.index].gap < check.threshold

    def test_not_detected_on_a_short_trace(self, chain_space):
        pair = MappingPair.from_tables([1, 2, 2], [0, 1, 2])
        trace = SolverService.jungck_sequence(chain_space, pair, 0, budget=1)
        check = SolverService.detect_cauchy(trace, ComparisonFn.linear(0.5), 0.1, chain_space)
        assert not check

    @pytest.mark.parametrize(("k", "eps"), [(0.5, 0.0), (0.5, -1.0), (1.0, 0.1), (2.0, 0.1)])
    def test_invalid_eps(self, chain_space, k, eps):
        trace = SolverService.jungck_sequence(chain_space, MappingPair.from_tables([1, 2, 2], [0, 1, 2]), 0)
        with pytest.raises(InvalidEpsException):
            SolverService.detect_cauchy(trace, ComparisonFn.linear(k), eps)


class TestExtraction:
    def test_common_fixed_point_from_trace(self, chain_space, chain_pair):
        trace = SolverService.jungck_sequence(chain_space, chain_pair, 0)
        result = SolverService.extract_fixed_point(chain_space, chain_pair, trace)
        assert result.coincidence_point == 2
        assert result.point_of_coincidence == 2
        assert result.common_fixed_point == 2
        assert result.weakly_compatible_at_point
        assert result.source == "trace"

    def test_coincidence_without_common_fixed_point(self):
        space = FiniteOrderedMetricSpace.chain([0.0, 1.0, 2.0], ["a", "b", "c"])
        # T a = S a = b, but T b = c
        pair = MappingPair.from_tables([1, 2, 2], [1, 0, 2])
        trace = SolverService.jungck_sequence(space, pair, 0, budget=1)
        assert trace.verdict.kind == "CoincidenceHit"
        result = SolverService.extract_fixed_point(space, pair, trace)
        assert result.coincidence_point == 0
        assert result.point_of_coincidence == 1
        assert result.common_fixed_point is None
        assert not result.weakly_compatible_at_point
        assert sorted(SolverService.locate_coincidences(space, pair)) == [0, 2]

    def test_discrete_near_misses_are_not_coincidences(self, counterexample_space, counterexample_pair):
        trace = SolverService.jungck_sequence(counterexample_space, counterexample_pair, 1)
        with pytest.raises(NoCoincidenceException) as info:
            SolverService.extract_fixed_point(counterexample_space, counterexample_pair, trace)
        assert info.value.argmin == 62
        assert info.value.min_residual > 0
        assert info.value.exit_code == 2

    def test_numeric_refinement(self):
        space = NumericIntervalSpace(0.0, 1.0)
        pair = _interval_pair("x/3", "x")
        trace = SolverService.jungck_sequence(space, pair, 0.9, direction="decreasing")
        result = SolverService.extract_fixed_point(space, pair, trace)
        assert result.common_fixed_point == pytest.approx(0.0, abs=1e-9)

    def test_residual_search_reports_the_minimum(self):
        space = NumericIntervalSpace(0.0, float("inf"))
        pair = _interval_pair("x^2 + 1", "2*x/3", s_inverse="3*x/2")
        trace = SolverService.jungck_sequence(space, pair, 0.0)
        with pytest.raises(NoCoincidenceException) as info:
            SolverService.extract_fixed_point(space, pair, trace)
        assert "0.333333" in info.value.message
        x, r = SolverService.minimize_residual(space, pair)
        assert x == pytest.approx(1 / 3, rel=1e-5)
        assert r == pytest.approx(8 / 9, rel=1e-6)

    def test_search_finds_a_root_when_the_trace_fails(self):
        space = NumericIntervalSpace(-5.0, 5.0)
        # coincidence points of x^2 and 4: x = -2 and x = 2
        pair = _interval_pair("4", "x^2")
        found = SolverService.locate_coincidences(space, pair)
        assert sorted(round(x, 6) for x in found) == [-2.0, 2.0]


def test_locate_coincidences_agrees_with_the_double_loop(chain_space):
    tables = ([1, 1, 2], [0, 1, 0])
    pair = MappingPair.from_tables(*tables)
    expected = oracles.coincidences([0, 1, 2], lambda p: tables[1][p], lambda p: tables[0][p])
    assert SolverService.locate_coincidences(chain_space, pair) == expected


class TestGapEnvelope:
    def test_example_trace_reaches_zero(self, load_problem):
        problem = load_problem("example_3_4")
        trace = SolverService.jungck_sequence(problem.space, problem.pair, 0.9, direction="decreasing")
        assert trace.verdict.kind == "CauchyDetected"
        assert trace.verdict.n + 1 <= 25
        assert abs(trace.steps[-1].x) <= 1e-9
        xs = [step.x for step in trace.steps]
        for n, (x, x_next) in enumerate(zip(xs, xs[1:])):
            assert abs(x - x_next) == pytest.approx(0.6 * 3.0**-n, rel=1e-9)
        # gap n is d(T x_n, T x_{n+1}) = d(x_{n+1}, x_{n+2})
        for n, gap in enumerate(trace.gaps()):
            assert gap == pytest.approx(0.6 * 3.0 ** -(n + 1), rel=1e-9)

        result = SolverService.extract_fixed_point(problem.space, problem.pair, trace)
        assert result.common_fixed_point == pytest.approx(0.0, abs=1e-9)
        assert result.residual <= 1e-9

    def test_example_trace_stays_under_phi(self, load_problem):
        problem = load_problem("example_3_4")
        trace = SolverService.jungck_sequence(problem.space, problem.pair, 0.9, direction="decreasing")
        assert len(trace.gaps()) > 20
        assert oracles.envelope_violations(trace.gaps(), problem.contraction.companion) == []

    def test_counterexample_trace_stays_under_phi(self, counterexample_space, counterexample_pair):
        trace = SolverService.jungck_sequence(counterexample_space, counterexample_pair, 1)
        assert len(trace.gaps()) > 50
        assert oracles.envelope_violations(trace.gaps(), ComparisonFn.linear(0.25)) == []

    def test_envelope_catches_a_slow_gap(self):
        assert oracles.envelope_violations([1.0, 0.5, 0.3], ComparisonFn.linear(0.5)) == [2]
