from __future__ import annotations

import pytest

from fixcert.core.exceptions import NotCheckableException
from fixcert.core.expr import Expr
from fixcert.models.mapping import MappingPair
from fixcert.models.spaces import FiniteOrderedMetricSpace, NumericIntervalSpace, Subspace
from fixcert.services.hypotheses import HypothesisService, combine, entry
from tests import oracles

DISCRETE = [[0, 1, 1], [1, 0, 1], [1, 1, 0]]


def tables(T, S):
    return MappingPair.from_tables(T, S)


@pytest.fixture
def antichain():
    return FiniteOrderedMetricSpace(["p", "q", "r"], DISCRETE)


@pytest.fixture
def counterexample_pair():
    return MappingPair.from_index_expressions(Expr.parse("i + 2"), Expr.parse("i + 1"))


def test_check_x0(chain_space):
    assert HypothesisService.check_x0(chain_space, tables([1, 2, 2], [0, 1, 2]), 0, "increasing").verdict == "verified"
    failed = HypothesisService.check_x0(chain_space, tables([0, 0, 0], [0, 1, 2]), 2, "increasing")
    assert failed.verdict == "counterexample"
    assert failed.witness == {"x0": 2, "Sx0": 2, "Tx0": 0}
    assert HypothesisService.check_x0(chain_space, tables([0, 0, 0], [0, 1, 2]), 2, "monotone").verdict == "verified"


def test_find_x0(chain_space):
    assert HypothesisService.find_x0(chain_space, tables([0, 0, 0], [0, 1, 2]), "increasing") == 0
    assert HypothesisService.find_x0(chain_space, tables([0, 0, 0], [1, 2, 2]), "increasing") is None


class TestSIncreasing:
    def test_verified_on_a_chain(self, chain_space):
        assert HypothesisService.check_S_increasing(chain_space, tables([1, 2, 2], [0, 1, 2])).verdict == "verified"

    def test_counterexample(self, chain_space):
        result = HypothesisService.check_S_increasing(chain_space, tables([2, 1, 1], [0, 1, 2]))
        assert result.verdict == "counterexample"
        assert (result.witness["x"], result.witness["y"]) == (0, 1)

    def test_interval_needs_an_assertion(self):
        pair = MappingPair.from_expressions(Expr.parse("x/3"), Expr.parse("x"))
        with pytest.raises(NotCheckableException):
            HypothesisService.check_S_increasing(NumericIntervalSpace(0.0, 1.0), pair)
        asserted = NumericIntervalSpace(0.0, 1.0, asserted=["S_increasing"])
        assert HypothesisService.check_S_increasing(asserted, pair).verdict == "asserted"

    def test_sampled_refutation_beats_an_assertion(self):
        pair = MappingPair.from_expressions(Expr.parse("-x"), Expr.parse("x"))
        asserted = NumericIntervalSpace(-1.0, 1.0, asserted=["S_increasing"])
        assert HypothesisService.check_S_increasing(asserted, pair).verdict == "counterexample"


class TestRangeInclusion:
    def test_identity_S(self, chain_space):
        result = HypothesisService.check_range_inclusion(chain_space, tables([1, 2, 2], [0, 1, 2]), Subspace())
        assert result.verdict == "verified"

    def test_T_image_outside_S_image(self, chain_space):
        result = HypothesisService.check_range_inclusion(chain_space, tables([1, 1, 1], [0, 0, 2]), Subspace("T(X)"))
        assert result.verdict == "counterexample"
        assert result.witness == {"inclusion": "T(X) ⊆ S(X)", "e": 1}

    def test_explicit_points_must_contain_T(self, chain_space):
        result = HypothesisService.check_range_inclusion(
            chain_space, tables([1, 2, 2], [0, 1, 2]), Subspace.of_points([1, 2])
        )
        assert result.verdict == "verified"
        result = HypothesisService.check_range_inclusion(
            chain_space, tables([1, 2, 2], [0, 1, 2]), Subspace.of_points([2])
        )
        assert result.verdict == "counterexample"
        assert result.witness["Tx"] == 1

    def test_numeric_inverse_is_sampled(self):
        pair = MappingPair.from_expressions(Expr.parse("x/2 + 1"), Expr.parse("x/2"), s_inverse=Expr.parse("2*x"))
        result = HypothesisService.check_range_inclusion(NumericIntervalSpace(0.0, 10.0), pair, Subspace())
        assert result.verdict == "counterexample"
        assert result.note == "sampled"


class TestCompleteness:
    def test_finite_spaces_are_complete(self, chain_space):
        assert HypothesisService.check_completeness(chain_space, tables([1, 2, 2], [0, 1, 2]), Subspace()).verdict == "verified"

    def test_closed_interval(self):
        pair = MappingPair.from_expressions(Expr.parse("x/3"), Expr.parse("x"))
        assert HypothesisService.check_completeness(NumericIntervalSpace(0.0, 1.0), pair, Subspace()).verdict == "verified"
        with pytest.raises(NotCheckableException):
            HypothesisService.check_completeness(NumericIntervalSpace(0.0, 1.0, lower_closed=False), pair, Subspace())

    def test_indexed_limit_in_the_space(self, counterexample_space, counterexample_pair):
        result = HypothesisService.check_completeness(counterexample_space, counterexample_pair, Subspace())
        assert result.verdict == "verified"

    def test_indexed_limit_outside_T_image(self, counterexample_space, counterexample_pair):
        result = HypothesisService.check_completeness(counterexample_space, counterexample_pair, Subspace("T(X)"))
        assert result.verdict == "counterexample"
        assert result.witness["limit"] == pytest.approx(0.0, abs=1e-12)
        assert result.witness["ratio"] == pytest.approx(0.25)


class TestRegularity:
    def test_identity_S_is_regular(self, chain_space):
        for kind in "IDM":
            assert HypothesisService.check_regularity(chain_space, tables([1, 2, 2], [0, 1, 2]), kind).verdict == "verified"

    @pytest.mark.parametrize("kind", ["I", "D", "M"])
    def test_swapping_S_breaks_every_kind(self, chain_space, kind):
        result = HypothesisService.check_regularity(chain_space, tables([1, 2, 2], [1, 0, 2]), kind)
        assert result.verdict == "counterexample"

    def test_interval_identity_under_usual_order(self):
        pair = MappingPair.from_expressions(Expr.parse("x/3"), Expr.parse("x"))
        assert HypothesisService.check_regularity(NumericIntervalSpace(0.0, 1.0), pair).verdict == "verified"


def test_weak_compatibility(chain_space):
    pair = tables([1, 2, 2], [1, 0, 2])
    result = HypothesisService.check_weak_compatibility(chain_space, pair)
    assert result.verdict == "counterexample"
    assert result.witness == {"x": 0, "STx": 0, "TSx": 2}
    assert HypothesisService.check_weak_compatibility(chain_space, tables([1, 2, 2], [0, 1, 2])).verdict == "verified"


def test_O_compatibility_reduces_to_weak_compatibility_on_finite_spaces(chain_space):
    result = HypothesisService.check_O_compatibility(chain_space, tables([1, 2, 2], [1, 0, 2]))
    assert result.verdict == "counterexample"
    assert result.note == "finite reduction to weak compatibility"


class TestBruteForce:
    def test_finite_chain(self, chain_space):
        result = HypothesisService.coincidence_points_bruteforce(chain_space, tables([1, 2, 2], [0, 1, 2]))
        assert result.coincidence_points == [2]
        assert result.common_fixed_points == [2]
        assert result.points_of_coincidence == [2]
        assert result.exhaustive

    def test_agrees_with_the_double_loop(self, chain_space):
        T, S = [1, 1, 2], [0, 1, 0]
        result = HypothesisService.coincidence_points_bruteforce(chain_space, tables(T, S))
        points = [0, 1, 2]
        assert result.coincidence_points == oracles.coincidences(points, S.__getitem__, T.__getitem__)
        assert result.common_fixed_points == oracles.common_fixed_points(points, S.__getitem__, T.__getitem__)

    def test_counterexample_space_has_none(self, counterexample_space, counterexample_pair):
        result = HypothesisService.coincidence_points_bruteforce(counterexample_space, counterexample_pair)
        assert result.points_examined == 63
        assert result.coincidence_points == []
        assert not result.exhaustive

    def test_interval_is_not_enumerable(self):
        pair = MappingPair.from_expressions(Expr.parse("x/3"), Expr.parse("x"))
        with pytest.raises(NotCheckableException):
            HypothesisService.coincidence_points_bruteforce(NumericIntervalSpace(0.0, 1.0), pair)


class TestOrderShape:
    def test_total_order_is_directed(self, chain_space):
        assert HypothesisService.check_directedness(chain_space, tables([0, 1, 2], [0, 1, 2]), [0, 1, 2]).verdict == "verified"

    def test_antichain_is_not_directed(self, antichain):
        result = HypothesisService.check_directedness(antichain, tables([0, 1, 2], [0, 1, 2]), [0, 1, 2])
        assert result.verdict == "counterexample"
        assert (result.witness["x"], result.witness["y"]) == (0, 1)

    def test_common_upper_bound_makes_it_directed(self):
        space = FiniteOrderedMetricSpace(["p", "q", "r"], DISCRETE, [(0, 2), (1, 2)])
        assert HypothesisService.check_directedness(space, tables([0, 1, 2], [0, 1, 2]), [0, 1, 2]).verdict == "verified"

    def test_totally_ordered(self, antichain, chain_space):
        assert HypothesisService.check_totally_ordered(antichain, [0, 1]).verdict == "counterexample"
        assert HypothesisService.check_totally_ordered(chain_space, [0, 1, 2]).verdict == "verified"

    def test_comparable_mapping(self):
        space = FiniteOrderedMetricSpace(["p", "q", "r"], DISCRETE, [(0, 1)])
        result = HypothesisService.check_comparable_mapping(space, tables([0, 2, 2], [0, 1, 2]))
        assert result.verdict == "counterexample"
        assert (result.witness["x"], result.witness["y"]) == (0, 1)

    def test_injective(self, chain_space):
        result = HypothesisService.check_injective(chain_space, tables([0, 0, 0], [0, 0, 2]))
        assert result.verdict == "counterexample"
        assert (result.witness["x"], result.witness["y"]) == (0, 1)
        assert HypothesisService.check_injective(chain_space, tables([0, 0, 0], [0, 1, 2])).verdict == "verified"


class TestContinuity:
    def test_finite_spaces(self, chain_space):
        for option in ("i", "ii", "iii"):
            result = HypothesisService.check_continuity(chain_space, tables([1, 2, 2], [0, 1, 2]), option)
            assert result.verdict == "verified", option

    def test_structural_on_intervals(self):
        pair = MappingPair.from_expressions(Expr.parse("x/3"), Expr.parse("x"))
        space = NumericIntervalSpace(-1.0, 1.0)
        assert HypothesisService.check_continuity(space, pair, "ii").verdict == "verified"
        assert HypothesisService.check_continuity(space, pair, "iii").verdict == "verified"

    def test_discontinuous_expression_is_not_checkable(self):
        pair = MappingPair.from_expressions(Expr.parse("1/(x + 2)"), Expr.parse("x"))
        result = HypothesisService.check_continuity(NumericIntervalSpace(-1.0, 1.0), pair, "iii")
        assert result.verdict == "not-checkable"

    def test_unknown_option(self, chain_space):
        with pytest.raises(NotCheckableException):
            HypothesisService.check_continuity(chain_space, tables([1, 2, 2], [0, 1, 2]), "iv")


def test_a5(chain_space):
    assert HypothesisService.check_a5(chain_space, tables([1, 2, 2], [0, 1, 2])).verdict == "verified"


def test_combine_modes():
    ok = entry("a", "a", "verified")
    bad = entry("b", "b", "counterexample", witness={"x": 1})
    unknown = entry("c", "c", "not-checkable")
    assert combine("all", "all", [ok, bad]).verdict == "counterexample"
    assert combine("all", "all", [ok, unknown]).verdict == "not-checkable"
    assert combine("any", "any", [bad, ok]).verdict == "verified"
    assert combine("any", "any", [bad, bad]).verdict == "counterexample"
    assert combine("any", "any", [bad, unknown]).verdict == "not-checkable"
