from __future__ import annotations

import pytest

from fixcert.core.exceptions import InvalidParameterException, PreconditionFailedException
from fixcert.core.expr import Expr
from fixcert.models.mapping import MappingPair
from fixcert.repositories.catalog import CatalogRepository
from fixcert.services.certifier import VARIANTS, CertifierService, normalize_variant
from fixcert.services.problem import ProblemService


def verdicts(report):
    return {e.name: e.verdict for e in report.entries}


@pytest.fixture
def chain_pair():
    return MappingPair.from_tables([1, 2, 2], [0, 1, 2])


class TestVariants:
    @pytest.mark.parametrize(
        ("raw", "expected"),
        [
            ("Main-continuity(ii)", "main-continuity-ii"),
            ("bv_ordered", "bv-ordered"),
            (" quasi-corollary ", "quasi-corollary"),
        ],
    )
    def test_normalize(self, raw, expected):
        assert normalize_variant(raw) == expected

    def test_unknown(self):
        with pytest.raises(InvalidParameterException):
            normalize_variant("main-continuity-iv")

    def test_every_variant_plans_on_a_chain(self, chain_space, chain_pair):
        ic = CatalogRepository.get("linear-quasi")
        for variant in VARIANTS:
            report = CertifierService.certify(chain_space, chain_pair, ic, variant, x0=0, confirm=False)
            assert report.variant == variant
            assert report.stages, variant


class TestQuasiContraction:
    def test_linear_quasi_maps_to_rho(self):
        quasi = CertifierService.quasi_contraction(CatalogRepository.get("linear-quasi", {"k": 0.3}))
        assert quasi.id == "nonlinear-quasi"
        assert quasi.rho(1.0) == pytest.approx(0.3)

    def test_without_rho(self):
        with pytest.raises(PreconditionFailedException):
            CertifierService.quasi_contraction(CatalogRepository.get("banach"))


class TestResolve:
    def test_either_with_x0(self, load_problem):
        problem = load_problem("example_3_4")
        direction, x0 = CertifierService.resolve(problem.space, problem.pair, problem.x0, "either")
        assert (direction, x0) == ("decreasing", 0.9)

    def test_search_for_x0(self, chain_space, chain_pair):
        assert CertifierService.resolve(chain_space, chain_pair, None, "inc") == ("increasing", 0)

    def test_unknown_direction(self, chain_space, chain_pair):
        with pytest.raises(InvalidParameterException):
            CertifierService.resolve(chain_space, chain_pair, None, "sideways")


def test_finite_chain_main_regular(load_problem):
    report = ProblemService.certify(load_problem("finite_chain"))
    assert report.variant == "main-regular"
    assert set(verdicts(report).values()) == {"verified"}
    assert report.overall == "verified"
    assert report.established == "unique-common-fixed-point"
    conclusion = report.conclusion
    assert conclusion.trace_verdict == "CoincidenceHit"
    assert conclusion.solver_point == 2
    assert conclusion.common_fixed_point == 2
    assert conclusion.oracle.coincidence_points == [2]
    assert conclusion.oracle.exhaustive
    assert conclusion.confirmed
    assert conclusion.discrepancies == []


def test_counterexample_hypotheses_hold_but_no_fixed_point_exists(load_problem):
    report = ProblemService.certify(load_problem("counterexample"))
    assert report.variant == "bv-ordered"
    entries = verdicts(report)
    for name in ("range-inclusion", "S-increasing", "complete", "f1a", "contractive", "a1", "a2", "a3", "a4", "a5", "a6"):
        assert entries[name] == "verified", name
    assert report.overall == "verified"
    assert report.established == "unique-common-fixed-point"

    conclusion = report.conclusion
    assert not conclusion.confirmed
    assert conclusion.trace_verdict == "NoCoincidenceWithinBudget"
    assert conclusion.solver_point is None
    assert conclusion.oracle.points_examined == 63
    assert conclusion.oracle.coincidence_points == []
    assert any(d.startswith("solver found no coincidence point") for d in conclusion.discrepancies)
    assert "brute force finds no coincidence point among 63 points" in conclusion.discrepancies
    assert "brute force finds no common fixed point among 63 points" in conclusion.discrepancies
    diagnostics = {d.name: d.verdict for d in conclusion.diagnostics}
    assert diagnostics == {
        "diagnostic-T(X)-complete": "counterexample",
        "diagnostic-S(X)-complete": "counterexample",
    }


def test_linear_form_of_f1a_in_the_ordered_variant(load_problem):
    report = ProblemService.certify(load_problem("counterexample"), confirm=False)
    f1a = report.entry("f1a")
    assert f1a.title.endswith("with phi(t) = 0.25 t")
    assert report.conclusion is None


def test_example_with_a_custom_order(load_problem):
    report = ProblemService.certify(load_problem("example_3_4"))
    assert report.variant == "main-continuity-ii"
    assert (report.direction, report.x0) == ("decreasing", 0.9)
    entries = verdicts(report)
    assert entries["S-increasing"] == "asserted"
    assert entries["E-complete"] == "asserted"
    assert entries["range-inclusion"] == "verified"
    assert entries["contractive"] == "verified"
    assert not report.entry("b4").required
    assert report.overall == "verified"
    conclusion = report.conclusion
    assert conclusion.trace_verdict == "CauchyDetected"
    assert conclusion.common_fixed_point == pytest.approx(0.0, abs=1e-9)
    assert conclusion.oracle is None
    assert conclusion.confirmed


def test_quasi_corollary_refuted(load_problem):
    report = ProblemService.certify(load_problem("quadratic"))
    assert report.variant == "quasi-corollary"
    assert report.entry("rho-half-comparison").verdict == "counterexample"
    assert report.entry("rho-half-comparison").witness["kind"] == "half-strict"
    assert report.entry("contractive").verdict == "counterexample"
    assert report.overall == "counterexample"
    assert report.established is None
    assert report.conclusion is None


def test_metric_variant_compares_every_pair(chain_space, chain_pair):
    ic = CatalogRepository.get("linear-t2", {"k": 0.5})
    report = CertifierService.certify(chain_space, chain_pair, ic, "metric", x0=0)
    assert report.overall == "verified"
    assert report.entry("contractive").title.endswith("for all x, y")
    assert report.conclusion.confirmed


def test_point_of_coincidence_variant(chain_space, chain_pair):
    ic = CatalogRepository.get("linear-t2", {"k": 0.5})
    report = CertifierService.certify(chain_space, chain_pair, ic, "poc-unique", x0=0)
    assert [s.name for s in report.stages] == [
        "coincidence",
        "unique-point-of-coincidence",
        "unique-coincidence-point",
        "unique-common-fixed-point",
    ]
    assert all(s.verdict == "verified" for s in report.stages)
    assert report.conclusion.confirmed


def test_stage_verdicts_follow_their_own_conditions(chain_space):
    # T a = b, T b = c, T c = c with S swapping a and b: regularity fails, F conditions hold
    pair = MappingPair.from_tables([1, 2, 2], [1, 0, 2])
    report = CertifierService.certify(
        chain_space, pair, CatalogRepository.get("linear-t2", {"k": 0.5}), "main-regular", x0=2, confirm=False
    )
    assert report.entry("b2").verdict == "counterexample"
    assert report.stage("coincidence").verdict == "counterexample"
    assert report.overall == "counterexample"


def test_index_pair_from_expressions(counterexample_space):
    pair = MappingPair.from_index_expressions(Expr.parse("i + 2"), Expr.parse("i + 1"))
    report = CertifierService.certify(
        counterexample_space, pair, CatalogRepository.get("linear-t2"), "bv-ordered", x0=1, confirm=False
    )
    assert report.established == "unique-common-fixed-point"


def test_metric_quasi_marks_weak_compatibility_as_a_strengthening(chain_space, chain_pair):
    ic = CatalogRepository.get("linear-quasi", {"k": 0.2})
    quasi = CertifierService.certify(chain_space, chain_pair, ic, "metric-quasi", x0=0, confirm=False)
    assert quasi.entry("weakly-compatible").title == "(T, S) is weakly compatible (strengthening: required here)"
    assert quasi.entry("weakly-compatible").required

    metric = CertifierService.certify(
        chain_space, chain_pair, CatalogRepository.get("linear-t2", {"k": 0.5}), "metric", x0=0, confirm=False
    )
    assert "strengthening" not in metric.entry("weakly-compatible").title


def test_example_under_ratio_contraction_fails_F1c(load_problem):
    problem = load_problem("example_3_4")
    ic = CatalogRepository.get("ratio-t3")
    report = CertifierService.certify(
        problem.space, problem.pair, ic, "main-regular", x0=problem.x0, direction="either", confirm=False
    )
    b6 = report.entry("b6")
    assert b6.title == "F satisfies F1c"
    assert b6.verdict == "counterexample"
    assert b6.witness["kind"] == "implication"
    assert report.entry("b2").verdict == "not-checkable"
    assert report.stage("unique-common-fixed-point").verdict == "counterexample"
    assert report.overall == "counterexample"
