"""Random finite spaces checked against the reference loops in tests/oracles.py."""

from __future__ import annotations

import pytest
from hypothesis import HealthCheck, assume, given, settings
from hypothesis import strategies as st

from fixcert.models.mapping import MappingPair
from fixcert.models.spaces import FiniteOrderedMetricSpace
from fixcert.repositories.catalog import CatalogRepository
from fixcert.services.certifier import CertifierService
from fixcert.services.contraction import ContractionService
from fixcert.services.hypotheses import HypothesisService
from fixcert.services.solver import SolverService
from fixcert.services.spaces import SpaceService
from tests import oracles

pytestmark = pytest.mark.slow

PROPERTY_SETTINGS = settings(
    max_examples=200,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.filter_too_much],
)
REGULARITY_SETTINGS = settings(max_examples=500, deadline=None, suppress_health_check=[HealthCheck.too_slow])


@st.composite
def chains(draw, permutation: bool = False):
    n = draw(st.integers(min_value=1, max_value=8))
    values = sorted(draw(st.lists(st.integers(min_value=0, max_value=40), min_size=n, max_size=n, unique=True)))
    T = draw(st.lists(st.integers(min_value=0, max_value=n - 1), min_size=n, max_size=n))
    if permutation:
        S = draw(st.permutations(list(range(n))))
    else:
        S = draw(st.lists(st.integers(min_value=0, max_value=n - 1), min_size=n, max_size=n))
    x0 = draw(st.integers(min_value=0, max_value=n - 1))
    space = FiniteOrderedMetricSpace.chain([float(v) for v in values])
    return space, list(T), list(S), x0


@PROPERTY_SETTINGS
@given(chains())
def test_brute_force_matches_the_double_loop(chain):
    space, T, S, _ = chain
    points = space.points()
    result = HypothesisService.coincidence_points_bruteforce(space, MappingPair.from_tables(T, S))
    assert result.coincidence_points == oracles.coincidences(points, S.__getitem__, T.__getitem__)
    assert result.common_fixed_points == oracles.common_fixed_points(points, S.__getitem__, T.__getitem__)


@PROPERTY_SETTINGS
@given(chains())
def test_located_coincidences_match_the_double_loop(chain):
    space, T, S, _ = chain
    expected = oracles.coincidences(space.points(), S.__getitem__, T.__getitem__)
    assert SolverService.locate_coincidences(space, MappingPair.from_tables(T, S)) == expected


@PROPERTY_SETTINGS
@given(chains())
def test_chains_satisfy_every_axiom(chain):
    space, _, _, _ = chain
    assert SpaceService.validate_space(space).valid


@PROPERTY_SETTINGS
@given(chains(permutation=True))
def test_trace_follows_the_reference_sequence(chain):
    space, T, S, x0 = chain
    pair = MappingPair.from_tables(T, S)
    trace = SolverService.jungck_sequence(space, pair, x0, budget=20, direction="either")
    assume(trace.verdict.kind != "PreconditionFailed")
    xs = [step.x for step in trace.steps]
    assert xs == oracles.ts_sequence(space.points(), S.__getitem__, T.__getitem__, x0, len(xs) - 1)
    if trace.verdict.kind == "CoincidenceHit":
        assert trace.verdict.candidate in oracles.coincidences(space.points(), S.__getitem__, T.__getitem__)


@PROPERTY_SETTINGS
@given(chains())
def test_verified_stages_agree_with_the_brute_force_fixed_points(chain):
    space, T, S, _ = chain
    pair = MappingPair.from_tables(T, S)
    ic = CatalogRepository.get("linear-t2", {"k": 0.5})
    report = CertifierService.certify(space, pair, ic, "main-regular", direction="either")
    points = space.points()
    fixed = oracles.common_fixed_points(points, S.__getitem__, T.__getitem__)

    if report.stage("coincidence").verdict == "verified":
        assert oracles.coincidences(points, S.__getitem__, T.__getitem__)
    if report.stage("common-fixed-point").verdict == "verified":
        assert report.conclusion is not None
        assert report.conclusion.common_fixed_point is not None
        assert report.conclusion.common_fixed_point in fixed
    if report.stage("unique-common-fixed-point").verdict == "verified":
        assert report.entry("b5").verdict == "verified"
        assert report.entry("b6").verdict == "verified"
        assert fixed == [report.conclusion.common_fixed_point]
        assert report.conclusion.confirmed


@PROPERTY_SETTINGS
@given(chains(permutation=True))
def test_trace_gaps_stay_under_the_phi_envelope(chain):
    space, T, S, x0 = chain
    pair = MappingPair.from_tables(T, S)
    ic = CatalogRepository.get("linear-t2", {"k": 0.5})
    assume(ContractionService.evaluate_contraction(space, pair, ic).passed)
    trace = SolverService.jungck_sequence(space, pair, x0, budget=20, direction="either")
    assume(trace.verdict.kind != "PreconditionFailed")
    assert oracles.envelope_violations(trace.gaps(), ic.companion) == []


@st.composite
def ordered_spaces(draw):
    """Up to four points, a random partial order and a random S."""
    n = draw(st.integers(min_value=1, max_value=4))
    below = [(i, j) for i in range(n) for j in range(i + 1, n)]
    kept = draw(st.lists(st.sampled_from(below), unique=True)) if below else []
    relabel = draw(st.permutations(list(range(n))))
    pairs = [(relabel[i], relabel[j]) for i, j in kept]
    distances = [[float(abs(i - j)) for j in range(n)] for i in range(n)]
    space = FiniteOrderedMetricSpace([f"p{i}" for i in range(n)], distances, pairs, close_order=True)
    S = draw(st.lists(st.integers(min_value=0, max_value=n - 1), min_size=n, max_size=n))
    kind = draw(st.sampled_from(["I", "D", "M"]))
    return space, list(S), kind


@REGULARITY_SETTINGS
@given(ordered_spaces())
def test_pointwise_regularity_agrees_with_sequence_enumeration(case):
    space, S, kind = case
    order = space.order.tolist()
    entry = HypothesisService.check_regularity(space, MappingPair.from_tables(S, S), kind)
    expected = oracles.regular(space.points(), S.__getitem__, lambda a, b: order[a][b], kind, space.size)
    assert (entry.verdict == "verified") is expected
