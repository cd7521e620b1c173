"""
Hypothesis Checks

Technical Explanation:
- Every check returns a HypothesisEntry with one of four verdicts:
  * verified: established exhaustively (finite spaces), on the materialised
    fragment (indexed spaces) or structurally (identity maps, usual order,
    continuous expressions)
  * asserted: the user vouches for it through a space flag
  * counterexample: a witness refutes it; a sampled refutation overrides an
    asserted flag
  * not-checkable: raised as NotCheckableException when nothing applies
- Finite reductions: a convergent sequence of a finite metric space is
  eventually constant, so regularity becomes the pointwise condition
  Sx <= S(Sx) and O-compatibility becomes weak compatibility
- Indexed spaces use the usual order of values, so the same pointwise
  reduction is exact there
"""

from __future__ import annotations

import itertools
import logging
from typing import Callable, Iterable, Optional, Sequence

from fixcert.core.config import settings
from fixcert.core.exceptions import (
    DomainErrorException,
    InvalidPointException,
    NoPreimageException,
    NotCheckableException,
)
from fixcert.models.mapping import MappingPair, safe_image
from fixcert.models.spaces import (
    FiniteOrderedMetricSpace,
    IndexedSequenceSpace,
    NumericIntervalSpace,
    OrderedMetricSpace,
    Point,
    Subspace,
)
from fixcert.schemas.reports import HypothesisEntry, OracleResult
from fixcert.services.solver import PreimageSelector, SolverService

logger = logging.getLogger("fixcert.certifier")

REGULARITY_FLAGS = {"I": "I_regular", "D": "D_regular", "M": "M_regular"}
CONTINUITY_OPTIONS = ("i", "ii", "iii")


def entry(
    name: str,
    title: str,
    verdict: str,
    witness: Optional[dict] = None,
    note: Optional[str] = None,
) -> HypothesisEntry:
    return HypothesisEntry(name=name, title=title, verdict=verdict, stage="standing", witness=witness, note=note)


def combine(name: str, title: str, parts: Sequence[HypothesisEntry], mode: str = "all") -> HypothesisEntry:
    """
    Merge sub-checks. mode="all": every part must hold; mode="any": one of
    the parts suffices ("one of T and S ...").
    """
    verdicts = [p.verdict for p in parts]
    notes = "; ".join(f"{p.name}: {p.note or p.verdict}" for p in parts)
    if mode == "any":
        for wanted in ("verified", "asserted"):
            if wanted in verdicts:
                return entry(name, title, wanted, note=notes)
        if verdicts and all(v == "counterexample" for v in verdicts):
            witness = {p.name: p.witness for p in parts}
            return entry(name, title, "counterexample", witness=witness, note=notes)
        return entry(name, title, "not-checkable", note=notes)
    for wanted in ("counterexample", "not-checkable", "asserted"):
        hits = [p for p in parts if p.verdict == wanted]
        if hits:
            return entry(name, title, wanted, witness=hits[0].witness, note=notes)
    return entry(name, title, "verified", note=notes)


def fragment(space: OrderedMetricSpace, pair: MappingPair, *, limit: bool = True) -> list[Point]:
    """
    Points whose T- and S-images are materialised; indexed spaces are cut
    at INDEXED_SAMPLE_LIMIT when limit is set.
    """
    if isinstance(space, NumericIntervalSpace):
        raise NotCheckableException("interval spaces cannot be enumerated")
    points = space.points()
    if isinstance(space, IndexedSequenceSpace) and limit:
        points = points[: settings.INDEXED_SAMPLE_LIMIT + 1]
    return [
        p for p in points if safe_image(space, pair, "T", p) is not None and safe_image(space, pair, "S", p) is not None
    ]


def _scope(space: OrderedMetricSpace, points: Sequence[Point]) -> Optional[str]:
    if isinstance(space, IndexedSequenceSpace) and points:
        return f"on indices {min(points)}..{max(points)}"
    return None


def _order_is_total(space: OrderedMetricSpace) -> bool:
    if space.total_relation or isinstance(space, IndexedSequenceSpace):
        return True
    return isinstance(space, NumericIntervalSpace) and space.usual_order


def _asserted_or_raise(space: OrderedMetricSpace, flag: str, name: str, title: str) -> HypothesisEntry:
    if space.is_asserted(flag):
        return entry(name, title, "asserted", note=f"asserted via {flag}, not verified")
    raise NotCheckableException(f"{title} cannot be checked on this {space.flavor} space; assert {flag} to accept it")


class HypothesisService:
    @staticmethod
    def check_x0(space: OrderedMetricSpace, pair: MappingPair, x0: Point, direction: str) -> HypothesisEntry:
        """Sx0 <= Tx0 (increasing), Sx0 >= Tx0 (decreasing), comparable (monotone)."""
        Sx0, Tx0 = pair.apply_S(space, x0), pair.apply_T(space, x0)
        relation = {"increasing": "S x0 <= T x0", "decreasing": "S x0 >= T x0"}.get(direction, "S x0 ~ T x0")
        if direction == "increasing":
            holds = space.leq(Sx0, Tx0)
        elif direction == "decreasing":
            holds = space.leq(Tx0, Sx0)
        else:
            holds = space.comparable(Sx0, Tx0)
        witness = {"x0": x0, "Sx0": Sx0, "Tx0": Tx0}
        return entry("x0", relation, "verified" if holds else "counterexample", witness=witness if not holds else None)

    @staticmethod
    def find_x0(space: OrderedMetricSpace, pair: MappingPair, direction: str) -> Optional[Point]:
        candidates = (
            space.sample(settings.PAIR_SAMPLES) if isinstance(space, NumericIntervalSpace) else fragment(space, pair)
        )
        for x in candidates:
            try:
                if HypothesisService.check_x0(space, pair, x, direction).verdict == "verified":
                    return x
            except (NotCheckableException, InvalidPointException, DomainErrorException, OverflowError):
                continue
        return None

    @staticmethod
    def check_S_increasing(space: OrderedMetricSpace, pair: MappingPair) -> HypothesisEntry:
        title = "T is S-increasing"
        numeric = isinstance(space, NumericIntervalSpace)
        points = space.sample(settings.PAIR_SAMPLES) if numeric else fragment(space, pair)
        S = {p: safe_image(space, pair, "S", p) for p in points}
        T = {p: safe_image(space, pair, "T", p) for p in points}
        for x, y in itertools.product(points, repeat=2):
            if None in (S[x], S[y], T[x], T[y]):
                continue
            if space.leq(S[x], S[y]) and not space.leq(T[x], T[y]):
                return entry(
                    "S-increasing",
                    title,
                    "counterexample",
                    witness={"x": x, "y": y, "Sx": S[x], "Sy": S[y], "Tx": T[x], "Ty": T[y]},
                    note="sampled" if numeric else None,
                )
        if numeric:
            return _asserted_or_raise(space, "S_increasing", "S-increasing", title)
        return entry("S-increasing", title, "verified", note=_scope(space, points))

    @staticmethod
    def check_range_inclusion(space: OrderedMetricSpace, pair: MappingPair, E: Subspace) -> HypothesisEntry:
        title = f"T(X) ⊆ {E.describe()} ⊆ S(X)"
        if isinstance(space, NumericIntervalSpace):
            return HypothesisService._range_inclusion_numeric(space, pair, E, title)

        universe = fragment(space, pair, limit=False)
        checked = fragment(space, pair)
        s_images = {safe_image(space, pair, "S", p) for p in space.points()} - {None}
        t_images = {safe_image(space, pair, "T", p) for p in universe}
        explicit = set(E.points)

        def in_E(p: Point) -> bool:
            if E.kind == "X":
                return True
            if E.kind == "T(X)":
                return p in t_images
            if E.kind == "S(X)":
                return p in s_images
            return p in explicit

        for x in checked:
            Tx = pair.apply_T(space, x)
            if not in_E(Tx):
                return entry(
                    "range-inclusion",
                    title,
                    "counterexample",
                    witness={"inclusion": f"T(X) ⊆ {E.describe()}", "x": x, "Tx": Tx},
                )

        if E.kind == "X":
            members = checked
        elif E.kind == "T(X)":
            members = sorted({pair.apply_T(space, x) for x in checked})
        elif E.kind == "S(X)":
            members = []
        else:
            members = sorted(explicit)
        for e in members:
            if e not in s_images:
                return entry(
                    "range-inclusion",
                    title,
                    "counterexample",
                    witness={"inclusion": f"{E.describe()} ⊆ S(X)", "e": e},
                )
        return entry("range-inclusion", title, "verified", note=_scope(space, checked))

    @staticmethod
    def _range_inclusion_numeric(
        space: NumericIntervalSpace, pair: MappingPair, E: Subspace, title: str
    ) -> HypothesisEntry:
        if pair.S_identity and E.kind in ("X", "S(X)", "T(X)"):
            return entry("range-inclusion", title, "verified", note="S is the identity")
        if pair.S_inverse is not None or pair.S_monotone:
            select = PreimageSelector(space, pair)
            for x in space.sample(settings.PAIR_SAMPLES):
                Tx = safe_image(space, pair, "T", x)
                if Tx is None:
                    continue
                try:
                    select(Tx)
                except NoPreimageException:
                    return entry(
                        "range-inclusion",
                        title,
                        "counterexample",
                        witness={"inclusion": "T(X) ⊆ S(X)", "x": x, "Tx": Tx},
                        note="sampled",
                    )
        return _asserted_or_raise(space, "range_inclusion", "range-inclusion", title)

    @staticmethod
    def subspace_members(space: OrderedMetricSpace, pair: MappingPair, E: Subspace) -> list[Point]:
        if E.kind == "points":
            return sorted(E.points)
        universe = fragment(space, pair, limit=False)
        if E.kind == "X":
            return universe
        return sorted({safe_image(space, pair, E.kind[0], p) for p in universe} - {None})

    @staticmethod
    def check_completeness(space: OrderedMetricSpace, pair: MappingPair, E: Subspace) -> HypothesisEntry:
        """
        O-completeness of E. Indexed spaces look for the longest monotone run
        at the end of E's members; when its gaps shrink geometrically its
        limit is estimated and must be the value of an E member outside the run.
        """
        name, title = "E-complete", f"{E.describe()} is O-complete"
        if isinstance(space, FiniteOrderedMetricSpace):
            return entry(name, title, "verified", note="finite metric spaces are complete")
        if E.kind == "points":
            return entry(name, title, "verified", note="finite subsets are complete")
        if isinstance(space, NumericIntervalSpace):
            whole = E.kind == "X" or (E.kind == "S(X)" and pair.S_identity)
            if whole and space.closed:
                return entry(name, title, "verified", note=f"{space.interval_text()} is closed")
            return _asserted_or_raise(space, "complete", name, title)

        assert isinstance(space, IndexedSequenceSpace)
        members = HypothesisService.subspace_members(space, pair, E)
        run = [members[-1]] if members else []
        direction = 0
        for m in reversed(members[:-1]):
            step = space.value(run[-1]) - space.value(m)
            if step == 0:
                continue
            sign = 1 if step > 0 else -1
            if direction and sign != direction:
                break
            direction = sign
            run.append(m)
        run.reverse()
        if len(run) < 3:
            return entry(name, title, "verified", note="no monotone chain among the materialised members")
        values = [space.value(m) for m in run]
        last_gap, prev_gap = abs(values[-1] - values[-2]), abs(values[-2] - values[-3])
        ratio = last_gap / prev_gap if prev_gap else 1.0
        if ratio >= 1:
            return entry(name, title, "verified", note="the monotone chain does not contract")
        limit = values[-1] + (values[-1] - values[-2]) * ratio / (1 - ratio)
        tol = settings.METRIC_ATOL * max(1.0, abs(limit))
        in_run = set(run)
        if any(abs(space.value(m) - limit) <= tol for m in members if m not in in_run):
            return entry(name, title, "verified", note=_scope(space, members))
        logger.info("Monotone chain of %s converges to %.3g outside E", E.describe(), limit)
        return entry(
            name,
            title,
            "counterexample",
            witness={"chain": run[:8], "limit": limit, "ratio": ratio},
            note=f"monotone Cauchy chain in {E.describe()} converges outside it",
        )

    @staticmethod
    def check_regularity(
        space: OrderedMetricSpace,
        pair: MappingPair,
        kind: str = "I",
        *,
        flag: Optional[str] = None,
        name: str = "regular",
    ) -> HypothesisEntry:
        """I: Sx <= S(Sx); D: Sx >= S(Sx); M: both, for every x."""
        kind = kind.upper()
        flag = flag or REGULARITY_FLAGS[kind]
        title = f"{kind}-regularity"

        def holds(Sx: Point, SSx: Point) -> bool:
            up, down = space.leq(Sx, SSx), space.leq(SSx, Sx)
            return {"I": up, "D": down}.get(kind, up and down)

        numeric = isinstance(space, NumericIntervalSpace)
        points = space.sample(settings.PAIR_SAMPLES) if numeric else fragment(space, pair)
        for x in points:
            Sx = safe_image(space, pair, "S", x)
            SSx = safe_image(space, pair, "S", Sx) if Sx is not None else None
            if SSx is None:
                continue
            if not holds(Sx, SSx):
                return entry(
                    name,
                    title,
                    "counterexample",
                    witness={"x": x, "Sx": Sx, "SSx": SSx},
                    note="sampled" if numeric else None,
                )
        if not numeric:
            note = "finite reduction: Sx against S(Sx) pointwise" if isinstance(space, FiniteOrderedMetricSpace) else _scope(space, points)
            return entry(name, title, "verified", note=note)
        if pair.S_identity and space.usual_order:
            return entry(name, title, "verified", note="S is the identity under the usual order")
        return _asserted_or_raise(space, flag, name, title)

    @staticmethod
    def check_weak_compatibility(space: OrderedMetricSpace, pair: MappingPair) -> HypothesisEntry:
        name, title = "weakly-compatible", "(T, S) is weakly compatible"
        if isinstance(space, NumericIntervalSpace) and pair.S_identity:
            return entry(name, title, "verified", note="S is the identity")
        points = SolverService.locate_coincidences(space, pair)
        for x in points:
            if not SolverService.commutes_at(space, pair, x):
                Tx, Sx = pair.apply_T(space, x), pair.apply_S(space, x)
                return entry(
                    name,
                    title,
                    "counterexample",
                    witness={"x": x, "STx": safe_image(space, pair, "S", Tx), "TSx": safe_image(space, pair, "T", Sx)},
                )
        if not points:
            note = "no coincidence point, holds vacuously"
        elif isinstance(space, NumericIntervalSpace):
            note = f"at {len(points)} located coincidence point(s)"
        else:
            note = f"at {len(points)} coincidence point(s)"
        return entry(name, title, "verified", note=note)

    @staticmethod
    def check_O_compatibility(space: OrderedMetricSpace, pair: MappingPair) -> HypothesisEntry:
        name, title = "O-compatible", "(T, S) is O-compatible"
        if pair.S_identity:
            return entry(name, title, "verified", note="S is the identity")
        weak = HypothesisService.check_weak_compatibility(space, pair)
        if isinstance(space, FiniteOrderedMetricSpace):
            return entry(name, title, weak.verdict, witness=weak.witness, note="finite reduction to weak compatibility")
        if weak.verdict == "counterexample":
            return entry(name, title, "counterexample", witness=weak.witness, note="not even weakly compatible")
        return _asserted_or_raise(space, "O_compatible", name, title)

    @staticmethod
    def coincidence_points_bruteforce(
        space: OrderedMetricSpace,
        pair: MappingPair,
        limit: Optional[int] = None,
    ) -> OracleResult:
        """
        C(T, S), its common fixed points and points of coincidence by direct
        enumeration. Indexed spaces without an explicit limit stop at the
        first index whose images leave the budget.
        """
        if isinstance(space, NumericIntervalSpace):
            raise NotCheckableException("brute force needs an enumerable space")
        if isinstance(space, IndexedSequenceSpace) and limit is None:
            points: list[Point] = []
            for i in space.points():
                if safe_image(space, pair, "T", i) is None or safe_image(space, pair, "S", i) is None:
                    break
                points.append(i)
        elif isinstance(space, IndexedSequenceSpace):
            points = list(range(limit + 1))
        else:
            points = space.points()
        coincidences, fixed, values = [], [], []
        for x in points:
            Sx, Tx = pair.apply_S(space, x), pair.apply_T(space, x)
            if space.same(Sx, Tx):
                coincidences.append(x)
                if space.same(Sx, x):
                    fixed.append(x)
                if Tx not in values:
                    values.append(Tx)
        return OracleResult(
            points_examined=len(points),
            coincidence_points=coincidences,
            common_fixed_points=fixed,
            points_of_coincidence=sorted(values),
            exhaustive=isinstance(space, FiniteOrderedMetricSpace),
        )

    @staticmethod
    def check_directedness(space: OrderedMetricSpace, pair: MappingPair, C: Sequence[Point]) -> HypothesisEntry:
        name, title = "directed", "C(T, S) is (T, S)-directed"
        if len(C) <= 1:
            return entry(name, title, "verified", note=f"{len(C)} coincidence point(s)")
        if _order_is_total(space):
            return entry(name, title, "verified", note="the order is total")
        if isinstance(space, NumericIntervalSpace):
            return _asserted_or_raise(space, "directed", name, title)
        candidates = [s for s in (safe_image(space, pair, "S", z) for z in fragment(space, pair)) if s is not None]
        for x, y in itertools.combinations(C, 2):
            Tx, Ty = pair.apply_T(space, x), pair.apply_T(space, y)
            if not any(space.comparable(Tx, Sz) and space.comparable(Ty, Sz) for Sz in candidates):
                return entry(name, title, "counterexample", witness={"x": x, "y": y, "Tx": Tx, "Ty": Ty})
        return entry(name, title, "verified", note=f"{len(C)} coincidence point(s)")

    @staticmethod
    def check_totally_ordered(space: OrderedMetricSpace, C: Sequence[Point]) -> HypothesisEntry:
        name, title = "totally-ordered", "C(T, S) is totally ordered"
        for x, y in itertools.combinations(C, 2):
            if not space.comparable(x, y):
                return entry(name, title, "counterexample", witness={"x": x, "y": y})
        return entry(name, title, "verified", note=f"{len(C)} coincidence point(s)")

    @staticmethod
    def check_comparable_mapping(space: OrderedMetricSpace, pair: MappingPair, which: str = "T") -> HypothesisEntry:
        name, title = f"{which}-comparable", f"{which} maps comparable points to comparable points"
        if _order_is_total(space):
            return entry(name, title, "verified", note="the order is total")
        identity = pair.T_identity if which == "T" else pair.S_identity
        if identity:
            return entry(name, title, "verified", note=f"{which} is the identity")
        numeric = isinstance(space, NumericIntervalSpace)
        points = space.sample(settings.PAIR_SAMPLES) if numeric else fragment(space, pair)
        f = {p: safe_image(space, pair, which, p) for p in points}
        for x, y in itertools.combinations(points, 2):
            if f[x] is None or f[y] is None or not space.comparable(x, y):
                continue
            if not space.comparable(f[x], f[y]):
                return entry(
                    name,
                    title,
                    "counterexample",
                    witness={"x": x, "y": y, "fx": f[x], "fy": f[y]},
                    note="sampled" if numeric else None,
                )
        if numeric:
            return _asserted_or_raise(space, f"{which}_comparable", name, title)
        return entry(name, title, "verified", note=_scope(space, points))

    @staticmethod
    def check_injective(space: OrderedMetricSpace, pair: MappingPair, which: str = "S") -> HypothesisEntry:
        name, title = f"{which}-injective", f"{which} is one-one"
        if (pair.T_identity if which == "T" else pair.S_identity):
            return entry(name, title, "verified", note=f"{which} is the identity")
        numeric = isinstance(space, NumericIntervalSpace)
        points = space.sample(settings.PAIR_SAMPLES) if numeric else fragment(space, pair)
        seen: dict = {}
        for x in points:
            image = safe_image(space, pair, which, x)
            if image is None:
                continue
            for earlier_image, earlier in seen.items():
                if space.same(earlier_image, image):
                    return entry(
                        name,
                        title,
                        "counterexample",
                        witness={"x": earlier, "y": x, "image": image},
                        note="sampled" if numeric else None,
                    )
            seen[image] = x
        if numeric:
            return _asserted_or_raise(space, "injective", name, title)
        return entry(name, title, "verified", note=_scope(space, points))

    @staticmethod
    def _map_continuity(space: OrderedMetricSpace, pair: MappingPair, which: str, flag: str) -> HypothesisEntry:
        name, title = f"{which}-{flag}", f"{which} is {flag.replace('_', '-')}"
        if isinstance(space, FiniteOrderedMetricSpace):
            return entry(name, title, "verified", note="every map on a finite metric space is continuous")
        structural = (pair.T_identity or pair.T_continuous) if which == "T" else (pair.S_identity or pair.S_continuous)
        if isinstance(space, NumericIntervalSpace) and structural:
            return entry(name, title, "verified", note="built from continuous operations")
        own_flag = f"{which}_{'O_' if flag == 'O-continuous' else ''}continuous"
        if space.is_asserted(own_flag):
            return entry(name, title, "asserted", note=f"asserted via {own_flag}, not verified")
        if flag == "O-continuous" and space.is_asserted(f"{which}_continuous"):
            return entry(name, title, "asserted", note=f"asserted via {which}_continuous, not verified")
        raise NotCheckableException(f"continuity of {which} cannot be checked; assert {own_flag}")

    @staticmethod
    def check_continuity(space: OrderedMetricSpace, pair: MappingPair, option: str) -> HypothesisEntry:
        """
        (i) T is (S, O)-continuous; (ii) (T, S) is O-compatible and T, S are
        O-continuous; (iii) T and S are continuous.
        """
        option = option.lower()
        if option not in CONTINUITY_OPTIONS:
            raise NotCheckableException(f"unknown continuity option {option!r}")
        title = f"continuity option ({option})"

        def attempt(check: Callable[[], HypothesisEntry], name: str) -> HypothesisEntry:
            try:
                return check()
            except NotCheckableException as exc:
                return entry(name, name, "not-checkable", note=exc.message)

        if option == "iii":
            parts = [
                attempt(lambda: HypothesisService._map_continuity(space, pair, "T", "continuous"), "T-continuous"),
                attempt(lambda: HypothesisService._map_continuity(space, pair, "S", "continuous"), "S-continuous"),
            ]
        elif option == "ii":
            parts = [
                attempt(lambda: HypothesisService.check_O_compatibility(space, pair), "O-compatible"),
                attempt(lambda: HypothesisService._map_continuity(space, pair, "T", "O-continuous"), "T-O-continuous"),
                attempt(lambda: HypothesisService._map_continuity(space, pair, "S", "O-continuous"), "S-O-continuous"),
            ]
        else:
            if isinstance(space, FiniteOrderedMetricSpace):
                parts = [entry("T-S-O-continuous", title, "verified", note="finite space")]
            elif pair.S_identity and (pair.T_identity or pair.T_continuous) and isinstance(space, NumericIntervalSpace):
                parts = [entry("T-S-O-continuous", title, "verified", note="S is the identity and T is continuous")]
            elif space.is_asserted("T_S_O_continuous"):
                parts = [entry("T-S-O-continuous", title, "asserted", note="asserted via T_S_O_continuous, not verified")]
            else:
                parts = [entry("T-S-O-continuous", title, "not-checkable", note="assert T_S_O_continuous")]
        return combine("continuity", title, parts)

    @staticmethod
    def check_a5(space: OrderedMetricSpace, pair: MappingPair) -> HypothesisEntry:
        """For x, y in S(X) there is v with Sv <= x and Sv <= y."""
        name, title = "a5", "S(X) has common S-lower bounds"
        if isinstance(space, NumericIntervalSpace):
            if pair.S_identity and space.usual_order:
                return entry(name, title, "verified", note="v = min(x, y)")
            return _asserted_or_raise(space, "a5", name, title)
        points = fragment(space, pair)
        images = sorted({pair.apply_S(space, p) for p in points})
        lower = [pair.apply_S(space, v) for v in points]
        for x, y in itertools.combinations_with_replacement(images, 2):
            if not any(space.leq(Sv, x) and space.leq(Sv, y) for Sv in lower):
                return entry(name, title, "counterexample", witness={"x": x, "y": y})
        return entry(name, title, "verified", note=_scope(space, points))


def first_counterexample(entries: Iterable[HypothesisEntry]) -> Optional[HypothesisEntry]:
    return next((e for e in entries if e.verdict == "counterexample"), None)
