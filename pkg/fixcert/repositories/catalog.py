"""
Built-in implicit-contraction catalog.

Every entry is built by a factory from its parameters. psi denotes a
comparison function and rho a half-comparison function; both default to
linear functions (psi(t) = 0.5t, rho(t) = 0.4t) whose slope can be set with
the psi= / rho= parameters, or replaced by any callable.
"""

from __future__ import annotations

from typing import Callable, Mapping, Optional

from fixcert.core.exceptions import InvalidParameterException, UnknownContractionException
from fixcert.models.contraction import ComparisonFn, Condition, HalfComparisonFn, ImplicitContraction

ALL = frozenset(Condition)
F1A, F1B, F1C, F2 = Condition.F1A, Condition.F1B, Condition.F1C, Condition.F2

DEFAULT_PSI = 0.5
DEFAULT_RHO = 0.4


def _max(*values: float) -> float:
    return max(values)


def _linear_quasi(p, psi, rho) -> ImplicitContraction:
    k = p["k"]
    if not 0 <= k < 0.5:
        raise InvalidParameterException(f"linear-quasi needs k in [0, 1/2), got {k}")
    return ImplicitContraction(
        id="linear-quasi",
        formula=f"t1 - {k:g}*max(t2, t3, t4, t5, t6)",
        F=lambda t1, t2, t3, t4, t5, t6: t1 - k * _max(t2, t3, t4, t5, t6),
        companion=ComparisonFn(f"{k:g}*t/(1-{k:g})", lambda t: k * t / (1 - k)),
        claims=ALL,
    )


def _nonlinear_quasi(p, psi, rho) -> ImplicitContraction:
    return ImplicitContraction(
        id="nonlinear-quasi",
        formula=f"t1 - rho(max(t2, t3, t4, t5, t6)), rho(t) = {rho.label}",
        F=lambda t1, t2, t3, t4, t5, t6: t1 - rho(_max(t2, t3, t4, t5, t6)),
        companion=rho.doubled(),
        claims=ALL,
        rho=rho,
    )


def _ratio_t3(p, psi, rho) -> ImplicitContraction:
    return ImplicitContraction(
        id="ratio-t3",
        formula=f"t1 - psi(t3*(t5 + t6)/(t2 + t4)), psi(t) = {psi.label}",
        F=lambda t1, t2, t3, t4, t5, t6: t1 - psi(t3 * (t5 + t6) / (t2 + t4)),
        companion=psi,
        claims=frozenset({F1A, F2}),
        denies=frozenset({F1B, F1C}),
    )


def _ratio_t2(p, psi, rho) -> ImplicitContraction:
    return ImplicitContraction(
        id="ratio-t2",
        formula=f"t1 - psi(t2*(t5 + t6)/(t3 + t4)), psi(t) = {psi.label}",
        F=lambda t1, t2, t3, t4, t5, t6: t1 - psi(t2 * (t5 + t6) / (t3 + t4)),
        companion=psi,
        claims=frozenset({F1A, F1C}),
        not_applicable=frozenset({F2}),
        disputed=frozenset({F1C}),
        note="F increases with t3, so the non-increasing requirement of F1c fails",
    )


def _banach(p, psi, rho) -> ImplicitContraction:
    return ImplicitContraction(
        id="banach",
        formula=f"t1 - psi(t2), psi(t) = {psi.label}",
        F=lambda t1, t2, t3, t4, t5, t6: t1 - psi(t2),
        companion=psi,
        claims=ALL,
    )


def _linear_t2(p, psi, rho) -> ImplicitContraction:
    k = p["k"]
    return ImplicitContraction(
        id="linear-t2",
        formula=f"t1 - {k:g}*t2",
        F=lambda t1, t2, t3, t4, t5, t6: t1 - k * t2,
        companion=ComparisonFn.linear(k),
        claims=ALL if 0 <= k < 1 else frozenset(),
    )


def _sum_t3t4(p, psi, rho) -> ImplicitContraction:
    return ImplicitContraction(
        id="sum-t3t4",
        formula=f"t1 - rho(t3 + t4), rho(t) = {rho.label}",
        F=lambda t1, t2, t3, t4, t5, t6: t1 - rho(t3 + t4),
        companion=rho.doubled(),
        claims=ALL,
        rho=rho,
    )


def _sum_t3t4_psi(p, psi, rho) -> ImplicitContraction:
    return ImplicitContraction(
        id="sum-t3t4-psi",
        formula=f"t1 - psi(t3 + t4), psi(t) = {psi.label}",
        F=lambda t1, t2, t3, t4, t5, t6: t1 - psi(t3 + t4),
        companion=psi,
        claims=frozenset({F2}),
        denies=frozenset({F1A, F1B, F1C}),
    )


def _sum_t2t3(p, psi, rho) -> ImplicitContraction:
    return ImplicitContraction(
        id="sum-t2t3",
        formula=f"t1 - rho(t2 + t3), rho(t) = {rho.label}",
        F=lambda t1, t2, t3, t4, t5, t6: t1 - rho(t2 + t3),
        companion=rho.doubled(),
        claims=frozenset({F1A, F1B, F2}),
        rho=rho,
    )


def _sum_t2t3_psi(p, psi, rho) -> ImplicitContraction:
    return ImplicitContraction(
        id="sum-t2t3-psi",
        formula=f"t1 - psi(t2 + t3), psi(t) = {psi.label}",
        F=lambda t1, t2, t3, t4, t5, t6: t1 - psi(t2 + t3),
        companion=psi,
        claims=frozenset({F1B, F2}),
        denies=frozenset({F1A}),
    )


def _max_half_t3t4(p, psi, rho) -> ImplicitContraction:
    return ImplicitContraction(
        id="max-half-t3t4",
        formula=f"t1 - psi(max(t2, (t3 + t4)/2, t5, t6)), psi(t) = {psi.label}",
        F=lambda t1, t2, t3, t4, t5, t6: t1 - psi(_max(t2, (t3 + t4) / 2, t5, t6)),
        companion=psi,
        claims=frozenset({F1B, F1C, F2}),
    )


def _max_half_t5t6(p, psi, rho) -> ImplicitContraction:
    return ImplicitContraction(
        id="max-half-t5t6",
        formula=f"t1 - psi(max(t2, t3, t4, (t5 + t6)/2)), psi(t) = {psi.label}",
        F=lambda t1, t2, t3, t4, t5, t6: t1 - psi(_max(t2, t3, t4, (t5 + t6) / 2)),
        companion=psi,
        claims=frozenset({F1A, F2}),
    )


def _max_half_t5t6_min(p, psi, rho) -> ImplicitContraction:
    L = p["L"]
    if L < 0:
        raise InvalidParameterException(f"max-half-t5t6-min needs L >= 0, got {L}")
    return ImplicitContraction(
        id="max-half-t5t6-min",
        formula=f"t1 - psi(max(t2, t3, t4, (t5 + t6)/2)) - {L:g}*min(t3, t4, t5, t6), psi(t) = {psi.label}",
        F=lambda t1, t2, t3, t4, t5, t6: t1 - psi(_max(t2, t3, t4, (t5 + t6) / 2)) - L * min(t3, t4, t5, t6),
        companion=psi,
        claims=frozenset({F1A, F2}),
    )


def _max_halves(p, psi, rho) -> ImplicitContraction:
    return ImplicitContraction(
        id="max-halves",
        formula=f"t1 - psi(max(t2, (t3 + t4)/2, (t5 + t6)/2)), psi(t) = {psi.label}",
        F=lambda t1, t2, t3, t4, t5, t6: t1 - psi(_max(t2, (t3 + t4) / 2, (t5 + t6) / 2)),
        companion=psi,
        claims=ALL,
    )


def _max_mixed(p, psi, rho) -> ImplicitContraction:
    return ImplicitContraction(
        id="max-mixed",
        formula=f"t1 - psi(max(t2, t3, t4/2, (t5 + t6)/2, t6)), psi(t) = {psi.label}",
        F=lambda t1, t2, t3, t4, t5, t6: t1 - psi(_max(t2, t3, t4 / 2, (t5 + t6) / 2, t6)),
        companion=psi,
        claims=frozenset({F1A, F1B, F2}),
    )


Factory = Callable[[dict, ComparisonFn, HalfComparisonFn], ImplicitContraction]

# id -> (factory, default parameters)
_ENTRIES: dict[str, tuple[Factory, dict[str, float]]] = {
    "linear-quasi": (_linear_quasi, {"k": 0.3}),
    "nonlinear-quasi": (_nonlinear_quasi, {"rho": DEFAULT_RHO}),
    "ratio-t3": (_ratio_t3, {"psi": DEFAULT_PSI}),
    "ratio-t2": (_ratio_t2, {"psi": DEFAULT_PSI}),
    "banach": (_banach, {"psi": DEFAULT_PSI}),
    "sum-t3t4": (_sum_t3t4, {"rho": DEFAULT_RHO}),
    "sum-t3t4-psi": (_sum_t3t4_psi, {"psi": DEFAULT_PSI}),
    "sum-t2t3": (_sum_t2t3, {"rho": DEFAULT_RHO}),
    "sum-t2t3-psi": (_sum_t2t3_psi, {"psi": DEFAULT_PSI}),
    "max-half-t3t4": (_max_half_t3t4, {"psi": DEFAULT_PSI}),
    "max-half-t5t6": (_max_half_t5t6, {"psi": DEFAULT_PSI}),
    "max-half-t5t6-min": (_max_half_t5t6_min, {"psi": DEFAULT_PSI, "L": 0.5}),
    "max-halves": (_max_halves, {"psi": DEFAULT_PSI}),
    "max-mixed": (_max_mixed, {"psi": DEFAULT_PSI}),
    "linear-t2": (_linear_t2, {"k": 0.25}),
}


class CatalogRepository:
    @staticmethod
    def ids() -> list[str]:
        return list(_ENTRIES)

    @staticmethod
    def defaults(entry_id: str) -> dict[str, float]:
        if entry_id not in _ENTRIES:
            raise UnknownContractionException(f"unknown contraction {entry_id!r}; known: {', '.join(_ENTRIES)}")
        return dict(_ENTRIES[entry_id][1])

    @staticmethod
    def get(
        entry_id: str,
        params: Optional[Mapping[str, float]] = None,
        *,
        psi: Optional[ComparisonFn] = None,
        rho: Optional[HalfComparisonFn] = None,
    ) -> ImplicitContraction:
        merged = CatalogRepository.defaults(entry_id)
        unknown = set(params or {}) - set(merged)
        if unknown:
            raise InvalidParameterException(
                f"{entry_id} has no parameter(s) {sorted(unknown)}; accepted: {sorted(merged)}"
            )
        merged.update(params or {})
        factory = _ENTRIES[entry_id][0]
        psi = psi or ComparisonFn.linear(merged.get("psi", DEFAULT_PSI))
        rho = rho or HalfComparisonFn.linear(merged.get("rho", DEFAULT_RHO))
        entry = factory(merged, psi, rho)
        return ImplicitContraction(
            id=entry.id,
            formula=entry.formula,
            F=entry.F,
            companion=entry.companion,
            claims=entry.claims,
            denies=entry.denies,
            not_applicable=entry.not_applicable,
            disputed=entry.disputed,
            params=tuple(sorted(merged.items())),
            rho=entry.rho,
            note=entry.note,
        )

    @staticmethod
    def list_entries() -> list[ImplicitContraction]:
        return [CatalogRepository.get(entry_id) for entry_id in _ENTRIES]
