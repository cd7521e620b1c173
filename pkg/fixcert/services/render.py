"""
Report rendering: the line-oriented text form and the structured (JSON)
document of every result the CLI emits.
"""

from __future__ import annotations

import json
from typing import Any, Iterable, Optional, Sequence

from pydantic import BaseModel

from fixcert.models.contraction import ImplicitContraction
from fixcert.schemas.reports import (
    CatalogEntryView,
    CauchyCheck,
    ConditionReport,
    FixedPointResult,
    HypothesisReport,
    IterationTrace,
    OracleResult,
    ValidationReport,
)

VERDICT_MARKS = {
    "verified": "ok",
    "asserted": "asserted",
    "counterexample": "FAIL",
    "not-checkable": "??",
    "pass-on-grid": "ok",
    "not-applicable": "n/a",
}


def catalog_view(ic: ImplicitContraction) -> CatalogEntryView:
    return CatalogEntryView(
        id=ic.id,
        formula=ic.formula,
        companion=ic.companion.label if ic.companion is not None else None,
        params=dict(ic.params),
        claims=sorted(c.value for c in ic.claims),
        denies=sorted(c.value for c in ic.denies),
        not_applicable=sorted(c.value for c in ic.not_applicable),
        disputed=sorted(c.value for c in ic.disputed),
        note=ic.note,
    )


def structured(**parts: Any) -> str:
    """JSON document with one key per part; pydantic models are dumped in JSON mode."""

    def dump(value: Any) -> Any:
        if isinstance(value, BaseModel):
            return value.model_dump(mode="json")
        if isinstance(value, (list, tuple)):
            return [dump(v) for v in value]
        return value

    return json.dumps({k: dump(v) for k, v in parts.items() if v is not None}, indent=2, sort_keys=False)


def _fmt(value: Any) -> str:
    if value is None:
        return "-"
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


def _witness(witness: Optional[dict]) -> str:
    if not witness:
        return ""
    return " " + ", ".join(f"{k}={_fmt(v)}" for k, v in witness.items())


def render_trace(
    trace: IterationTrace,
    fixed: Optional[FixedPointResult] = None,
    cauchy: Sequence[CauchyCheck] = (),
    *,
    error: Optional[str] = None,
) -> str:
    lines = [f"T-S-sequence from x0 = {_fmt(trace.x0)} ({trace.direction}, budget {trace.budget})"]
    if trace.steps:
        lines.append(f"{'n':>6}  {'x':>20}  {'Sx':>20}  {'Tx':>20}  {'gap':>20}")
        for step in trace.steps:
            lines.append(
                f"{step.n:>6}  {_fmt(step.x):>20}  {_fmt(step.Sx):>20}  {_fmt(step.Tx):>20}  {_fmt(step.gap):>20}"
            )
    verdict = trace.verdict
    detail = f" at n = {verdict.n}" if verdict.n is not None else ""
    if verdict.candidate is not None:
        detail += f", candidate {_fmt(verdict.candidate)}"
    lines.append(f"verdict: {verdict.kind}{detail}" + (f" ({verdict.reason})" if verdict.reason else ""))
    if trace.residual is not None:
        lines.append(f"residual d(Sx, Tx): {_fmt(trace.residual)}")
    for check in cauchy:
        where = f"from n = {check.index}" if check.detected else "not detected"
        extra = f", {len(check.containment_violations)} containment violation(s)" if check.containment_violations else ""
        lines.append(f"cauchy eps={check.eps:g} (threshold {check.threshold:.3g}): {where}{extra}")
    if fixed is not None:
        lines.append(
            f"coincidence point: {_fmt(fixed.coincidence_point)} "
            f"(point of coincidence {_fmt(fixed.point_of_coincidence)}, residual {_fmt(fixed.residual)}, {fixed.source})"
        )
        lines.append(f"weakly compatible there: {'yes' if fixed.weakly_compatible_at_point else 'no'}")
        if fixed.common_fixed_point is not None:
            lines.append(f"common fixed point: {_fmt(fixed.common_fixed_point)}")
        else:
            lines.append("common fixed point: none at the point of coincidence")
    if error:
        lines.append(error)
    return "\n".join(lines) + "\n"


def render_report(report: HypothesisReport) -> str:
    lines = [
        f"variant {report.variant} ({report.direction}"
        + (f", x0 = {_fmt(report.x0)})" if report.x0 is not None else ")"),
    ]
    stage = None
    for e in report.entries:
        if e.stage != stage:
            stage = e.stage
            lines.append(f"[{stage}]")
        optional = "" if e.required else " (not required)"
        note = f" -- {e.note}" if e.note else ""
        lines.append(f"  {e.name:<20} {VERDICT_MARKS[e.verdict]:<9} {e.title}{optional}{note}{_witness(e.witness)}")
    lines.append("conclusions:")
    for s in report.stages:
        lines.append(f"  {s.name:<28} {s.verdict:<15} {s.conclusion}")
    lines.append(f"overall: {report.overall}; established: {report.established or 'nothing'}")
    c = report.conclusion
    if c is not None:
        lines.append(
            f"solver: {c.trace_verdict}, coincidence point {_fmt(c.solver_point)}, "
            f"common fixed point {_fmt(c.common_fixed_point)}"
        )
        if c.oracle is not None:
            lines.append("brute force: " + _oracle_summary(c.oracle))
        if c.confirmed:
            lines.append("conclusion confirmed")
        for d in c.discrepancies:
            lines.append(f"DISCREPANCY: {d}")
        for e in c.diagnostics:
            lines.append(f"  {e.name:<28} {VERDICT_MARKS[e.verdict]:<9} {e.title}{_witness(e.witness)}")
    return "\n".join(lines) + "\n"


def _oracle_summary(oracle: OracleResult) -> str:
    def items(values: Iterable[Any]) -> str:
        return "{" + ", ".join(_fmt(v) for v in values) + "}"

    return (
        f"{oracle.points_examined} points examined, C(T, S) = {items(oracle.coincidence_points)}, "
        f"common fixed points = {items(oracle.common_fixed_points)}"
    )


def render_oracle(oracle: OracleResult) -> str:
    scope = "exhaustive" if oracle.exhaustive else "materialised fragment"
    return (
        f"brute force ({scope}): {_oracle_summary(oracle)}\n"
        f"points of coincidence = {{{', '.join(_fmt(v) for v in oracle.points_of_coincidence)}}}\n"
    )


def render_catalog(entries: Sequence[CatalogEntryView]) -> str:
    lines = []
    for e in entries:
        params = ", ".join(f"{k}={v:g}" for k, v in e.params.items())
        lines.append(f"{e.id} ({params})")
        lines.append(f"  F = {e.formula}")
        lines.append(f"  phi = {e.companion or '-'}")
        lines.append(f"  claims: {' '.join(e.claims) or '-'}; denies: {' '.join(e.denies) or '-'}")
        if e.not_applicable or e.disputed:
            lines.append(f"  not applicable: {' '.join(e.not_applicable) or '-'}; disputed: {' '.join(e.disputed) or '-'}")
        if e.note:
            lines.append(f"  note: {e.note}")
    return "\n".join(lines) + "\n"


def render_conditions(ic: ImplicitContraction, reports: Sequence[ConditionReport]) -> str:
    lines = [f"{ic.id}: F = {ic.formula}"]
    for r in reports:
        reason = f" -- {r.reason}" if r.reason else ""
        lines.append(f"  {r.condition:<16} {r.verdict:<15} {r.grid}{reason}{_witness(r.witness)}")
    return "\n".join(lines) + "\n"


def render_validation(report: ValidationReport) -> str:
    if report.valid:
        return f"{report.flavor} space: all axioms hold ({'exhaustive' if report.exhaustive else 'structural'})\n"
    lines = [f"{report.flavor} space violates:"]
    for v in report.violations:
        lines.append(f"  {v.axiom}: witness {v.witness} {v.detail}")
    return "\n".join(lines) + "\n"
