"""
Problem Config Format

Technical Explanation:
- Line-oriented: "[block]" headers followed by "key = value" lines; "#"
  starts a comment line; blank lines are ignored
- Blocks: [space], [mappings], [contraction], [run] (grammar in
  docs/config_grammar.md)
- Parsing runs in two passes: a lexical pass collecting (value, line,
  column) per key, then an interpreting pass that knows the space flavor
  and turns values into typed ProblemConfig fields
- Every error carries the 1-based line and column of the offending text
- serialize_config writes the canonical form; parsing it again yields an
  identical ProblemConfig
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Optional, TypeVar

from fixcert.core.exceptions import (
    ArityException,
    ConfigException,
    ConfigSyntaxException,
    UnknownKeyException,
)
from fixcert.core.expr import T_VARIABLES, Expr
from fixcert.models.contraction import Condition
from fixcert.models.spaces import ASSERTABLE_FLAGS
from fixcert.schemas.config import ContractionBlock, MappingsBlock, ProblemConfig, RunBlock, SpaceBlock

_HEADER = re.compile(r"^\[\s*([A-Za-z_]+)\s*\]$")
_ENTRY = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)\s*=\s*(.*?)\s*$")

COMMON_SPACE_KEYS = ("flavor", "asserted")
SPACE_KEYS = {
    "finite": ("points", "values", "metric", "order", "close_order"),
    "indexed": ("value", "override", "budget", "label"),
    "interval": ("lower", "upper", "lower_closed", "upper_closed", "order"),
}
BLOCK_KEYS = {
    "space": COMMON_SPACE_KEYS + tuple(sorted({k for keys in SPACE_KEYS.values() for k in keys})),
    "mappings": ("T", "S", "S_inverse", "S_monotone"),
    "contraction": ("id", "params", "F", "phi", "rho", "claims"),
    "run": ("variant", "direction", "x0", "budget", "eps", "E", "tol"),
}
MAP_VARIABLES = {"indexed": ("i",), "interval": ("x",)}
_TRUE = {"true", "yes", "on", "1"}
_FALSE = {"false", "no", "off", "0"}

V = TypeVar("V")


@dataclass(frozen=True)
class RawEntry:
    value: str
    line: Optional[int]
    column: int

    def fail(self, message: str, offset: int = 0, kind: type[ConfigException] = ConfigSyntaxException) -> ConfigException:
        return kind(message, line=self.line, column=self.column + offset)


def _lex(text: str) -> dict[str, dict[str, RawEntry]]:
    blocks: dict[str, dict[str, RawEntry]] = {}
    current: Optional[str] = None
    for number, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        indent = len(raw) - len(raw.lstrip())
        header = _HEADER.match(stripped)
        if header:
            current = header.group(1)
            if current not in BLOCK_KEYS:
                raise UnknownKeyException(f"unknown block [{current}]", line=number, column=indent + 1)
            if current in blocks:
                raise ConfigSyntaxException(f"duplicate block [{current}]", line=number, column=indent + 1)
            blocks[current] = {}
            continue
        if stripped.startswith("["):
            raise ConfigSyntaxException("malformed block header", line=number, column=indent + 1)
        match = _ENTRY.match(stripped)
        if not match:
            raise ConfigSyntaxException("expected 'key = value'", line=number, column=indent + 1)
        if current is None:
            raise ConfigSyntaxException("entry outside of any block", line=number, column=indent + 1)
        key, value = match.group(1), match.group(2)
        if key not in BLOCK_KEYS[current]:
            raise UnknownKeyException(f"unknown key {key!r} in [{current}]", line=number, column=indent + 1)
        if key in blocks[current]:
            raise ConfigSyntaxException(f"duplicate key {key!r} in [{current}]", line=number, column=indent + 1)
        blocks[current][key] = RawEntry(value, number, indent + match.start(2) + 1)
    return blocks


def _convert(field: RawEntry, fn: Callable[[str], V], what: str, text: Optional[str] = None, offset: int = 0) -> V:
    try:
        return fn(field.value if text is None else text)
    except ValueError:
        raise field.fail(f"expected {what}, got {(field.value if text is None else text)!r}", offset)


def _bool(field: RawEntry) -> bool:
    lowered = field.value.lower()
    if lowered in _TRUE:
        return True
    if lowered in _FALSE:
        return False
    raise field.fail(f"expected true or false, got {field.value!r}")


def _words(field: RawEntry) -> list[tuple[str, int]]:
    """Whitespace/comma separated words with their offsets inside the value."""
    return [(m.group(0), m.start()) for m in re.finditer(r"[^\s,]+", field.value)]


def _expr(field: RawEntry, variables, functions=()) -> Expr:
    try:
        return Expr.parse(field.value, variables=variables, functions=functions)
    except ConfigException as exc:
        offset = (exc.column or 1) - 1
        raise type(exc)(exc.reason, line=field.line, column=field.column + offset)


def parse_params(field: RawEntry) -> dict[str, float]:
    """'k=0.25, psi=0.5' -> {'k': 0.25, 'psi': 0.5}."""
    params: dict[str, float] = {}
    for word, offset in _words(field):
        name, sep, number = word.partition("=")
        if not sep or not name:
            raise field.fail(f"expected name=value, got {word!r}", offset)
        params[name] = _convert(field, float, "a number", number, offset)
    return params


def _parse_space(fields: dict[str, RawEntry]) -> SpaceBlock:
    flavor_field = fields.get("flavor")
    if flavor_field is None:
        raise ConfigSyntaxException("[space] needs a flavor (finite, indexed or interval)")
    flavor = flavor_field.value
    if flavor not in SPACE_KEYS:
        raise flavor_field.fail(f"unknown flavor {flavor!r}; expected finite, indexed or interval")
    for key, field in fields.items():
        if key not in COMMON_SPACE_KEYS and key not in SPACE_KEYS[flavor]:
            raise UnknownKeyException(f"key {key!r} does not apply to {flavor} spaces", line=field.line, column=1)

    data: dict = {"flavor": flavor}
    if "asserted" in fields:
        field = fields["asserted"]
        for word, offset in _words(field):
            if word not in ASSERTABLE_FLAGS:
                raise field.fail(f"unknown property {word!r}", offset, UnknownKeyException)
        data["asserted"] = [w for w, _ in _words(field)]

    if flavor == "finite":
        _parse_finite(fields, data)
    elif flavor == "indexed":
        if "value" not in fields:
            raise ConfigSyntaxException("indexed spaces need a value expression in i", line=flavor_field.line)
        data["value"] = _expr(fields["value"], ("i",))
        if "budget" in fields:
            data["budget"] = _convert(fields["budget"], int, "an integer budget")
        if "label" in fields:
            data["label"] = fields["label"].value
        if "override" in fields:
            field = fields["override"]
            overrides = {}
            for word, offset in _words(field):
                index, sep, number = word.partition(":")
                if not sep:
                    raise field.fail(f"expected index:value, got {word!r}", offset)
                overrides[_convert(field, int, "an index", index, offset)] = _convert(
                    field, float, "a number", number, offset
                )
            data["overrides"] = overrides
    else:
        for key in ("lower", "upper"):
            if key not in fields:
                raise ConfigSyntaxException(f"interval spaces need {key}", line=flavor_field.line)
            data[key] = _convert(fields[key], float, "a number")
        for key in ("lower_closed", "upper_closed"):
            if key in fields:
                data[key] = _bool(fields[key])
        if "order" in fields:
            data["relation"] = _expr(fields["order"], ("x", "y"))
    return SpaceBlock(**data)


def _parse_finite(fields: dict[str, RawEntry], data: dict) -> None:
    if "values" in fields:
        if "metric" in fields or "order" in fields:
            field = fields["values"]
            raise field.fail("values describe a chain; drop metric and order", kind=ArityException)
        data["values"] = [_convert(fields["values"], float, "a number", w, o) for w, o in _words(fields["values"])]
    if "points" in fields:
        data["points"] = [w for w, _ in _words(fields["points"])]
    elif "values" in fields:
        data["points"] = [f"p{i}" for i in range(len(data["values"]))]
    else:
        raise ConfigSyntaxException("finite spaces need points")
    labels = data["points"]
    n = len(labels)
    if "values" in fields and len(data["values"]) != n:
        raise fields["values"].fail(f"{len(data['values'])} values for {n} points", kind=ArityException)
    if "metric" in fields:
        field = fields["metric"]
        rows, start = [], 0
        for chunk in field.value.split(";"):
            row = [(m.group(0), start + m.start()) for m in re.finditer(r"\S+", chunk)]
            if len(row) != n:
                raise field.fail(f"metric row {len(rows) + 1} has {len(row)} entries, expected {n}", start, ArityException)
            rows.append([_convert(field, float, "a number", w, o) for w, o in row])
            start += len(chunk) + 1
        if len(rows) != n:
            raise field.fail(f"metric has {len(rows)} rows, expected {n}", kind=ArityException)
        data["metric"] = rows
    elif "values" not in fields:
        raise ConfigSyntaxException("finite spaces need a metric (rows separated by ';') or values")
    if "order" in fields:
        field = fields["order"]
        pairs = []
        for word, offset in _words(field):
            low, sep, high = word.partition("<=")
            if not sep:
                raise field.fail(f"expected a<=b, got {word!r}", offset)
            for label in (low, high):
                if label not in labels:
                    raise field.fail(f"unknown point {label!r}", offset)
            pairs.append((low, high))
        data["order"] = pairs
    if "close_order" in fields:
        data["close_order"] = _bool(fields["close_order"])


def _parse_mappings(fields: dict[str, RawEntry], space: SpaceBlock) -> MappingsBlock:
    data: dict = {}
    for key in ("T", "S"):
        if key not in fields:
            raise ConfigSyntaxException(f"[mappings] needs {key}")
    if space.flavor == "finite":
        for key in ("S_inverse", "S_monotone"):
            if key in fields:
                raise UnknownKeyException(f"{key} only applies to interval spaces", line=fields[key].line, column=1)
        for key in ("T", "S"):
            field = fields[key]
            table = []
            for word, offset in _words(field):
                if word not in space.points:
                    raise field.fail(f"unknown point {word!r}", offset)
                table.append(space.points.index(word))
            if len(table) != len(space.points):
                raise field.fail(f"{key} lists {len(table)} images for {len(space.points)} points", kind=ArityException)
            data[f"{key}_table"] = table
        return MappingsBlock(**data)

    variables = MAP_VARIABLES[space.flavor]
    data["T"] = _expr(fields["T"], variables)
    data["S"] = _expr(fields["S"], variables)
    for key in ("S_inverse", "S_monotone"):
        if key in fields and space.flavor != "interval":
            raise UnknownKeyException(f"{key} only applies to interval spaces", line=fields[key].line, column=1)
    if "S_inverse" in fields:
        data["S_inverse"] = _expr(fields["S_inverse"], ("x",))
    if "S_monotone" in fields:
        data["S_monotone"] = _bool(fields["S_monotone"])
    return MappingsBlock(**data)


def _parse_contraction(fields: dict[str, RawEntry]) -> ContractionBlock:
    data: dict = {}
    if ("id" in fields) == ("F" in fields):
        raise ConfigSyntaxException("[contraction] needs exactly one of id or F")
    if "id" in fields:
        data["id"] = fields["id"].value
        for key in ("phi", "rho", "claims"):
            if key in fields:
                raise UnknownKeyException(f"{key} only applies to a custom F", line=fields[key].line, column=1)
    if "params" in fields:
        data["params"] = parse_params(fields["params"])
    for key in ("phi", "rho"):
        if key in fields:
            data[key] = _expr(fields[key], ("t",))
    if "F" in fields:
        functions = [name for name, key in (("psi", "phi"), ("rho", "rho")) if key in fields]
        data["F"] = _expr(fields["F"], T_VARIABLES, functions)
    if "claims" in fields:
        field = fields["claims"]
        claims = []
        for word, offset in _words(field):
            try:
                claims.append(Condition.parse(word).value)
            except ValueError as exc:
                raise field.fail(str(exc), offset)
        data["claims"] = claims
    return ContractionBlock(**data)


def _parse_run(fields: dict[str, RawEntry]) -> RunBlock:
    data: dict = {}
    for key in ("variant", "direction", "x0"):
        if key in fields:
            data[key] = fields[key].value
    if "budget" in fields:
        data["budget"] = _convert(fields["budget"], int, "an integer budget")
    for key in ("eps", "tol"):
        if key in fields:
            data[key] = _convert(fields[key], float, "a number")
    if "E" in fields:
        field = fields["E"]
        text = field.value
        if text in ("X", "T(X)", "S(X)"):
            data["E"] = text
        elif text.startswith("{") and text.endswith("}"):
            data["E"] = "points"
            data["E_points"] = [m.group(0) for m in re.finditer(r"[^\s,{}]+", text)]
        else:
            raise field.fail("E must be X, T(X), S(X) or a point set {a, b, ...}")
    return RunBlock(**data)


def parse_contraction_spec(text: str) -> tuple[str, dict[str, float]]:
    """'linear-t2:k=0.24' -> ('linear-t2', {'k': 0.24}); the command-line form of a catalog entry."""
    entry_id, _, params = text.partition(":")
    entry_id = entry_id.strip()
    if not entry_id:
        raise ConfigSyntaxException("expected ID or ID:name=value,...", column=1)
    return entry_id, parse_params(RawEntry(params, None, len(entry_id) + 2))


def parse_config(text: str) -> ProblemConfig:
    """Parse config text; the first error raises with its line and column."""
    blocks = _lex(text)
    if "space" not in blocks:
        raise ConfigSyntaxException("missing [space] block")
    space = _parse_space(blocks["space"])
    mappings = _parse_mappings(blocks["mappings"], space) if "mappings" in blocks else None
    contraction = _parse_contraction(blocks["contraction"]) if "contraction" in blocks else None
    run = _parse_run(blocks.get("run", {}))
    return ProblemConfig(space=space, mappings=mappings, contraction=contraction, run=run)


def _num(value: float) -> str:
    return repr(float(value))


def serialize_config(config: ProblemConfig) -> str:
    """Canonical text form of a config."""
    space = config.space
    lines = ["[space]", f"flavor = {space.flavor}"]
    if space.flavor == "finite":
        lines.append(f"points = {' '.join(space.points)}")
        if space.values:
            lines.append(f"values = {' '.join(_num(v) for v in space.values)}")
        else:
            lines.append("metric = " + " ; ".join(" ".join(_num(v) for v in row) for row in space.metric))
            if space.order:
                lines.append("order = " + " ".join(f"{a}<={b}" for a, b in space.order))
            if space.close_order:
                lines.append("close_order = true")
    elif space.flavor == "indexed":
        lines.append(f"value = {space.value.source}")
        if space.overrides:
            lines.append("override = " + " ".join(f"{i}:{_num(v)}" for i, v in sorted(space.overrides.items())))
        if space.budget is not None:
            lines.append(f"budget = {space.budget}")
        if space.label != "x":
            lines.append(f"label = {space.label}")
    else:
        lines.append(f"lower = {_num(space.lower)}")
        lines.append(f"upper = {_num(space.upper)}")
        lines.append(f"lower_closed = {str(space.lower_closed).lower()}")
        lines.append(f"upper_closed = {str(space.upper_closed).lower()}")
        if space.relation is not None:
            lines.append(f"order = {space.relation.source}")
    if space.asserted:
        lines.append(f"asserted = {' '.join(space.asserted)}")

    if config.mappings is not None:
        m = config.mappings
        lines += ["", "[mappings]"]
        if space.flavor == "finite":
            lines.append("T = " + " ".join(space.points[i] for i in m.T_table))
            lines.append("S = " + " ".join(space.points[i] for i in m.S_table))
        else:
            lines.append(f"T = {m.T.source}")
            lines.append(f"S = {m.S.source}")
            if m.S_inverse is not None:
                lines.append(f"S_inverse = {m.S_inverse.source}")
            if m.S_monotone:
                lines.append("S_monotone = true")

    if config.contraction is not None:
        c = config.contraction
        lines += ["", "[contraction]"]
        if c.id is not None:
            lines.append(f"id = {c.id}")
        if c.params:
            lines.append("params = " + ", ".join(f"{k}={_num(v)}" for k, v in c.params.items()))
        for key in ("F", "phi", "rho"):
            expr = getattr(c, key)
            if expr is not None:
                lines.append(f"{key} = {expr.source}")
        if c.claims:
            lines.append(f"claims = {' '.join(c.claims)}")

    run = config.run
    run_lines = []
    for key in ("variant", "direction", "x0"):
        value = getattr(run, key)
        if value is not None and not (key == "direction" and value == "increasing"):
            run_lines.append(f"{key} = {value}")
    if run.budget is not None:
        run_lines.append(f"budget = {run.budget}")
    for key in ("eps", "tol"):
        value = getattr(run, key)
        if value is not None:
            run_lines.append(f"{key} = {_num(value)}")
    if run.E == "points":
        run_lines.append("E = {" + ", ".join(run.E_points) + "}")
    elif run.E != "X":
        run_lines.append(f"E = {run.E}")
    if run_lines:
        lines += ["", "[run]", *run_lines]
    return "\n".join(lines) + "\n"
