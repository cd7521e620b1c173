"""
Arithmetic Expression Language

Technical Explanation:
- Formulas in problem configs (F over t1..t6, maps over x or i, order
  predicates over x and y, comparison functions over t) are parsed here
- The grammar is a lark LALR grammar; lark reports lexing and parsing
  failures with 1-based columns, which become ConfigSyntaxException
  positions
- Variable, function and arity checks walk the raw parse tree, so every
  error points at the offending token
- The tree is then compiled once by a lark Transformer into nested
  closures, so evaluation inside grid scans costs a handful of Python calls
  per node
- Evaluation failures (division by zero, overflow, complex results) surface
  as DomainErrorException carrying the offending inputs

Precedence, loosest first:
    or < and < not < comparisons < + - < * / < unary - < ^ (right associative)

So -x^2 is -(x^2) and 2^3^2 is 2^(3^2).
"""

from __future__ import annotations

import math
import operator
from typing import Any, Callable, Collection, Mapping, Optional

from lark import Lark, Token, Transformer, Tree
from lark.exceptions import UnexpectedCharacters, UnexpectedInput, UnexpectedToken

from fixcert.core.exceptions import ArityException, ConfigSyntaxException, DomainErrorException

GRAMMAR = r"""
?start: disjunction

?disjunction: conjunction
    | disjunction "or" conjunction      -> or_

?conjunction: negation
    | conjunction "and" negation        -> and_

?negation: comparison
    | "not" negation                    -> not_

?comparison: sum
    | sum "<" sum                       -> lt
    | sum "<=" sum                      -> le
    | sum ">" sum                       -> gt
    | sum ">=" sum                      -> ge
    | sum "==" sum                      -> eq
    | sum "!=" sum                      -> ne

?sum: product
    | sum "+" product                   -> add
    | sum "-" product                   -> sub

?product: unary
    | product "*" unary                 -> mul
    | product "/" unary                 -> div

?unary: power
    | "-" unary                         -> neg
    | "+" unary

?power: atom
    | atom "^" unary                    -> pow

?atom: NUMBER                           -> number
    | NAME "(" [arguments] ")"          -> call
    | NAME                              -> var
    | "(" disjunction ")"

arguments: disjunction ("," disjunction)*

%import common.CNAME -> NAME
%import common.NUMBER
%import common.WS
%ignore WS
"""

_PARSER = Lark(GRAMMAR, parser="lalr")

# name -> (min arity, max arity or None for variadic)
BUILTINS: dict[str, tuple[int, Optional[int]]] = {
    "min": (1, None),
    "max": (1, None),
    "abs": (1, 1),
    "sqrt": (1, 1),
}

_COMPARISONS = {
    "lt": ("<", operator.lt),
    "le": ("<=", operator.le),
    "gt": (">", operator.gt),
    "ge": (">=", operator.ge),
    "eq": ("==", operator.eq),
    "ne": ("!=", operator.ne),
}
_ARITHMETIC = {
    "add": ("+", operator.add),
    "sub": ("-", operator.sub),
    "mul": ("*", operator.mul),
    "div": ("/", operator.truediv),
    "pow": ("^", operator.pow),
}
# builtins receive the list of evaluated arguments
_BUILTIN_FNS: dict[str, Callable[[list], float]] = {
    "min": min,
    "max": max,
    "abs": lambda values: abs(values[0]),
    "sqrt": lambda values: math.sqrt(values[0]),
}

_BINDING = {
    "or_": 1,
    "and_": 2,
    "not_": 3,
    **{name: 5 for name in _COMPARISONS},
    "add": 10,
    "sub": 10,
    "mul": 20,
    "div": 20,
    "neg": 25,
    "pow": 30,
}
_ATOM_BP = 100

Compiled = Callable[[Mapping[str, Any], Mapping[str, Callable[[float], float]]], Any]


def _syntax_error(exc: UnexpectedInput) -> ConfigSyntaxException:
    column = exc.column if isinstance(exc.column, int) and exc.column > 0 else 1
    if isinstance(exc, UnexpectedCharacters):
        return ConfigSyntaxException(f"unexpected character {exc.char!r}", column=column)
    if isinstance(exc, UnexpectedToken) and exc.token.type != "$END":
        return ConfigSyntaxException(f"unexpected {str(exc.token)!r}", column=column)
    return ConfigSyntaxException("unexpected end of expression", column=column)


def _check_names(tree: Tree, variables: Optional[Collection[str]], functions: Collection[str]) -> None:
    """Reject unknown variables, unknown functions and bad arities, leftmost first."""
    problems: list[tuple[int, ConfigSyntaxException]] = []
    if variables is not None:
        allowed = ", ".join(sorted(variables)) or "none"
        for var in tree.find_data("var"):
            token = var.children[0]
            if str(token) not in variables:
                problems.append(
                    (token.column, ConfigSyntaxException(f"unknown variable {str(token)!r} (allowed: {allowed})", column=token.column))
                )
    for call in tree.find_data("call"):
        token, args = call.children
        name = str(token)
        if name not in BUILTINS and name not in functions:
            problems.append((token.column, ConfigSyntaxException(f"unknown function {name!r}", column=token.column)))
            continue
        count = len(args.children) if args is not None else 0
        low, high = BUILTINS.get(name, (1, 1))
        if count < low or (high is not None and count > high):
            expected = low if high == low else f"at least {low}"
            problems.append(
                (token.column, ArityException(f"function {name!r} takes {expected} argument(s), got {count}", column=token.column))
            )
    if problems:
        raise min(problems, key=lambda item: item[0])[1]


class _Normalize(Transformer):
    """Literals become floats so that trees compare by value, not by spelling."""

    def NUMBER(self, token: Token) -> float:
        return float(token)

    def var(self, children: list) -> Tree:
        return Tree("var", [str(children[0])])

    def call(self, children: list) -> Tree:
        name, args = children
        return Tree("call", [str(name), args])


def _binary(fn: Callable[[Any, Any], Any]):
    def build(self, children: list) -> Compiled:
        left, right = children
        return lambda env, fns: fn(left(env, fns), right(env, fns))

    return build


class _Compiler(Transformer):
    def number(self, children: list) -> Compiled:
        (value,) = children
        return lambda env, fns: value

    def var(self, children: list) -> Compiled:
        (name,) = children
        return lambda env, fns: env[name]

    def neg(self, children: list) -> Compiled:
        (inner,) = children
        return lambda env, fns: -inner(env, fns)

    def not_(self, children: list) -> Compiled:
        (inner,) = children
        return lambda env, fns: not inner(env, fns)

    def and_(self, children: list) -> Compiled:
        left, right = children
        return lambda env, fns: bool(left(env, fns)) and bool(right(env, fns))

    def or_(self, children: list) -> Compiled:
        left, right = children
        return lambda env, fns: bool(left(env, fns)) or bool(right(env, fns))

    def arguments(self, children: list) -> list[Compiled]:
        return list(children)

    def call(self, children: list) -> Compiled:
        name, args = children
        args = tuple(args or ())
        builtin = _BUILTIN_FNS.get(name)
        if builtin is not None:
            return lambda env, fns: builtin([arg(env, fns) for arg in args])
        (only,) = args
        return lambda env, fns: fns[name](only(env, fns))


for _name, (_, _fn) in {**_COMPARISONS, **_ARITHMETIC}.items():
    setattr(_Compiler, _name, _binary(_fn))


def _precedence(node: Any) -> int:
    if isinstance(node, Tree):
        return _BINDING.get(node.data, _ATOM_BP)
    return _ATOM_BP


def to_source(node: Any) -> str:
    """Render a normalized tree back to text that parses to the same tree."""
    kind = node.data
    if kind == "number":
        return repr(node.children[0])
    if kind == "var":
        return node.children[0]
    if kind == "call":
        name, args = node.children
        return f"{name}({', '.join(to_source(arg) for arg in (args.children if args is not None else ()))})"
    if kind in ("neg", "not_"):
        (operand,) = node.children
        inner = to_source(operand)
        if _precedence(operand) < _BINDING[kind]:
            inner = f"({inner})"
        return f"not {inner}" if kind == "not_" else f"-{inner}"

    bp = _BINDING[kind]
    left_node, right_node = node.children
    left, right = to_source(left_node), to_source(right_node)
    left_bp, right_bp = _precedence(left_node), _precedence(right_node)
    if kind == "pow":
        # right associative: a^b^c == a^(b^c); a signed exponent needs no parentheses
        left_wrap = left_bp <= bp
        right_wrap = right_bp < bp and right_node.data != "neg"
    elif kind in _COMPARISONS:
        left_wrap, right_wrap = left_bp <= bp, right_bp <= bp
    else:
        left_wrap, right_wrap = left_bp < bp, right_bp <= bp
    if left_wrap:
        left = f"({left})"
    if right_wrap:
        right = f"({right})"
    symbol = {"or_": "or", "and_": "and", **{k: s for k, (s, _) in {**_COMPARISONS, **_ARITHMETIC}.items()}}[kind]
    return f"{left}^{right}" if kind == "pow" else f"{left} {symbol} {right}"


def is_continuous(node: Tree) -> bool:
    """
    Structural continuity: built from + - *, division by a nonzero literal,
    non-negative integer literal powers and the builtins.
    """
    kind = node.data
    if kind in ("number", "var"):
        return True
    if kind == "neg":
        return is_continuous(node.children[0])
    if kind == "call":
        name, args = node.children
        return name in BUILTINS and all(is_continuous(arg) for arg in (args.children if args is not None else ()))
    if kind in ("add", "sub", "mul"):
        return all(is_continuous(child) for child in node.children)
    left, right = node.children if kind in ("div", "pow") else (None, None)
    if kind == "div":
        return right.data == "number" and right.children[0] != 0 and is_continuous(left)
    if kind == "pow":
        if right.data != "number":
            return False
        exponent = right.children[0]
        return exponent >= 0 and float(exponent).is_integer() and is_continuous(left)
    return False


class Expr:
    """
    A parsed, compiled expression.

    Usage:
        f = Expr.parse("t1 - 0.3*max(t2, t3, t4, t5, t6)", variables=T_VARIABLES)
        f.evaluate({"t1": 1.0, "t2": 2.0, ...})
    """

    __slots__ = ("source", "tree", "variables", "functions", "_fn")

    def __init__(self, source: str, tree: Tree):
        self.source = source
        self.tree = tree
        self.variables = frozenset(var.children[0] for var in tree.find_data("var"))
        self.functions = frozenset(
            call.children[0] for call in tree.find_data("call") if call.children[0] not in BUILTINS
        )
        self._fn: Compiled = _Compiler().transform(tree)

    @classmethod
    def parse(
        cls,
        text: str,
        variables: Optional[Collection[str]] = None,
        functions: Collection[str] = (),
    ) -> "Expr":
        if not text.strip():
            raise ConfigSyntaxException("empty expression", column=1)
        try:
            raw = _PARSER.parse(text)
        except UnexpectedInput as exc:
            raise _syntax_error(exc)
        _check_names(raw, None if variables is None else frozenset(variables), frozenset(functions))
        return cls(text.strip(), _Normalize().transform(raw))

    def evaluate(
        self,
        env: Mapping[str, Any],
        functions: Optional[Mapping[str, Callable[[float], float]]] = None,
    ) -> Any:
        try:
            result = self._fn(env, functions or {})
        except ZeroDivisionError:
            raise DomainErrorException(f"division by zero in {self.source!r}", inputs=dict(env))
        except OverflowError:
            raise DomainErrorException(f"overflow in {self.source!r}", inputs=dict(env))
        except KeyError as exc:
            raise DomainErrorException(f"unbound name {exc.args[0]!r} in {self.source!r}", inputs=dict(env))
        except (ValueError, TypeError) as exc:
            raise DomainErrorException(f"{exc} in {self.source!r}", inputs=dict(env))
        if isinstance(result, bool):
            return result
        if isinstance(result, complex) or not math.isfinite(result):
            raise DomainErrorException(f"non-real result in {self.source!r}", inputs=dict(env))
        return result

    def __call__(self, **env: Any) -> Any:
        return self.evaluate(env)

    @property
    def continuous(self) -> bool:
        return is_continuous(self.tree)

    def to_source(self) -> str:
        return to_source(self.tree)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Expr) and self.tree == other.tree

    def __hash__(self) -> int:
        return hash(self.tree)

    def __repr__(self) -> str:
        return f"Expr({self.source!r})"


T_VARIABLES = ("t1", "t2", "t3", "t4", "t5", "t6")
