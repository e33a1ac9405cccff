"""Syntax tree for `.flash` scripts.

Every node carries ``pos = (line, col)``; positions are excluded from
equality so a parse of the pretty-printed text compares equal to the
original tree.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields, replace
from typing import Optional, Union

Pos = tuple


def _pos():
    return field(default=(0, 0), compare=False, repr=False)


# -- types and declarations --------------------------------------------------------


@dataclass(frozen=True)
class TypeRef:
    name: str  # int | float | bool | ID | string | list | Pair
    args: tuple = ()
    pos: Pos = _pos()


@dataclass(frozen=True)
class Decl:
    """``[edge] type @name;``"""

    type: TypeRef
    name: str
    edge: bool = False
    pos: Pos = _pos()


@dataclass(frozen=True)
class ParamDecl:
    """``param type name [= literal];``"""

    type: TypeRef
    name: str
    default: Optional["Expr"] = None
    pos: Pos = _pos()


# -- expressions --------------------------------------------------------------------


@dataclass(frozen=True)
class Literal:
    value: object
    kind: str  # int | float | string | bool | INT_MAX
    pos: Pos = _pos()


@dataclass(frozen=True)
class Name:
    ident: str
    pos: Pos = _pos()


@dataclass(frozen=True)
class Member:
    base: "Expr"
    key: str  # id, label, src, dst, out, in, both, @prop, static name
    pos: Pos = _pos()


@dataclass(frozen=True)
class MethodCall:
    """``x.size()``, ``_.out.min()`` ..."""

    base: "Expr"
    method: str
    pos: Pos = _pos()


@dataclass(frozen=True)
class Unary:
    op: str
    operand: "Expr"
    pos: Pos = _pos()


@dataclass(frozen=True)
class Binary:
    op: str
    left: "Expr"
    right: "Expr"
    pos: Pos = _pos()


@dataclass(frozen=True)
class CallExpr:
    """min/max/abs helpers and the aggregators min/max/sum/list/set."""

    func: str
    args: tuple
    pos: Pos = _pos()


@dataclass(frozen=True)
class PairExpr:
    first: "Expr"
    second: "Expr"
    pos: Pos = _pos()


Expr = Union[Literal, Name, Member, MethodCall, Unary, Binary, CallExpr, PairExpr]


# -- operators ----------------------------------------------------------------------


@dataclass(frozen=True)
class Assignment:
    """``target.key = value``; ``value`` may be an aggregator call at the top."""

    target: Expr
    key: str
    value: Expr
    pos: Pos = _pos()


@dataclass(frozen=True)
class Lambda:
    params: tuple
    body: object  # Expr for filters, tuple[Assignment] for effects
    pos: Pos = _pos()


@dataclass(frozen=True)
class RouteRef:
    name: str  # out | in | both | outE | inE | bothE | @prop
    where: Optional[Lambda] = None
    effect: Optional[Lambda] = None
    pos: Pos = _pos()


@dataclass(frozen=True)
class FilterOp:
    pred: Expr
    pos: Pos = _pos()


@dataclass(frozen=True)
class LocalOp:
    writes: tuple
    pos: Pos = _pos()


@dataclass(frozen=True)
class RouteOp:
    op: str  # Push | Pull
    route: RouteRef
    pos: Pos = _pos()


@dataclass(frozen=True)
class GroupOp:
    keys: tuple
    effect: Optional[Lambda] = None
    pos: Pos = _pos()


@dataclass(frozen=True)
class OrderOp:
    keys: tuple  # of (key, "ASC" | "DESC" | None)
    limit: Optional[int] = None
    pos: Pos = _pos()


@dataclass(frozen=True)
class OutputOp:
    keys: tuple
    pos: Pos = _pos()


Operator = Union[FilterOp, LocalOp, RouteOp, GroupOp, OrderOp, OutputOp]


@dataclass(frozen=True)
class Chain:
    source: str
    ops: tuple
    pos: Pos = _pos()


# -- statements ---------------------------------------------------------------------


@dataclass(frozen=True)
class Assign:
    target: str
    chain: Chain
    pos: Pos = _pos()


@dataclass(frozen=True)
class ChainStmt:
    chain: Chain
    pos: Pos = _pos()


@dataclass(frozen=True)
class CallStmt:
    name: str
    args: tuple
    pos: Pos = _pos()


@dataclass(frozen=True)
class While:
    cond: Expr
    body: tuple
    pos: Pos = _pos()


@dataclass(frozen=True)
class DoWhile:
    body: tuple
    cond: Expr
    pos: Pos = _pos()


@dataclass(frozen=True)
class If:
    cond: Expr
    then: tuple
    orelse: Optional[tuple] = None
    pos: Pos = _pos()


@dataclass(frozen=True)
class Procedure:
    name: str
    params: tuple
    body: tuple
    pos: Pos = _pos()


Stmt = Union[Assign, ChainStmt, CallStmt, While, DoWhile, If]


@dataclass(frozen=True)
class Script:
    items: tuple  # Decl | ParamDecl | Procedure | Stmt, in source order
    pos: Pos = _pos()

    @property
    def decls(self) -> list:
        return [i for i in self.items if isinstance(i, Decl)]

    @property
    def params(self) -> list:
        return [i for i in self.items if isinstance(i, ParamDecl)]

    @property
    def procedures(self) -> dict:
        return {i.name: i for i in self.items if isinstance(i, Procedure)}

    @property
    def statements(self) -> list:
        return [i for i in self.items if not isinstance(i, (Decl, ParamDecl, Procedure))]


def to_json(node) -> object:
    """Plain JSON structure for ``--dump-ast``."""
    if isinstance(node, tuple):
        return [to_json(x) for x in node]
    if node is None or isinstance(node, (str, int, float, bool)):
        return node
    out = {"node": type(node).__name__}
    for f in fields(node):
        value = getattr(node, f.name)
        out[f.name] = list(value) if f.name == "pos" else to_json(value)
    return out


def walk(node):
    """Yield ``node`` and every AST node below it."""
    yield node
    if isinstance(node, tuple):
        for x in node:
            yield from walk(x)
        return
    if not hasattr(node, "__dataclass_fields__"):
        return
    for f in fields(node):
        if f.name == "pos":
            continue
        value = getattr(node, f.name)
        if isinstance(value, tuple) or hasattr(value, "__dataclass_fields__"):
            yield from walk(value)


def transform(node, fn):
    """Rebuild ``node`` bottom-up, replacing every sub-node ``x`` by ``fn(x)``."""
    if isinstance(node, tuple):
        return tuple(transform(x, fn) for x in node)
    if not hasattr(node, "__dataclass_fields__"):
        return node
    changes = {}
    for f in fields(node):
        if f.name == "pos":
            continue
        old = getattr(node, f.name)
        new = transform(old, fn)
        if new is not old:
            changes[f.name] = new
    if changes:
        node = replace(node, **changes)
    return fn(node)
