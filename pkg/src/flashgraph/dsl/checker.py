"""Static checks: declarations, names, set variables and expression types.

Types are :class:`~flashgraph.values.ValueType` values plus four checker-only
kinds: ``vertex`` and ``edge`` entities, ``nbrs`` (a neighbour view awaiting
``.size()``/``.min()``/``.max()``) and ``any`` (unknown static property when no
schema is supplied).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from ..graph import EDGE, VERTEX
from ..values import BOOL, FLOAT, ID, INT, LIST_ID, STRING, ValueType, pair_of
from . import ast as A
from .inline import Diagnostic, expand

VTX = ValueType("vertex")
EDG = ValueType("edge")
NBRS = ValueType("nbrs")
ANY = ValueType("any")

TOPO_ROUTES = ("out", "in", "both", "outE", "inE", "bothE")
EDGE_ROUTES = ("outE", "inE", "bothE")
AGGREGATORS = ("min", "max", "sum", "list", "set")
RESERVED_KEYS = ("id", "label", "src", "dst", "out", "in", "both", "outE", "inE", "bothE")


def type_of_ref(t: A.TypeRef) -> ValueType:
    if t.name == "Pair":
        return pair_of(type_of_ref(t.args[0]), type_of_ref(t.args[1]))
    return {"int": INT, "float": FLOAT, "bool": BOOL, "ID": ID, "string": STRING, "list": LIST_ID}[t.name]


def _numeric(t: ValueType) -> bool:
    return t in (INT, FLOAT, ID, VTX, ANY)


def _value(t: ValueType) -> ValueType:
    """Entities used as values denote their ids."""
    return ID if t == VTX else t


def assignable(src: ValueType, dst: ValueType) -> bool:
    src = _value(src)
    if ANY in (src, dst) or src == dst:
        return True
    if dst == FLOAT and src in (INT, ID):
        return True
    if {src, dst} <= {INT, ID}:
        return True
    if src.name == "pair" and dst.name == "pair":
        return all(assignable(a, b) for a, b in zip(src.args, dst.args))
    return False


def comparable(a: ValueType, b: ValueType, ordered: bool) -> bool:
    a, b = _value(a), _value(b)
    if ANY in (a, b):
        return True
    if _numeric(a) and _numeric(b):
        return True
    if a == b and a in (BOOL, STRING):
        return True
    if not ordered and a.name == b.name == "pair":
        return all(comparable(x, y, False) for x, y in zip(a.args, b.args))
    return False


@dataclass
class Schema:
    """Property types known to the checker: runtime declarations plus static graph schema."""

    runtime: dict = field(default_factory=dict)  # (target, name) -> ValueType
    static: Optional[dict] = None  # (target, name) -> ValueType; None = unknown, accept anything

    @classmethod
    def from_graph(cls, graph) -> "Schema":
        return cls(static={key: schema.vtype for key, (schema, _col) in graph.static.items()})

    def lookup(self, target: str, key: str) -> Optional[ValueType]:
        if key.startswith("@"):
            return self.runtime.get((target, key))
        if self.static is None:
            return ANY
        return self.static.get((target, key))


class Checker:
    def __init__(self, script: A.Script, schema: Optional[Schema] = None):
        self.script = script
        self.schema = Schema(static=None if schema is None else schema.static)
        self.diags: list[Diagnostic] = []
        self.params: dict[str, ValueType] = {}
        self.assigned: set[str] = {"V"}

    def error(self, msg: str, node) -> None:
        pos = getattr(node, "pos", (0, 0))
        self.diags.append(Diagnostic(msg, *pos))

    # -- top level ------------------------------------------------------------------

    def run(self) -> list[Diagnostic]:
        for item in self.script.items:
            if isinstance(item, A.Decl):
                self.declare(item)
            elif isinstance(item, A.ParamDecl):
                self.param(item)
        stmts, inline_diags = expand(self.script)
        self.diags.extend(inline_diags)
        self.statements(stmts)
        seen, out = set(), []
        for d in self.diags:
            key = (d.line, d.col, d.message)
            if key not in seen:
                seen.add(key)
                out.append(d)
        return sorted(out, key=lambda d: (d.line, d.col))

    def declare(self, d: A.Decl) -> None:
        target = EDGE if d.edge else VERTEX
        if (target, d.name) in self.schema.runtime:
            self.error(f"runtime property {d.name} declared twice", d)
            return
        if d.name[1:] in RESERVED_KEYS:
            self.error(f"{d.name} shadows the reserved property {d.name[1:]}", d)
        self.schema.runtime[(target, d.name)] = type_of_ref(d.type)

    def param(self, p: A.ParamDecl) -> None:
        if p.name in self.params:
            self.error(f"parameter {p.name} declared twice", p)
        vt = type_of_ref(p.type)
        self.params[p.name] = vt
        if p.default is not None:
            t = self.expr(p.default, {}, where="param")
            if not assignable(t, vt):
                self.error(f"default of {p.name} has type {t}, expected {vt}", p.default)

    def statements(self, stmts) -> None:
        for s in stmts:
            if isinstance(s, A.Assign):
                self.chain(s.chain)
                self.assigned.add(s.target)
            elif isinstance(s, A.ChainStmt):
                self.chain(s.chain)
            elif isinstance(s, A.While):
                self.condition(s.cond)
                self.statements(s.body)
            elif isinstance(s, A.DoWhile):
                self.statements(s.body)
                self.condition(s.cond)
            elif isinstance(s, A.If):
                self.condition(s.cond)
                self.statements(s.then)
                if s.orelse is not None:
                    self.statements(s.orelse)

    def condition(self, cond) -> None:
        t = self.expr(cond, {}, where="condition")
        if t not in (BOOL, ANY):
            self.error(f"condition must be bool, got {t}", cond)

    # -- chains ---------------------------------------------------------------------

    def chain(self, c: A.Chain) -> None:
        if c.source not in self.assigned:
            self.error(f"set variable {c.source} used before assignment", c)
        for op in c.ops:
            self.operator(op)

    def operator(self, op) -> None:
        scope = {"_": VTX}
        if isinstance(op, A.FilterOp):
            t = self.expr(op.pred, scope)
            if t not in (BOOL, ANY):
                self.error(f"Filter predicate must be bool, got {t}", op.pred)
        elif isinstance(op, A.LocalOp):
            for w in op.writes:
                if not (isinstance(w.target, A.Name) and w.target.ident == "_"):
                    self.error("Local may only write properties of _", w)
                    continue
                self.write(w, scope, VERTEX, aggregated=False)
        elif isinstance(op, A.RouteOp):
            self.route(op)
        elif isinstance(op, A.GroupOp):
            for k in op.keys:
                self.key(k, op, "Group")
            if op.effect is not None:
                if len(op.effect.params) != 1:
                    self.error("Group side effect takes exactly one parameter", op.effect)
                    return
                inner = {"_": VTX, op.effect.params[0]: VTX}
                for w in op.effect.body:
                    if not (isinstance(w.target, A.Name) and w.target.ident == op.effect.params[0]):
                        self.error(f"Group side effects must write {op.effect.params[0]}", w)
                        continue
                    self.write(w, inner, VERTEX, aggregated=True)
        elif isinstance(op, A.OrderOp):
            for k, _d in op.keys:
                t = self.key(k, op, "Order")
                if t == LIST_ID or (t is not None and t.name == "pair"):
                    self.error(f"cannot order by {k} of type {t}", op)
        elif isinstance(op, A.OutputOp):
            if op.keys != ("*",):
                for k in op.keys:
                    self.key(k, op, "Output")

    def key(self, k: str, op, what: str) -> Optional[ValueType]:
        if k in ("id", "label"):
            return ID if k == "id" else STRING
        t = self.schema.lookup(VERTEX, k)
        if t is None:
            kind = "runtime" if k.startswith("@") else "static"
            self.error(f"{what} key {k}: undeclared {kind} property", op)
        return t

    def route(self, op: A.RouteOp) -> None:
        r = op.route
        name = r.name
        if name.startswith("@"):
            declared = self.schema.lookup(VERTEX, name)
            if declared is None and name[1:] in TOPO_ROUTES:
                name = name[1:]  # "_.@both" written for the topological route
            elif declared is None:
                self.error(f"undeclared runtime property {name}", r)
                return
            elif declared not in (ID, LIST_ID):
                self.error(f"route property {name} has type {declared}, need ID or list", r)
                return
        elif name not in TOPO_ROUTES:
            self.error(f"unknown route {name}", r)
            return
        explicit = name in EDGE_ROUTES
        ptype = EDG if explicit else VTX
        if r.where is not None:
            if len(r.where.params) != 1:
                self.error("route filters take exactly one parameter", r.where)
            else:
                t = self.expr(r.where.body, {"_": VTX, r.where.params[0]: ptype})
                if t not in (BOOL, ANY):
                    self.error(f"route filter must be bool, got {t}", r.where.body)
        if r.effect is None:
            return
        if len(r.effect.params) != 1:
            self.error("route side effects take exactly one parameter", r.effect)
            return
        pname = r.effect.params[0]
        scope = {"_": VTX, pname: ptype}
        for w in r.effect.body:
            if isinstance(w.target, A.Name) and w.target.ident == pname and explicit:
                self.write(w, scope, EDGE, aggregated=False)
                continue
            tt = self.expr(w.target, scope)
            if tt not in (VTX, ID, ANY):
                self.error(f"side effect target must be a vertex, got {tt}", w.target)
                continue
            if op.op == "Pull" and not (isinstance(w.target, A.Name) and w.target.ident == "_"):
                self.error("Pull side effects write the pulling vertex _", w)
                continue
            self.write(w, scope, VERTEX, aggregated=True)

    def write(self, w: A.Assignment, scope: dict, target: str, aggregated: bool) -> None:
        if not w.key.startswith("@"):
            if w.key in RESERVED_KEYS:
                self.error(f"reserved property {w.key} is read-only", w)
            elif self.schema.lookup(target, w.key) is not None:
                self.error(f"static property {w.key} is read-only", w)
            else:
                self.error(f"cannot write {w.key}: runtime properties start with @", w)
            return
        ptype = self.schema.lookup(target, w.key)
        if ptype is None:
            self.error(f"undeclared runtime property {w.key}", w)
            return
        value = w.value
        if aggregated:
            if not (isinstance(value, A.CallExpr) and value.func in AGGREGATORS and len(value.args) == 1):
                self.error(f"write to {w.key} needs an aggregator (min/max/sum/list/set)", value)
                return
            t = self.aggregate(value, scope)
        else:
            if isinstance(value, A.CallExpr) and value.func in AGGREGATORS and len(value.args) == 1:
                self.error(f"aggregator {value.func} is not allowed here", value)
                return
            t = self.expr(value, scope)
        if t is not None and not assignable(t, ptype):
            self.error(f"cannot assign {t} to {w.key} of type {ptype}", value)

    def aggregate(self, call: A.CallExpr, scope: dict) -> Optional[ValueType]:
        t = _value(self.expr(call.args[0], scope))
        f = call.func
        if t == ANY:
            return ANY
        if f in ("min", "max"):
            if _numeric(t) or t == BOOL:
                return t
        elif f == "sum":
            if t in (INT, FLOAT, ID):
                return INT if t == ID else t
        elif t in (ID, INT):  # list / set of vertex ids
            return LIST_ID
        self.error(f"{f} cannot aggregate values of type {t}", call)
        return None

    # -- expressions ----------------------------------------------------------------

    def expr(self, e, scope: dict, where: str = "operator") -> ValueType:
        t = self._expr(e, scope, where)
        if t == NBRS:
            self.error("neighbour view needs .size(), .min() or .max()", e)
            return ANY
        return t

    def _expr(self, e, scope: dict, where: str) -> ValueType:
        if isinstance(e, A.Literal):
            return {"int": INT, "float": FLOAT, "string": STRING, "bool": BOOL, "INT_MAX": INT}[e.kind]
        if isinstance(e, A.Name):
            if e.ident in scope:
                return scope[e.ident]
            if e.ident in self.params:
                return self.params[e.ident]
            if e.ident in self.assigned:
                self.error(f"set variable {e.ident} can only be used as {e.ident}.size()", e)
            else:
                self.error(f"unknown name {e.ident}", e)
            return ANY
        if isinstance(e, A.Member):
            return self.member(e, scope, where)
        if isinstance(e, A.MethodCall):
            if isinstance(e.base, A.Name) and e.base.ident not in scope and e.base.ident not in self.params:
                if e.method != "size":
                    self.error(f"sets only support .size(), not .{e.method}()", e)
                elif e.base.ident not in self.assigned:
                    self.error(f"set variable {e.base.ident} used before assignment", e.base)
                return INT
            base = self._expr(e.base, scope, where)
            if base == NBRS:
                if e.method == "size":
                    return INT
                if e.method in ("min", "max"):
                    return ID
            elif base == ANY:
                return ANY
            self.error(f"unknown method .{e.method}() on {base}", e)
            return ANY
        if isinstance(e, A.Unary):
            t = self.expr(e.operand, scope, where)
            if e.op == "!":
                if t not in (BOOL, ANY):
                    self.error(f"operator ! needs bool, got {t}", e)
                return BOOL
            if not _numeric(t):
                self.error(f"unary - needs a number, got {t}", e)
                return ANY
            return _value(t)
        if isinstance(e, A.Binary):
            return self.binary(e, scope, where)
        if isinstance(e, A.CallExpr):
            if e.func in ("min", "max") and len(e.args) == 2:
                a = self.expr(e.args[0], scope, where)
                b = self.expr(e.args[1], scope, where)
                if not comparable(a, b, ordered=True):
                    self.error(f"{e.func} needs comparable operands, got {a} and {b}", e)
                    return ANY
                a, b = _value(a), _value(b)
                if ANY in (a, b):
                    return ANY
                if FLOAT in (a, b):
                    return FLOAT
                return a if a == b else INT
            if e.func == "abs" and len(e.args) == 1:
                t = self.expr(e.args[0], scope, where)
                if not _numeric(t):
                    self.error(f"abs needs a number, got {t}", e)
                    return ANY
                return _value(t)
            if e.func in AGGREGATORS and len(e.args) == 1:
                self.error(f"aggregator {e.func} is only allowed at the top of a side effect", e)
                return ANY
            self.error(f"{e.func} does not take {len(e.args)} argument(s)", e)
            return ANY
        if isinstance(e, A.PairExpr):
            return pair_of(_value(self.expr(e.first, scope, where)), _value(self.expr(e.second, scope, where)))
        self.error(f"unsupported expression {type(e).__name__}", e)
        return ANY

    def member(self, e: A.Member, scope: dict, where: str) -> ValueType:
        base = self._expr(e.base, scope, where)
        if base == ANY:
            return ANY
        key = e.key
        if base in (ID, INT):
            base = VTX  # vertex-valued expression used as a vertex, e.g. _.@p.@is_star
        if base == VTX:
            if key == "id":
                return ID
            if key == "label":
                return STRING
            if key in ("out", "in", "both"):
                return NBRS
            target = VERTEX
        elif base == EDG:
            if key == "id":
                return ID
            if key == "label":
                return STRING
            if key in ("src", "dst"):
                return VTX
            target = EDGE
        else:
            self.error(f"{base} has no property {key}", e)
            return ANY
        if key in RESERVED_KEYS:
            self.error(f"{key} is not defined on {'vertices' if target == VERTEX else 'edges'}", e)
            return ANY
        t = self.schema.lookup(target, key)
        if t is None:
            kind = "runtime" if key.startswith("@") else "static"
            self.error(f"undeclared {kind} property {key}", e)
            return ANY
        return t

    def binary(self, e: A.Binary, scope: dict, where: str) -> ValueType:
        a = self.expr(e.left, scope, where)
        b = self.expr(e.right, scope, where)
        op = e.op
        if op in ("&&", "||"):
            for t, side in ((a, e.left), (b, e.right)):
                if t not in (BOOL, ANY):
                    self.error(f"operator {op} needs bool, got {t}", side)
            return BOOL
        if op in ("==", "!=", "<", "<=", ">", ">="):
            if not comparable(a, b, ordered=op not in ("==", "!=")):
                self.error(f"cannot compare {a} with {b} using {op}", e)
            return BOOL
        if op == "+" and _value(a) == STRING and _value(b) == STRING:
            return STRING
        if not (_numeric(a) and _numeric(b)):
            self.error(f"operator {op} needs numbers, got {a} and {b}", e)
            return ANY
        a, b = _value(a), _value(b)
        if ANY in (a, b):
            return ANY
        if op == "/" or FLOAT in (a, b):
            return FLOAT
        return INT


def typecheck(script: A.Script, schema: Optional[Schema] = None) -> list[Diagnostic]:
    """All semantic diagnostics for ``script``; empty means it can be lowered."""
    return Checker(script, schema).run()


def declarations(script: A.Script) -> list[tuple[str, ValueType, str]]:
    """(name, type, target) for every runtime property declaration."""
    return [(d.name, type_of_ref(d.type), EDGE if d.edge else VERTEX) for d in script.decls]
