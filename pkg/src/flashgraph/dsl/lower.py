"""Lowering of checked scripts to a control-flow :class:`~flashgraph.machine.Machine`.

* a chain statement becomes one Op node (its operators run as a composite);
* ``while (c) {B}`` becomes a Switch guarding entry, then LoopS, B, LoopE with
  the feedback guarded by ``c``;
* ``do {B} while (c);`` is LoopS, B, LoopE with the guarded feedback;
* ``if`` becomes a Switch whose two branches rejoin at the next statement;
* conditions made of literals only (typically procedure flags) are folded, so
  only the taken branch is emitted.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import IO, Any, Optional

from .. import expr as X
from ..engine import Engine, Filter, Group, Local, Order, Output, Pull, Push, Route
from ..graph import RuntimePropertyGraph
from ..machine import DEFAULT_STEP_LIMIT, Machine, RunResult
from ..values import INT_MAX, ValueType, check_scalar
from . import ast as A
from .checker import EDGE_ROUTES, TOPO_ROUTES, Schema, declarations, type_of_ref, typecheck
from .inline import Diagnostic, _constant, expand
from .lexer import DslError


class LowerError(Diagnostic):
    pass


class ParamError(DslError):
    """Missing, unknown or ill-typed script parameter."""


class TypecheckError(DslError):
    def __init__(self, diagnostics: list):
        self.diagnostics = diagnostics
        first = diagnostics[0]
        super().__init__(first.message, first.line, first.col)
        self.args = ("\n".join(str(d) for d in diagnostics),)

    def __str__(self) -> str:
        return self.args[0]


# -- expressions --------------------------------------------------------------------


def lower_expr(e, rename: Optional[dict] = None, params: frozenset = frozenset()) -> X.Expr:
    rename = rename or {}

    def go(e):
        if isinstance(e, A.Literal):
            return X.Const(INT_MAX if e.kind == "INT_MAX" else e.value)
        if isinstance(e, A.Name):
            if e.ident in params:
                return X.Param(e.ident)
            return X.Var(rename.get(e.ident, e.ident))
        if isinstance(e, A.Member):
            return X.Attr(go(e.base), e.key)
        if isinstance(e, A.MethodCall):
            if isinstance(e.base, A.Member) and e.base.key in ("out", "in", "both"):
                return X.Nbr(go(e.base.base), e.base.key, e.method)
            if isinstance(e.base, A.Name) and e.method == "size":
                return X.SetSize(e.base.ident)
            raise LowerError(f"cannot lower .{e.method}()", *e.pos)
        if isinstance(e, A.Unary):
            return X.UnOp(e.op, go(e.operand))
        if isinstance(e, A.Binary):
            return X.BinOp(e.op, go(e.left), go(e.right))
        if isinstance(e, A.CallExpr):
            return X.Call(e.func, tuple(go(a) for a in e.args))
        if isinstance(e, A.PairExpr):
            return X.MakePair(go(e.first), go(e.second))
        raise LowerError(f"cannot lower {type(e).__name__}", *getattr(e, "pos", (0, 0)))

    return go(e)


def _lower_write(w: A.Assignment, aggregated: bool, rename: dict, params: frozenset) -> X.Write:
    target = lower_expr(w.target, rename, params)
    if aggregated and isinstance(w.value, A.CallExpr) and len(w.value.args) == 1:
        return X.Write(target, w.key, lower_expr(w.value.args[0], rename, params), w.value.func)
    return X.Write(target, w.key, lower_expr(w.value, rename, params), None)


def _constant_bool(e) -> Optional[bool]:
    """Value of a condition built from literals only, else None."""
    if isinstance(e, A.Literal):
        return e.value if e.kind == "bool" else None
    if isinstance(e, A.Unary) and e.op == "!":
        v = _constant_bool(e.operand)
        return None if v is None else not v
    if isinstance(e, A.Binary) and e.op in ("&&", "||"):
        a, b = _constant_bool(e.left), _constant_bool(e.right)
        if a is None or b is None:
            return None
        return (a and b) if e.op == "&&" else (a or b)
    return None


# -- program ------------------------------------------------------------------------


@dataclass
class ScriptRun:
    graph: RuntimePropertyGraph
    run: RunResult
    stats: dict = field(default_factory=dict)


@dataclass
class Program:
    """A lowered script: the machine plus what it needs from the host."""

    script: A.Script
    machine: Machine
    properties: list  # (name, ValueType, target)
    params: dict  # name -> (ValueType, default or None)

    def bind_params(self, given: Optional[dict] = None) -> dict:
        given = dict(given or {})
        out = {}
        for name, (vt, default) in self.params.items():
            if name in given:
                out[name] = coerce_param(name, vt, given.pop(name))
            elif default is not None:
                out[name] = default
            else:
                raise ParamError(f"missing value for parameter {name} ({vt})")
        if given:
            raise ParamError(f"unknown parameter(s): {', '.join(sorted(given))}")
        return out

    def run(
        self,
        graph: RuntimePropertyGraph,
        threads: int = 1,
        params: Optional[dict] = None,
        out: Optional[IO[str]] = None,
        trace_sink: Optional[IO[str]] = None,
        step_limit: int = DEFAULT_STEP_LIMIT,
        record: bool = True,
    ) -> ScriptRun:
        bound = self.bind_params(params)
        g = graph.fresh()
        for name, vt, target in self.properties:
            g.declare(name, vt, target)
        with Engine(g, threads, params=bound, out=out) as eng:
            res = self.machine.run(eng, step_limit=step_limit, trace_sink=trace_sink, record=record)
            return ScriptRun(g, res, dict(eng.stats))


def coerce_param(name: str, vt: ValueType, value: Any):
    if isinstance(value, str) and vt.name != "string":
        text = value.strip()
        try:
            if vt.name in ("int", "ID"):
                value = int(text)
            elif vt.name == "float":
                value = float(text)
            elif vt.name == "bool" and text in ("true", "false"):
                value = text == "true"
        except ValueError:
            raise ParamError(f"parameter {name} expects {vt}, got {value!r}") from None
    try:
        return check_scalar(vt, value)
    except TypeError as exc:
        raise ParamError(f"parameter {name}: {exc}") from None


class Lowerer:
    def __init__(self, script: A.Script):
        self.script = script
        self.m = Machine()
        self.params = frozenset(p.name for p in script.params)
        self.pending: list = []
        self.count = {"O": 0, "S": 0, "L": 0, "b": 0}
        users = set()
        for node in A.walk(script):
            if isinstance(node, A.Assign):
                users.add(node.target)
            elif isinstance(node, A.Chain):
                users.add(node.source)
        self.user_sets = users

    def fresh(self, prefix: str) -> str:
        while True:
            self.count[prefix] += 1
            name = f"{prefix}{self.count[prefix]}"
            if name not in self.user_sets and name not in self.m.nodes and name not in self.m.predicates:
                return name

    def connect(self, dst: str) -> None:
        for src, guard in self.pending:
            self.m.edge(src, dst, guard)
        self.pending = [(dst, None)]

    def lower(self, stmts) -> Machine:
        self.m.input("V", name="Input")
        self.pending = [("Input", None)]
        self.block(stmts)
        self.m.fin("Fin")
        self.connect("Fin")
        return self.m

    def block(self, stmts) -> None:
        for s in stmts:
            self.statement(s)

    def predicate(self, cond) -> str:
        name = self.fresh("b")
        self.m.predicate(name, lower_expr(cond, params=self.params))
        return name

    def statement(self, s) -> None:
        if isinstance(s, (A.Assign, A.ChainStmt)):
            node = self.fresh("O")
            ops = [self.operator(op) for op in s.chain.ops]
            assign = s.target if isinstance(s, A.Assign) else None
            self.m.op(node, ops, source=s.chain.source, assign=assign)
            self.connect(node)
        elif isinstance(s, A.While):
            const = _constant_bool(s.cond)
            if const is False:
                return
            if const is True:
                raise LowerError("while loop with a constant true condition never exits", *s.pos)
            b = self.predicate(s.cond)
            sw, ls, le = self.fresh("S"), self.fresh("L"), self.fresh("L")
            self.m.switch(sw)
            self.connect(sw)
            self.m.loop_start(ls)
            self.m.edge(sw, ls, (b, True))
            self.pending = [(ls, None)]
            self.block(s.body)
            self.m.loop_end(le)
            self.connect(le)
            self.m.edge(le, ls, (b, True))
            self.pending = [(sw, (b, False)), (le, (b, False))]
        elif isinstance(s, A.DoWhile):
            const = _constant_bool(s.cond)
            if const is True:
                raise LowerError("do-while loop with a constant true condition never exits", *s.pos)
            if const is False:
                self.block(s.body)
                return
            ls, le = self.fresh("L"), self.fresh("L")
            self.m.loop_start(ls)
            self.connect(ls)
            self.block(s.body)
            self.m.loop_end(le)
            self.connect(le)
            b = self.predicate(s.cond)
            self.m.edge(le, ls, (b, True))
            self.pending = [(le, (b, False))]
        elif isinstance(s, A.If):
            const = _constant_bool(s.cond)
            if const is not None:
                self.block(s.then if const else (s.orelse or ()))
                return
            b = self.predicate(s.cond)
            sw = self.fresh("S")
            self.m.switch(sw)
            self.connect(sw)
            self.pending = [(sw, (b, True))]
            self.block(s.then)
            after_then = self.pending
            self.pending = [(sw, (b, False))]
            self.block(s.orelse or ())
            self.pending = after_then + self.pending
        else:
            raise LowerError(f"unsupported statement {type(s).__name__}", *s.pos)

    def operator(self, op):
        p = self.params
        if isinstance(op, A.FilterOp):
            return Filter(lower_expr(op.pred, params=p))
        if isinstance(op, A.LocalOp):
            return Local(tuple(_lower_write(w, False, {}, p) for w in op.writes))
        if isinstance(op, A.RouteOp):
            r = op.route
            kind = r.name
            if kind.startswith("@") and kind[1:] in TOPO_ROUTES and (("vertex", kind) not in self._declared()):
                kind = kind[1:]
            explicit = kind in EDGE_ROUTES
            param = (r.effect.params[0] if r.effect is not None
                     else r.where.params[0] if r.where is not None
                     else ("e" if explicit else "v"))
            where = None
            if r.where is not None:
                where = lower_expr(r.where.body, {r.where.params[0]: param}, p)
            writes = ()
            if r.effect is not None:
                edge_param = param if explicit else None
                writes = tuple(
                    _lower_write(w, not (isinstance(w.target, A.Name) and w.target.ident == edge_param), {}, p)
                    for w in r.effect.body
                )
            rt = Route(kind, param, where)
            return (Push if op.op == "Push" else Pull)(rt, writes)
        if isinstance(op, A.GroupOp):
            if op.effect is None:
                return Group(tuple(op.keys))
            writes = tuple(_lower_write(w, True, {}, p) for w in op.effect.body)
            return Group(tuple(op.keys), writes, op.effect.params[0])
        if isinstance(op, A.OrderOp):
            return Order(tuple((k, d == "DESC") for k, d in op.keys), op.limit)
        if isinstance(op, A.OutputOp):
            return Output(tuple(op.keys))
        raise LowerError(f"unsupported operator {type(op).__name__}", *op.pos)

    def _declared(self) -> set:
        return {("edge" if d.edge else "vertex", d.name) for d in self.script.decls}


def lower(script: A.Script) -> Program:
    """Machine for an already checked script."""
    stmts, diags = expand(script)
    if diags:
        raise diags[0]
    machine = Lowerer(script).lower(stmts)
    problems = machine.validate()
    if problems:
        raise LowerError("lowered machine is malformed: " + "; ".join(problems), 1, 1)
    params = {}
    for p in script.params:
        default = None
        if p.default is not None:
            lit = _constant(p.default)
            if lit is None:
                raise LowerError(f"default of {p.name} must be a literal", *p.default.pos)
            value = INT_MAX if lit.kind == "INT_MAX" else lit.value
            default = coerce_param(p.name, type_of_ref(p.type), value)
        params[p.name] = (type_of_ref(p.type), default)
    return Program(script, machine, declarations(script), params)


def compile_script(script: A.Script, schema: Optional[Schema] = None) -> Program:
    diags = typecheck(script, schema)
    if diags:
        raise TypecheckError(diags)
    return lower(script)
