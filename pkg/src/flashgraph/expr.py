"""Expression IR for operator predicates and side effects, plus a vectorised evaluator.

Expressions are built either by the script frontend or directly in Python::

    from flashgraph.expr import _, var, Min
    v = var("v")
    _["@precc"] < _["@cc"]                   # filter predicate
    v.set("@precc", Min(_["@cc"]))           # aggregated write along a route
    _.set("@p", fmin(_.id, _.out.min()))     # local write

Every node evaluates over a batch of bindings at once (numpy arrays), so one
operator evaluation costs a handful of array operations regardless of size.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Optional

import numpy as np

from .graph import EDGE, VERTEX, PropertyError, RuntimePropertyGraph
from .values import NULL_VERTEX

AGGREGATORS = ("min", "max", "sum", "list", "set")


class EvalError(Exception):
    """Raised when an expression cannot be evaluated (type mismatch, bad id, ...)."""


class Expr:
    __slots__ = ()

    # arithmetic
    def __add__(self, o):
        return BinOp("+", self, lift(o))

    def __radd__(self, o):
        return BinOp("+", lift(o), self)

    def __sub__(self, o):
        return BinOp("-", self, lift(o))

    def __rsub__(self, o):
        return BinOp("-", lift(o), self)

    def __mul__(self, o):
        return BinOp("*", self, lift(o))

    def __rmul__(self, o):
        return BinOp("*", lift(o), self)

    def __truediv__(self, o):
        return BinOp("/", self, lift(o))

    def __rtruediv__(self, o):
        return BinOp("/", lift(o), self)

    def __mod__(self, o):
        return BinOp("%", self, lift(o))

    def __neg__(self):
        return UnOp("-", self)

    # comparison
    def __lt__(self, o):
        return BinOp("<", self, lift(o))

    def __le__(self, o):
        return BinOp("<=", self, lift(o))

    def __gt__(self, o):
        return BinOp(">", self, lift(o))

    def __ge__(self, o):
        return BinOp(">=", self, lift(o))

    def __eq__(self, o):  # type: ignore[override]
        return BinOp("==", self, lift(o))

    def __ne__(self, o):  # type: ignore[override]
        return BinOp("!=", self, lift(o))

    # logic
    def __and__(self, o):
        return BinOp("&&", self, lift(o))

    def __rand__(self, o):
        return BinOp("&&", lift(o), self)

    def __or__(self, o):
        return BinOp("||", self, lift(o))

    def __ror__(self, o):
        return BinOp("||", lift(o), self)

    def __invert__(self):
        return UnOp("!", self)

    def __bool__(self):
        raise TypeError("expressions have no truth value; use & | ~ to combine them")

    __hash__ = object.__hash__

    # property access
    def __getitem__(self, key: str) -> "Attr":
        return Attr(self, key)

    @property
    def id(self) -> "Attr":
        return Attr(self, "id")

    @property
    def label(self) -> "Attr":
        return Attr(self, "label")

    @property
    def src(self) -> "Attr":
        return Attr(self, "src")

    @property
    def dst(self) -> "Attr":
        return Attr(self, "dst")

    @property
    def out(self) -> "NbrRef":
        return NbrRef(self, "out")

    @property
    def in_(self) -> "NbrRef":
        return NbrRef(self, "in")

    @property
    def both(self) -> "NbrRef":
        return NbrRef(self, "both")

    def set(self, key: str, value) -> "Write":
        """Side effect ``self.key = value``; wrap ``value`` in Min/Sum/... to aggregate."""
        if isinstance(value, AggCall):
            return Write(self, key, value.arg, value.op)
        return Write(self, key, lift(value), None)


@dataclass(frozen=True, eq=False)
class Const(Expr):
    value: Any


@dataclass(frozen=True, eq=False)
class Var(Expr):
    name: str


@dataclass(frozen=True, eq=False)
class Param(Expr):
    name: str


@dataclass(frozen=True, eq=False)
class Attr(Expr):
    base: Expr
    key: str


@dataclass(frozen=True, eq=False)
class Nbr(Expr):
    """Fold over a vertex's neighbour list: ``_.out.size()`` / ``_.out.min()``."""

    base: Expr
    direction: str
    fold: str


@dataclass(frozen=True, eq=False)
class SetSize(Expr):
    name: str


@dataclass(frozen=True, eq=False)
class BinOp(Expr):
    op: str
    left: Expr
    right: Expr


@dataclass(frozen=True, eq=False)
class UnOp(Expr):
    op: str
    operand: Expr


@dataclass(frozen=True, eq=False)
class Call(Expr):
    func: str  # min | max | abs
    args: tuple


@dataclass(frozen=True, eq=False)
class MakePair(Expr):
    first: Expr
    second: Expr


@dataclass(frozen=True, eq=False)
class Apply(Expr):
    """Opaque vectorised function of its arguments (embedded API only)."""

    fn: Callable
    args: tuple
    name: str = "fn"


@dataclass(frozen=True)
class NbrRef:
    base: Expr
    direction: str

    def size(self) -> Nbr:
        return Nbr(self.base, self.direction, "size")

    def min(self) -> Nbr:
        return Nbr(self.base, self.direction, "min")

    def max(self) -> Nbr:
        return Nbr(self.base, self.direction, "max")


@dataclass(frozen=True)
class AggCall:
    op: str
    arg: Expr


@dataclass(frozen=True)
class Write:
    """``target.key = [agg](value)``; target is an entity expression (``_``, ``v``, ``e.dst`` ...)."""

    target: Expr
    key: str
    value: Expr
    agg: Optional[str] = None


def lift(x) -> Expr:
    if isinstance(x, Expr):
        return x
    if isinstance(x, NbrRef):
        raise TypeError("neighbour views need .size()/.min()/.max()")
    if isinstance(x, tuple) and len(x) == 2:
        return MakePair(lift(x[0]), lift(x[1]))
    return Const(x)


def var(name: str) -> Var:
    return Var(name)


def param(name: str) -> Param:
    return Param(name)


def size_of(name: str) -> SetSize:
    """``A.size()`` for a set variable (``"V"`` is the whole vertex set)."""
    return SetSize(name)


_ = Var("_")


def fmin(a, b) -> Call:
    return Call("min", (lift(a), lift(b)))


def fmax(a, b) -> Call:
    return Call("max", (lift(a), lift(b)))


def fabs(a) -> Call:
    return Call("abs", (lift(a),))


def apply(fn: Callable, *args, name: str = "fn") -> Apply:
    return Apply(fn, tuple(lift(a) for a in args), name)


def Min(x) -> AggCall:
    return AggCall("min", lift(x))


def Max(x) -> AggCall:
    return AggCall("max", lift(x))


def Sum(x) -> AggCall:
    return AggCall("sum", lift(x))


def List(x) -> AggCall:
    return AggCall("list", lift(x))


def Set(x) -> AggCall:
    return AggCall("set", lift(x))


# -- evaluation --------------------------------------------------------------------


@dataclass
class Binding:
    """An entity variable bound to a batch of ids.

    For edges bound through a route, ``src``/``dst`` hold the endpoints as
    seen from the routing vertex (relative orientation on undirected graphs).
    """

    kind: str
    ids: np.ndarray
    src: Optional[np.ndarray] = None
    dst: Optional[np.ndarray] = None


@dataclass
class Env:
    graph: RuntimePropertyGraph
    size: int
    bindings: dict[str, Binding]
    set_size: Callable[[str], int] = field(default=lambda name: 0)
    params: dict[str, Any] = field(default_factory=dict)


def broadcast(value, size: int) -> np.ndarray:
    if isinstance(value, np.ndarray) and value.ndim == 1:
        return value
    if isinstance(value, tuple):
        out = np.empty(size, dtype=object)
        for i in range(size):
            out[i] = value
        return out
    return np.full(size, value)


def evaluate(expr: Expr, env: Env) -> np.ndarray:
    """Evaluate ``expr`` for every binding in ``env``; always returns a length-``size`` array."""
    return broadcast(_eval(expr, env), env.size)


def evaluate_scalar(expr: Expr, env: Env):
    """Evaluate an expression with no entity bindings (loop/branch guards)."""
    val = _eval(expr, env)
    if isinstance(val, np.ndarray):
        if val.size != 1:
            raise EvalError("guard expression must be scalar")
        val = val[0]
    return val.item() if isinstance(val, np.generic) else val


def entity(expr: Expr, env: Env) -> Binding:
    """Resolve an entity-valued expression (vertex or edge) to a binding."""
    if isinstance(expr, Var):
        try:
            return env.bindings[expr.name]
        except KeyError:
            raise EvalError(f"unbound variable {expr.name!r}") from None
    if isinstance(expr, Attr) and expr.key in ("src", "dst"):
        base = entity(expr.base, env)
        if base.kind != EDGE:
            raise EvalError(f"'{expr.key}' is only defined on edges")
        oriented = base.src if expr.key == "src" else base.dst
        if oriented is None:
            g = env.graph
            oriented = (g.edge_src if expr.key == "src" else g.edge_dst)[base.ids]
        return Binding(VERTEX, oriented)
    ids = broadcast(_eval(expr, env), env.size)
    if ids.dtype.kind not in "iu":
        raise EvalError("expression does not denote a vertex")
    if ids.size and (ids.max() >= env.graph.n_total or ids.min() < 0):
        raise EvalError("vertex reference is NULL or out of range")
    return Binding(VERTEX, ids.astype(np.int64, copy=False))


def _eval(expr: Expr, env: Env):
    t = type(expr)
    if t is Const:
        return expr.value
    if t is Attr:
        return _eval_attr(expr, env)
    if t is BinOp:
        return _eval_binop(expr.op, _eval(expr.left, env), _eval(expr.right, env))
    if t is Var:
        b = entity(expr, env)
        return b.ids
    if t is Nbr:
        return _eval_nbr(expr, env)
    if t is Call:
        args = [_eval(a, env) for a in expr.args]
        if expr.func == "abs":
            return np.abs(args[0])
        _check_ordered(args[0], args[1], expr.func)
        return (np.minimum if expr.func == "min" else np.maximum)(args[0], args[1])
    if t is UnOp:
        x = _eval(expr.operand, env)
        if expr.op == "!":
            _require_bool(x, "!")
            return np.logical_not(x)
        return np.negative(x)
    if t is SetSize:
        return env.set_size(expr.name)
    if t is Param:
        try:
            return env.params[expr.name]
        except KeyError:
            raise EvalError(f"unbound parameter {expr.name!r}") from None
    if t is MakePair:
        a = broadcast(_eval(expr.first, env), env.size).tolist()
        b = broadcast(_eval(expr.second, env), env.size).tolist()
        out = np.empty(env.size, dtype=object)
        for i in range(env.size):
            out[i] = (a[i], b[i])
        return out
    if t is Apply:
        args = [broadcast(_eval(a, env), env.size) for a in expr.args]
        return np.asarray(expr.fn(*args))
    raise EvalError(f"cannot evaluate {expr!r}")


def _eval_attr(expr: Attr, env: Env):
    key = expr.key
    base = expr.base
    b = env.bindings.get(base.name) if type(base) is Var else None
    if b is None:
        b = entity(base, env)
    g = env.graph
    if key == "id":
        return b.ids
    if key == "label":
        names = np.array(g.label_names, dtype=object)
        if b.kind == EDGE:
            return names[g.edge_label[b.ids]]
        codes = np.zeros(b.ids.size, dtype=np.int32)
        real = b.ids < g.n
        codes[real] = g.vertex_label[b.ids[real]]
        return names[codes]
    if key in ("src", "dst"):
        return entity(expr, env).ids
    try:
        return g.read_column(key, b.kind, b.ids)
    except PropertyError as exc:
        raise EvalError(str(exc)) from None


def _eval_nbr(expr: Nbr, env: Env):
    b = entity(expr.base, env)
    g = env.graph
    table = g.neighbor_fold(expr.direction, expr.fold)
    ids = b.ids
    if g.n_grouped == 0 or ids.size == 0 or ids.max() < g.n:
        return table[ids]
    ident = 0 if expr.fold == "size" else (NULL_VERTEX if expr.fold == "min" else -1)
    out = np.full(ids.size, ident, dtype=np.int64)
    real = ids < g.n
    out[real] = table[ids[real]]
    return out


def _is_obj(x) -> bool:
    return (isinstance(x, np.ndarray) and x.dtype == object) or isinstance(x, (str, tuple))


def _require_bool(x, op):
    dt = x.dtype if isinstance(x, np.ndarray) else np.asarray(x).dtype
    if dt.kind != "b":
        raise EvalError(f"operator {op} needs boolean operands")


def _check_ordered(a, b, op):
    if _is_obj(a) or _is_obj(b):
        raise EvalError(f"{op} needs numeric or boolean operands")


def _obj_compare(op, a, b):
    size = max(len(a) if isinstance(a, np.ndarray) else 1, len(b) if isinstance(b, np.ndarray) else 1)
    la = a.tolist() if isinstance(a, np.ndarray) else [a] * size
    lb = b.tolist() if isinstance(b, np.ndarray) else [b] * size
    if op == "==":
        return np.array([x == y for x, y in zip(la, lb)], dtype=bool)
    if op == "!=":
        return np.array([x != y for x, y in zip(la, lb)], dtype=bool)
    fn = {"<": lambda x, y: x < y, "<=": lambda x, y: x <= y, ">": lambda x, y: x > y, ">=": lambda x, y: x >= y}[op]
    try:
        return np.array([fn(x, y) for x, y in zip(la, lb)], dtype=bool)
    except TypeError as exc:
        raise EvalError(str(exc)) from None


_ARITH = {"+": np.add, "-": np.subtract, "*": np.multiply, "%": np.mod}
_CMP = {"<": np.less, "<=": np.less_equal, ">": np.greater, ">=": np.greater_equal, "==": np.equal, "!=": np.not_equal}


def _eval_binop(op, a, b):
    if op in ("&&", "||"):
        _require_bool(a, op)
        _require_bool(b, op)
        return np.logical_and(a, b) if op == "&&" else np.logical_or(a, b)
    if op in _CMP:
        if _is_obj(a) or _is_obj(b):
            return _obj_compare(op, a, b)
        return _CMP[op](a, b)
    if _is_obj(a) or _is_obj(b):
        if op == "+" and isinstance(a, (str, np.ndarray)) and isinstance(b, (str, np.ndarray)):
            return np.add(np.asarray(a, dtype=object), np.asarray(b, dtype=object))
        raise EvalError(f"operator {op} needs numeric operands")
    if op == "/":
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.true_divide(a, b)
    try:
        return _ARITH[op](a, b)
    except KeyError:
        raise EvalError(f"unknown operator {op!r}") from None
    except TypeError as exc:
        raise EvalError(str(exc)) from None


def free_vars(expr) -> set[str]:
    """Names of entity variables referenced by an expression or write."""
    if isinstance(expr, Write):
        return free_vars(expr.target) | free_vars(expr.value)
    if isinstance(expr, Var):
        return {expr.name}
    out: set[str] = set()
    for child in children(expr):
        out |= free_vars(child)
    return out


def children(expr) -> tuple:
    if isinstance(expr, (Attr, Nbr)):
        return (expr.base,)
    if isinstance(expr, BinOp):
        return (expr.left, expr.right)
    if isinstance(expr, UnOp):
        return (expr.operand,)
    if isinstance(expr, (Call, Apply)):
        return tuple(expr.args)
    if isinstance(expr, MakePair):
        return (expr.first, expr.second)
    return ()


def render(expr) -> str:
    """Human-readable form used in traces and machine dumps."""
    if isinstance(expr, Write):
        tgt = f"{render(expr.target)}.{expr.key}"
        val = render(expr.value)
        return f"{tgt} = {expr.agg}({val})" if expr.agg else f"{tgt} = {val}"
    if isinstance(expr, Const):
        if isinstance(expr.value, bool):
            return "true" if expr.value else "false"
        if isinstance(expr.value, str):
            return '"' + expr.value.replace("\\", "\\\\").replace('"', '\\"') + '"'
        if expr.value == NULL_VERTEX:
            return "INT_MAX"
        return repr(expr.value)
    if isinstance(expr, Var):
        return expr.name
    if isinstance(expr, Param):
        return expr.name
    if isinstance(expr, Attr):
        return f"{render(expr.base)}.{expr.key}"
    if isinstance(expr, Nbr):
        return f"{render(expr.base)}.{expr.direction}.{expr.fold}()"
    if isinstance(expr, SetSize):
        return f"{expr.name}.size()"
    if isinstance(expr, BinOp):
        return f"({render(expr.left)} {expr.op} {render(expr.right)})"
    if isinstance(expr, UnOp):
        return f"{expr.op}{render(expr.operand)}"
    if isinstance(expr, Call):
        return f"{expr.func}({', '.join(render(a) for a in expr.args)})"
    if isinstance(expr, MakePair):
        return f"({render(expr.first)}, {render(expr.second)})"
    if isinstance(expr, Apply):
        return f"{expr.name}({', '.join(render(a) for a in expr.args)})"
    return repr(expr)
