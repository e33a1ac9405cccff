"""VertexSet operator algebra: Filter, Local, Push, Pull, Group, Order, Output.

Each operator is finalised before it returns. Push/Pull/Group evaluate every
contribution against the graph state frozen at operator start, then fold the
contributions per target with the write's aggregator and apply them in one
step (the barrier). Work is split into contiguous chunks of the input set;
chunk results are merged in chunk order, so the contribution sequence, and
therefore every column, is identical for any thread count.
"""

from __future__ import annotations

import sys
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import IO, Callable, Iterable, Iterator, Optional, Sequence, Union

import numpy as np

from .expr import Binding, Env, EvalError, Expr, Var, Write, evaluate, entity, lift, render
from .graph import EDGE, RUNTIME, VERTEX, PropertyError, RuntimePropertyGraph
from .values import FLOAT, ID, INT, INT_MAX, INT_MIN, LIST_ID, NULL_VERTEX, ValueType, format_value


class EngineError(Exception):
    """Operator misuse: missing aggregator, bad route, unknown key, ..."""


# -- VertexSet ---------------------------------------------------------------------


class VertexSet:
    """Duplicate-free set of vertex ids; ascending unless produced by Order."""

    __slots__ = ("ids",)

    def __init__(self, ids: Iterable[int] = ()):
        arr = np.asarray(list(ids) if not isinstance(ids, np.ndarray) else ids, dtype=np.int64)
        self.ids = np.unique(arr)
        self.ids.flags.writeable = False

    @classmethod
    def _trusted(cls, ids: np.ndarray) -> "VertexSet":
        vs = object.__new__(cls)
        vs.ids = ids
        return vs

    @classmethod
    def range(cls, n: int) -> "VertexSet":
        return cls._trusted(np.arange(n, dtype=np.int64))

    def __len__(self) -> int:
        return int(self.ids.size)

    def size(self) -> int:
        return int(self.ids.size)

    def __iter__(self) -> Iterator[int]:
        return iter(self.ids.tolist())

    def __contains__(self, v) -> bool:
        return bool(np.any(self.ids == v))

    def __eq__(self, other) -> bool:
        if isinstance(other, VertexSet):
            return np.array_equal(self.ids, other.ids)
        return NotImplemented

    def __hash__(self):
        return hash(self.ids.tobytes())

    def tolist(self) -> list[int]:
        return self.ids.tolist()

    def __repr__(self) -> str:
        items = self.ids[:10].tolist()
        tail = ", ..." if self.ids.size > 10 else ""
        return f"VertexSet({items}{tail})"


# -- aggregation -------------------------------------------------------------------


def _identity(op: str, vt: ValueType):
    if op == "sum":
        return 0.0 if vt.name == "float" else 0
    if op in ("list", "set"):
        return ()
    if vt.name == "bool":
        return op == "min"
    if vt.name == "float":
        return float("inf") if op == "min" else float("-inf")
    if vt.name == "ID":
        return NULL_VERTEX if op == "min" else 0
    if vt.name == "int":
        return INT_MAX if op == "min" else INT_MIN
    raise EngineError(f"{op} has no identity for {vt}")


@dataclass(frozen=True)
class Aggregator:
    """Commutative, associative combiner with an identity element."""

    op: str
    vtype: ValueType = INT

    def __post_init__(self):
        if self.op not in ("min", "max", "sum", "list", "set"):
            raise EngineError(f"unknown aggregator {self.op!r}")

    @property
    def identity(self):
        return _identity(self.op, self.vtype)

    def combine(self, a, b):
        return aggregate_combine(self, a, b)


def aggregate_combine(agg: Aggregator, a, b):
    """Binary combine; List results are canonicalised (sorted), Set results deduplicated."""
    op = agg.op
    if op in ("list", "set"):
        if not isinstance(a, tuple) or not isinstance(b, tuple):
            raise TypeError("list/set aggregation combines tuples")
        merged = a + b
        return tuple(sorted(set(merged))) if op == "set" else tuple(sorted(merged))
    if isinstance(a, (tuple, str)) != isinstance(b, (tuple, str)):
        raise TypeError(f"cannot combine {a!r} and {b!r}")
    if isinstance(a, bool) != isinstance(b, bool):
        raise TypeError(f"cannot combine {a!r} and {b!r}")
    if op == "min":
        return min(a, b)
    if op == "max":
        return max(a, b)
    if isinstance(a, (tuple, str, bool)):
        raise TypeError("sum needs numeric values")
    return a + b


def reduce_by_target(op: str, targets: np.ndarray, values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Fold ``values`` per distinct target; contributions keep their original relative order."""
    if targets.size == 0:
        return targets, values[:0]
    if targets.size == 1 and (op in ("min", "max") or (op == "sum" and values.dtype.kind in "if")):
        return targets, values
    order = np.argsort(targets, kind="stable")
    t = targets[order]
    x = values[order]
    starts = np.flatnonzero(np.concatenate(([True], t[1:] != t[:-1])))
    uniq = t[starts]
    if x.dtype == object:
        bounds = np.append(starts, t.size)
        out = np.empty(uniq.size, dtype=object)
        xs = x.tolist()
        for i in range(uniq.size):
            seg = xs[bounds[i]:bounds[i + 1]]
            out[i] = _fold_objects(op, seg)
        return uniq, out
    if op in ("list", "set"):
        bounds = np.append(starts, t.size)
        out = np.empty(uniq.size, dtype=object)
        xs = x.tolist()
        for i in range(uniq.size):
            seg = xs[bounds[i]:bounds[i + 1]]
            out[i] = tuple(sorted(set(seg))) if op == "set" else tuple(sorted(seg))
        return uniq, out
    if op == "sum":
        if x.dtype.kind == "b":
            x = x.astype(np.int64)
        return uniq, np.add.reduceat(x, starts)
    if op == "min":
        return uniq, np.minimum.reduceat(x, starts)
    if op == "max":
        return uniq, np.maximum.reduceat(x, starts)
    raise EngineError(f"unknown aggregator {op!r}")


def _fold_objects(op, seg):
    if op == "list":
        return tuple(sorted(_flatten(seg)))
    if op == "set":
        return tuple(sorted(set(_flatten(seg))))
    if op == "min":
        return min(seg)
    if op == "max":
        return max(seg)
    raise EngineError(f"{op} is not defined on non-numeric values")


def _flatten(seg):
    for x in seg:
        if isinstance(x, tuple):
            yield from x
        else:
            yield x


# -- routes and operator specs -------------------------------------------------------

TOPOLOGY = {"out": "out", "in": "in", "both": "both", "outE": "out", "inE": "in", "bothE": "both"}


@dataclass(frozen=True, eq=False)
class Route:
    """Route function: topological (``out``/``inE``/...) or implicit via a vertex-valued property."""

    kind: str
    param: str = "v"
    where: Optional[Expr] = None

    def __post_init__(self):
        if self.kind not in TOPOLOGY and not self.kind.startswith("@"):
            raise EngineError(f"unknown route {self.kind!r}")

    @property
    def explicit(self) -> bool:
        return self.kind.endswith("E")

    @property
    def is_property(self) -> bool:
        return self.kind.startswith("@")

    def __str__(self) -> str:
        s = f"_.{self.kind}"
        if self.where is not None:
            s += f"[|{self.param}| {render(self.where)}]"
        return s


class _RouteFactory:
    @staticmethod
    def _make(kind, param, where):
        if isinstance(param, Var):
            param = param.name
        return Route(kind, param, where)

    def out(self, param="v", where=None) -> Route:
        return self._make("out", param, where)

    def in_(self, param="v", where=None) -> Route:
        return self._make("in", param, where)

    def both(self, param="v", where=None) -> Route:
        return self._make("both", param, where)

    def outE(self, param="e", where=None) -> Route:
        return self._make("outE", param, where)

    def inE(self, param="e", where=None) -> Route:
        return self._make("inE", param, where)

    def bothE(self, param="e", where=None) -> Route:
        return self._make("bothE", param, where)

    def prop(self, key: str, param="v", where=None) -> Route:
        if not key.startswith("@"):
            raise EngineError("property routes use runtime properties")
        return self._make(key, param, where)


route = _RouteFactory()


@dataclass(frozen=True, eq=False)
class Filter:
    pred: Expr

    def __post_init__(self):
        object.__setattr__(self, "pred", lift(self.pred))


@dataclass(frozen=True, eq=False)
class Local:
    writes: tuple


@dataclass(frozen=True, eq=False)
class Push:
    route: Route
    writes: tuple = ()


@dataclass(frozen=True, eq=False)
class Pull:
    route: Route
    writes: tuple = ()


@dataclass(frozen=True, eq=False)
class Group:
    keys: tuple
    writes: tuple = ()
    param: str = "v"


@dataclass(frozen=True, eq=False)
class Order:
    keys: tuple  # of (key, descending)
    limit: Optional[int] = None


@dataclass(frozen=True, eq=False)
class Output:
    keys: tuple  # property names, or ("*",)
    sink: Optional[IO[str]] = field(default=None, compare=False)


Operator = Union[Filter, Local, Push, Pull, Group, Order, Output]


def describe(op: Operator) -> str:
    """One-line rendering of an operator, used by traces and machine dumps."""
    name = type(op).__name__
    if isinstance(op, Filter):
        return f"Filter({render(op.pred)})"
    if isinstance(op, Local):
        return f"Local({', '.join(render(w) for w in op.writes)})"
    if isinstance(op, (Push, Pull)):
        body = ", ".join(render(w) for w in op.writes)
        return f"{name}({op.route}" + (f"(|{op.route.param}| {body})" if body else "") + ")"
    if isinstance(op, Group):
        body = ", ".join(render(w) for w in op.writes)
        return f"Group({', '.join(op.keys)}" + (f", |{op.param}| {body}" if body else "") + ")"
    if isinstance(op, Order):
        keys = ", ".join(f"{k}({'DESC' if d else 'ASC'})" for k, d in op.keys)
        return f"Order({keys}" + (f", {op.limit})" if op.limit is not None else ")")
    if isinstance(op, Output):
        return f"Output({', '.join(op.keys)})"
    return name


# -- engine ------------------------------------------------------------------------


@dataclass
class _Batch:
    """Route expansion for a chunk of sources: one row per (source, edge/target)."""

    src: np.ndarray
    other: np.ndarray
    eid: Optional[np.ndarray]


class Engine:
    """Executes operators against one graph.

    ``threads`` sets the worker count for per-vertex evaluation; results do
    not depend on it. ``params`` binds script parameters (e.g. a source id).
    ``sets`` holds named VertexSets readable through ``A.size()`` guards.
    """

    def __init__(
        self,
        graph: RuntimePropertyGraph,
        threads: int = 1,
        params: Optional[dict] = None,
        out: Optional[IO[str]] = None,
        min_chunk: int = 2048,
    ):
        if threads < 1:
            raise ValueError("threads must be >= 1")
        self.g = graph
        self.threads = threads
        self.params = dict(params or {})
        self.out = out
        self.min_chunk = min_chunk
        self.stats: Counter = Counter()
        self.sets: dict[str, VertexSet] = {}
        self._all = VertexSet.range(graph.n)
        self._pool: Optional[ThreadPoolExecutor] = None

    def close(self):
        if self._pool is not None:
            self._pool.shutdown()
            self._pool = None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    # -- helpers ---------------------------------------------------------------

    @property
    def all_vertices(self) -> VertexSet:
        return self._all

    @property
    def V(self) -> "Frontier":
        return Frontier(self, self._all)

    def frontier(self, vs: Union[VertexSet, Iterable[int]]) -> "Frontier":
        return Frontier(self, vs if isinstance(vs, VertexSet) else VertexSet(vs))

    def set_size(self, name: str) -> int:
        if name == "V":
            return self.g.n
        try:
            return len(self.sets[name])
        except KeyError:
            raise EvalError(f"set variable {name!r} used before assignment") from None

    def _env(self, size: int, bindings: dict[str, Binding]) -> Env:
        return Env(self.g, size, bindings, self.set_size, self.params)

    def _chunks(self, count: int) -> list[tuple[int, int]]:
        if self.threads == 1 or count < 2 * self.min_chunk:
            return [(0, count)]
        k = min(self.threads, max(1, count // self.min_chunk))
        bounds = np.linspace(0, count, k + 1).astype(int)
        return [(int(bounds[i]), int(bounds[i + 1])) for i in range(k)]

    def _pmap(self, fn: Callable, count: int) -> list:
        if self.threads == 1:
            return [fn(0, count)]
        chunks = self._chunks(count)
        if len(chunks) == 1:
            return [fn(*chunks[0])]
        if self._pool is None:
            self._pool = ThreadPoolExecutor(max_workers=self.threads)
        return list(self._pool.map(lambda c: fn(*c), chunks))

    def declare(self, name: str, vtype: ValueType, target: str = VERTEX) -> None:
        self.g.declare(name, vtype, target)

    # -- operators ----------------------------------------------------------------

    def apply(self, vs: VertexSet, op: Operator) -> VertexSet:
        self.stats[type(op).__name__] += 1
        if isinstance(op, Filter):
            return self.filter(vs, op.pred)
        if isinstance(op, Local):
            return self.local(vs, op.writes)
        if isinstance(op, Push):
            return self.push(vs, op.route, op.writes)
        if isinstance(op, Pull):
            return self.pull(vs, op.route, op.writes)
        if isinstance(op, Group):
            return self.group(vs, op.keys, op.writes, op.param)
        if isinstance(op, Order):
            return self.order(vs, op.keys, op.limit)
        if isinstance(op, Output):
            return self.output(vs, op.keys, op.sink)
        raise EngineError(f"unknown operator {op!r}")

    def run_chain(self, vs: VertexSet, ops: Sequence[Operator]) -> VertexSet:
        """Composite operator: each stage is finalised before the next starts."""
        for op in ops:
            vs = self.apply(vs, op)
        return vs

    def filter(self, vs: VertexSet, pred: Expr) -> VertexSet:
        ids = vs.ids
        if ids.size == 0:
            return vs

        def run(lo, hi):
            sub = ids[lo:hi]
            mask = evaluate(pred, self._env(sub.size, {"_": Binding(VERTEX, sub)}))
            if mask.dtype.kind != "b":
                raise EvalError(f"filter predicate {render(pred)} is not boolean")
            return sub[mask]

        parts = self._pmap(run, ids.size)
        return VertexSet._trusted(parts[0] if len(parts) == 1 else np.concatenate(parts))

    def local(self, vs: VertexSet, writes: Sequence[Write]) -> VertexSet:
        """Assignments run in order; each one is applied to the whole set before the next."""
        ids = vs.ids
        single = self.threads == 1 or ids.size < 2 * self.min_chunk
        env = self._env(ids.size, {"_": Binding(VERTEX, ids)}) if single else None
        for w in writes:
            if w.agg is not None:
                raise EngineError(f"Local cannot aggregate ({render(w)})")
            if not (isinstance(w.target, Var) and w.target.name == "_"):
                raise EngineError(f"Local may only write the current vertex ({render(w)})")
            self._require_runtime(w.key, VERTEX)
            if single:
                self._write(w.key, VERTEX, ids, evaluate(w.value, env))
                continue

            def run(lo, hi, w=w):
                sub = ids[lo:hi]
                return evaluate(w.value, self._env(sub.size, {"_": Binding(VERTEX, sub)}))

            parts = self._pmap(run, ids.size)
            vals = parts[0] if len(parts) == 1 else np.concatenate(parts)
            self._write(w.key, VERTEX, ids, vals)
        return vs

    def push(self, vs: VertexSet, rt: Route, writes: Sequence[Write] = ()) -> VertexSet:
        targets, contribs = self._route_contributions(vs, rt, writes, self_target=False)
        self._apply_contributions(writes, contribs, rt)
        return VertexSet._trusted(targets if targets.size <= 1 else np.unique(targets))

    def pull(self, vs: VertexSet, rt: Route, writes: Sequence[Write] = ()) -> VertexSet:
        _, contribs = self._route_contributions(vs, rt, writes, self_target=True)
        self._apply_contributions(writes, contribs, rt)
        return vs

    def _route_contributions(self, vs, rt: Route, writes, self_target: bool):
        for w in writes:
            self._require_runtime(w.key, EDGE if self._is_edge_target(w, rt) else VERTEX)
            if self._is_edge_target(w, rt):
                if not rt.explicit:
                    raise EngineError(f"edge side effect on implicit route {rt.kind}")
                if w.agg is not None:
                    raise EngineError("edge writes take no aggregator")
            elif w.agg is None:
                raise EngineError(f"missing aggregator for {render(w)}")
        if rt.is_property:
            schema = self.g.schema_of(rt.kind, VERTEX)
            if schema.vtype not in (ID, LIST_ID):
                raise EngineError(f"route property {rt.kind} has type {schema.vtype}, need ID or list")
        ids = vs.ids

        def run(lo, hi):
            batch = self._expand(rt, ids[lo:hi])
            bindings = self._route_bindings(rt, batch)
            if rt.where is not None:
                mask = evaluate(rt.where, self._env(batch.src.size, bindings))
                if mask.dtype.kind != "b":
                    raise EvalError(f"route filter {render(rt.where)} is not boolean")
                batch = _Batch(batch.src[mask], batch.other[mask], None if batch.eid is None else batch.eid[mask])
                bindings = self._route_bindings(rt, batch)
            env = self._env(batch.src.size, bindings)
            out = []
            for w in writes:
                tgt = entity(w.target, env)
                out.append((tgt.kind, tgt.ids, evaluate(w.value, env)))
            return batch.other, out

        parts = self._pmap(run, ids.size)
        targets = np.concatenate([p[0] for p in parts]) if len(parts) > 1 else parts[0][0]
        contribs = []
        for i in range(len(writes)):
            kind = parts[0][1][i][0]
            if len(parts) == 1:
                contribs.append(parts[0][1][i])
            else:
                tids = np.concatenate([p[1][i][1] for p in parts])
                vals = _concat_values([p[1][i][2] for p in parts])
                contribs.append((kind, tids, vals))
        self.stats["contributions"] += int(targets.size)
        return targets, contribs

    def _is_edge_target(self, w: Write, rt: Route) -> bool:
        if not (isinstance(w.target, Var) and w.target.name == rt.param):
            return False
        # implicit routes bind vertices; an edge-declared key there is flagged by the caller
        return rt.explicit or ((EDGE, w.key) in self.g.runtime and (VERTEX, w.key) not in self.g.runtime)

    def _apply_contributions(self, writes, contribs, rt):
        for w, (kind, tids, vals) in zip(writes, contribs):
            if kind == EDGE:
                self._write(w.key, EDGE, tids, vals)
                continue
            uniq, red = reduce_by_target(w.agg, tids, vals)
            if uniq.size:
                self._write(w.key, VERTEX, uniq, red)

    def _expand(self, rt: Route, src: np.ndarray) -> _Batch:
        g = self.g
        if rt.is_property:
            vals = g.read_column(rt.kind, VERTEX, src)
            if vals.dtype == object:
                s, o = [], []
                for v, lst in zip(src.tolist(), vals.tolist()):
                    for t in lst:
                        s.append(v)
                        o.append(t)
                s_arr, o_arr = np.asarray(s, np.int64), np.asarray(o, np.int64)
            else:
                s_arr, o_arr = src, vals
            keep = o_arr != NULL_VERTEX
            bad = keep & ((o_arr < 0) | (o_arr >= g.n_total))
            if bad.any():
                raise EvalError(f"route {rt.kind} names vertex {int(o_arr[bad][0])}, which does not exist")
            if not keep.all():
                s_arr, o_arr = s_arr[keep], o_arr[keep]
            return _Batch(s_arr, o_arr, None)
        adj = g.adjacency(TOPOLOGY[rt.kind])
        real = src[src < g.n] if src.size and src.max() >= g.n else src
        starts = adj.ptr[real]
        counts = adj.ptr[real + 1] - starts
        total = int(counts.sum())
        rep = np.repeat(np.arange(real.size), counts)
        offs = np.arange(total, dtype=np.int64) - np.repeat(np.cumsum(counts) - counts, counts) + starts[rep]
        eid = adj.eid[offs] if rt.explicit else None
        return _Batch(real[rep], adj.other[offs], eid)

    def _route_bindings(self, rt: Route, batch: _Batch) -> dict[str, Binding]:
        b = {"_": Binding(VERTEX, batch.src)}
        if rt.explicit:
            if self.g.directed:
                b[rt.param] = Binding(EDGE, batch.eid)
            elif rt.kind == "inE":
                b[rt.param] = Binding(EDGE, batch.eid, src=batch.other, dst=batch.src)
            else:
                b[rt.param] = Binding(EDGE, batch.eid, src=batch.src, dst=batch.other)
        else:
            b[rt.param] = Binding(VERTEX, batch.other)
        return b

    def group(self, vs: VertexSet, keys: Sequence[str], writes: Sequence[Write] = (), param: str = "v") -> VertexSet:
        g = self.g
        ids = vs.ids
        for k in keys:
            if not g.has_property(k, VERTEX) and k not in ("id", "label"):
                raise EngineError(f"group key {k!r} is not declared")
        for w in writes:
            if w.agg is None:
                raise EngineError(f"missing aggregator for {render(w)}")
            if not (isinstance(w.target, Var) and w.target.name == param):
                raise EngineError("group side effects must write the grouped vertex")
            self._require_runtime(w.key, VERTEX)
        if ids.size == 0:
            return VertexSet._trusted(ids)
        env0 = self._env(ids.size, {"_": Binding(VERTEX, ids)})
        cols = [evaluate(Var("_")[k], env0) for k in keys]
        inverse, first = _group_codes(cols)
        gids = g.add_grouped(first.size)
        for k, col in zip(keys, cols):
            vals = col[first]
            if (VERTEX, k) in g.runtime:
                g.write_column(k, VERTEX, gids, vals)
            elif (VERTEX, k) in g.static:
                g.set_grouped_static(k, gids, vals)
        member_group = gids[inverse]
        env = self._env(ids.size, {"_": Binding(VERTEX, ids), param: Binding(VERTEX, member_group)})
        for w in writes:
            vals = evaluate(w.value, env)
            uniq, red = reduce_by_target(w.agg, member_group, vals)
            self._write(w.key, VERTEX, uniq, red)
        return VertexSet._trusted(gids)

    def order(self, vs: VertexSet, keys: Sequence, limit: Optional[int] = None) -> VertexSet:
        ids = vs.ids
        keys = [(k, False) if isinstance(k, str) else (k[0], bool(k[1])) for k in keys]
        perm = np.argsort(ids, kind="stable")
        if ids.size:
            env = self._env(ids.size, {"_": Binding(VERTEX, ids)})
            for key, desc in reversed(keys):
                if (VERTEX, key) in self.g.runtime or (VERTEX, key) in self.g.static:
                    if self.g.schema_of(key, VERTEX).vtype == LIST_ID:
                        raise EngineError(f"cannot order by list property {key!r}")
                col = evaluate(Var("_")[key], env)
                vals = col[perm]
                if col.dtype == object:
                    idx = sorted(range(perm.size), key=lambda i: vals[i], reverse=desc)
                    perm = perm[np.asarray(idx, dtype=np.int64)]
                else:
                    if col.dtype.kind == "b":
                        vals = vals.astype(np.int8)
                    # stable descending: sort the reversed array ascending by -rank
                    if desc:
                        ranks = np.argsort(np.argsort(-_rank(vals), kind="stable"), kind="stable")
                        perm = perm[np.argsort(ranks, kind="stable")]
                    else:
                        perm = perm[np.argsort(vals, kind="stable")]
        out = ids[perm]
        if limit is not None:
            out = out[: max(0, int(limit))]
        return VertexSet._trusted(out)

    def output(self, vs: VertexSet, keys: Sequence[str], sink: Optional[IO[str]] = None) -> VertexSet:
        sink = sink or self.out or sys.stdout
        g = self.g
        if list(keys) == ["*"]:
            keys = [name for (t, name) in g.runtime if t == VERTEX]
        for k in keys:
            if not g.has_property(k, VERTEX) and k not in ("id", "label"):
                raise EngineError(f"output key {k!r} is not declared")
        if len(vs) == 0:
            return vs
        env = self._env(len(vs), {"_": Binding(VERTEX, vs.ids)})
        cols = [evaluate(Var("_")[k], env).tolist() for k in keys]
        lines = []
        for i, v in enumerate(vs.ids.tolist()):
            lines.append("\t".join([str(v)] + [format_value(c[i]) for c in cols]) + "\n")
        sink.write("".join(lines))
        return vs

    # -- writes ----------------------------------------------------------------------

    def _require_runtime(self, key: str, target: str):
        if (target, key) in self.g.runtime:
            return
        if (target, key) in self.g.static:
            raise PropertyError(f"static property {key!r} is read-only")
        raise PropertyError(f"write to undeclared runtime property {key!r}")

    def _write(self, key, target, ids, vals):
        self.g.write_column(key, target, ids, vals)


def _rank(vals: np.ndarray) -> np.ndarray:
    """Dense ranks of a numeric array (so descending order works for unsigned/bool/float alike)."""
    uniq, inv = np.unique(vals, return_inverse=True)
    return inv.astype(np.int64)


def _concat_values(parts: list[np.ndarray]) -> np.ndarray:
    if any(p.dtype == object for p in parts):
        out = np.empty(sum(p.size for p in parts), dtype=object)
        pos = 0
        for p in parts:
            out[pos:pos + p.size] = p
            pos += p.size
        return out
    return np.concatenate(parts)


def _group_codes(cols: list[np.ndarray]) -> tuple[np.ndarray, np.ndarray]:
    """Group codes in order of first appearance; returns (code per row, first row per code)."""
    size = cols[0].size
    if len(cols) == 1 and cols[0].dtype != object:
        uniq, first, inv = np.unique(cols[0], return_index=True, return_inverse=True)
        rank = np.argsort(np.argsort(first, kind="stable"), kind="stable")
        return rank[inv], np.sort(first)
    seen: dict = {}
    codes = np.empty(size, dtype=np.int64)
    firsts = []
    rows = zip(*[c.tolist() for c in cols])
    for i, key in enumerate(rows):
        code = seen.get(key)
        if code is None:
            code = seen[key] = len(firsts)
            firsts.append(i)
        codes[i] = code
    return codes, np.asarray(firsts, dtype=np.int64)


class Frontier:
    """Fluent handle over a VertexSet: ``eng.V.local(...).push(...).filter(...)``."""

    __slots__ = ("engine", "vset")

    def __init__(self, engine: Engine, vset: VertexSet):
        self.engine = engine
        self.vset = vset

    def _next(self, op: Operator) -> "Frontier":
        return Frontier(self.engine, self.engine.apply(self.vset, op))

    def filter(self, pred) -> "Frontier":
        return self._next(Filter(lift(pred)))

    def local(self, *writes: Write) -> "Frontier":
        return self._next(Local(tuple(writes)))

    def push(self, rt: Route, *writes: Write) -> "Frontier":
        return self._next(Push(rt, tuple(writes)))

    def pull(self, rt: Route, *writes: Write) -> "Frontier":
        return self._next(Pull(rt, tuple(writes)))

    def group(self, keys, *writes: Write, param: str = "v") -> "Frontier":
        keys = (keys,) if isinstance(keys, str) else tuple(keys)
        return self._next(Group(keys, tuple(writes), param))

    def order(self, *keys, limit: Optional[int] = None) -> "Frontier":
        norm = tuple((k, False) if isinstance(k, str) else (k[0], _is_desc(k[1])) for k in keys)
        return self._next(Order(norm, limit))

    def output(self, *keys: str, sink: Optional[IO[str]] = None) -> "Frontier":
        return self._next(Output(tuple(keys) or ("*",), sink))

    def chain(self, ops: Sequence[Operator]) -> "Frontier":
        return Frontier(self.engine, self.engine.run_chain(self.vset, ops))

    def size(self) -> int:
        return len(self.vset)

    def __len__(self) -> int:
        return len(self.vset)

    def __iter__(self):
        return iter(self.vset)

    @property
    def ids(self) -> np.ndarray:
        return self.vset.ids

    def __repr__(self) -> str:
        return f"Frontier({self.vset!r})"


def _is_desc(flag) -> bool:
    if isinstance(flag, str):
        return flag.upper() == "DESC"
    return bool(flag)
