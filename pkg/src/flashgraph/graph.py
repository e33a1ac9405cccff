"""Runtime property graph: topology, labels, static properties and the runtime store."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from typing import IO, Callable, Iterable, Optional, Union

import numpy as np

from .values import (
    BOOL,
    FLOAT,
    ID,
    INT,
    LIST_ID,
    NULL_VERTEX,
    STRING,
    ValueType,
    check_scalar,
    default_value,
    format_value,
    new_column,
    parse_type,
)

VERTEX = "vertex"
EDGE = "edge"
STATIC = "static"
RUNTIME = "runtime"

DEFAULT_LABEL = "default"

VERTEX_RESERVED = frozenset({"id", "label", "out", "in", "both", "outE", "inE", "bothE"})
EDGE_RESERVED = frozenset({"id", "label", "src", "dst"})


class GraphError(Exception):
    pass


class GraphParseError(GraphError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class SchemaError(GraphError):
    pass


class PropertyError(GraphError):
    pass


@dataclass(frozen=True)
class PropertySchema:
    name: str
    kind: str  # STATIC | RUNTIME
    target: str  # VERTEX | EDGE
    vtype: ValueType

    def __post_init__(self):
        if self.kind not in (STATIC, RUNTIME):
            raise SchemaError(f"unknown property kind {self.kind!r}")
        if self.target not in (VERTEX, EDGE):
            raise SchemaError(f"unknown property target {self.target!r}")
        if not self.name or self.name == "@":
            raise SchemaError("property name must be non-empty")
        if self.kind == RUNTIME and not self.name.startswith("@"):
            raise SchemaError(f"runtime property {self.name!r} must start with '@'")
        if self.kind == STATIC and self.name.startswith("@"):
            raise SchemaError(f"static property {self.name!r} must not start with '@'")

    @classmethod
    def runtime(cls, name: str, vtype: ValueType, target: str = VERTEX) -> "PropertySchema":
        return cls(name, RUNTIME, target, vtype)

    @classmethod
    def static(cls, name: str, vtype: ValueType, target: str = EDGE) -> "PropertySchema":
        return cls(name, STATIC, target, vtype)


@dataclass(frozen=True)
class Adjacency:
    """CSR view: neighbours of v are ``other[ptr[v]:ptr[v+1]]`` via edges ``eid[...]``."""

    ptr: np.ndarray
    eid: np.ndarray
    other: np.ndarray

    def degree(self) -> np.ndarray:
        return np.diff(self.ptr)


def _csr(n: int, owner: np.ndarray, eid: np.ndarray, other: np.ndarray, rank=None) -> Adjacency:
    keys = (eid, owner) if rank is None else (eid, rank, owner)
    order = np.lexsort(keys)
    ptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(owner, minlength=n), out=ptr[1:])
    return Adjacency(ptr, eid[order].astype(np.int64), other[order].astype(np.int64))


class RuntimePropertyGraph:
    """G = (V, E, phi, zeta, kappa) with dense integer ids.

    Topology and static columns are immutable after construction. Runtime
    columns live in a separate store; :meth:`fresh` returns a sibling graph
    sharing topology but with an empty runtime store.
    """

    def __init__(
        self,
        n: int,
        src,
        dst,
        directed: bool = True,
        *,
        vertex_labels: Optional[Iterable[str]] = None,
        edge_labels: Optional[Iterable[str]] = None,
        static: Optional[dict[PropertySchema, Iterable]] = None,
        strict: bool = False,
    ):
        src = np.asarray(src, dtype=np.int64).reshape(-1)
        dst = np.asarray(dst, dtype=np.int64).reshape(-1)
        if src.shape != dst.shape:
            raise GraphError("src and dst must have equal length")
        if n < 0:
            raise GraphError("vertex count must be non-negative")
        if src.size and (min(src.min(), dst.min()) < 0 or max(src.max(), dst.max()) >= n):
            raise GraphError("edge endpoint out of range")
        self.n = int(n)
        self.m = int(src.size)
        self.directed = bool(directed)
        self.edge_src = src
        self.edge_dst = dst
        self.edge_src.flags.writeable = False
        self.edge_dst.flags.writeable = False
        self.strict = strict

        self.label_names: list[str] = [DEFAULT_LABEL]
        self.vertex_label = self._encode_labels(vertex_labels, self.n)
        self.edge_label = self._encode_labels(edge_labels, self.m)

        self._adj: dict[str, Adjacency] = {}
        self._folds: dict[tuple[str, str], np.ndarray] = {}
        self._build_adjacency()

        self.static: dict[tuple[str, str], tuple[PropertySchema, np.ndarray]] = {}
        for schema, values in (static or {}).items():
            self._add_static(schema, values)

        self._init_runtime()

    # -- construction helpers -------------------------------------------------

    def _encode_labels(self, labels, size: int) -> np.ndarray:
        codes = np.zeros(size, dtype=np.int32)
        if labels is None:
            return codes
        labels = list(labels)
        if len(labels) != size:
            raise GraphError(f"expected {size} labels, got {len(labels)}")
        for i, lab in enumerate(labels):
            lab = str(lab)
            try:
                codes[i] = self.label_names.index(lab)
            except ValueError:
                self.label_names.append(lab)
                codes[i] = len(self.label_names) - 1
        return codes

    def _build_adjacency(self):
        n, src, dst = self.n, self.edge_src, self.edge_dst
        eids = np.arange(self.m, dtype=np.int64)
        if self.directed:
            self._adj["out"] = _csr(n, src, eids, dst)
            self._adj["in"] = _csr(n, dst, eids, src)
            owner = np.concatenate([src, dst])
            rank = np.concatenate([np.zeros(self.m, np.int64), np.ones(self.m, np.int64)])
            self._adj["both"] = _csr(n, owner, np.concatenate([eids, eids]), np.concatenate([dst, src]), rank)
        else:
            both = _csr(n, np.concatenate([src, dst]), np.concatenate([eids, eids]), np.concatenate([dst, src]))
            self._adj["out"] = self._adj["in"] = self._adj["both"] = both

    def _add_static(self, schema: PropertySchema, values):
        if schema.kind != STATIC:
            raise SchemaError(f"{schema.name!r} is not a static property")
        key = (schema.target, schema.name)
        reserved = VERTEX_RESERVED if schema.target == VERTEX else EDGE_RESERVED
        if schema.name in reserved or key in self.static:
            raise SchemaError(f"duplicate or reserved static property {schema.name!r}")
        size = self.n if schema.target == VERTEX else self.m
        col = new_column(schema.vtype, size)
        values = list(values)
        if len(values) != size:
            raise SchemaError(f"static property {schema.name!r} needs {size} values, got {len(values)}")
        for i, x in enumerate(values):
            try:
                col[i] = check_scalar(schema.vtype, x)
            except TypeError as exc:
                raise SchemaError(f"{schema.name!r}[{i}]: {exc}") from None
        col.flags.writeable = False
        self.static[key] = (schema, col)

    def _init_runtime(self):
        self.runtime: dict[tuple[str, str], tuple[PropertySchema, np.ndarray]] = {}
        self._written: dict[tuple[str, str], np.ndarray] = {}
        self.n_grouped = 0
        # static key values carried by grouped vertices, keyed by property name
        self.grouped_static: dict[str, np.ndarray] = {}

    def fresh(self) -> "RuntimePropertyGraph":
        """Sibling graph sharing topology and static data with an empty runtime store."""
        clone = object.__new__(RuntimePropertyGraph)
        clone.__dict__.update(self.__dict__)
        clone._init_runtime()
        return clone

    # -- topology --------------------------------------------------------------

    @property
    def n_total(self) -> int:
        """Real vertices plus grouped runtime vertices."""
        return self.n + self.n_grouped

    def adjacency(self, direction: str) -> Adjacency:
        return self._adj[direction]

    def neighbor_fold(self, direction: str, fold: str) -> np.ndarray:
        """Per-vertex neighbour fold (``size``, ``min``, ``max``) over real vertices."""
        key = (direction, fold)
        if key not in self._folds:
            adj = self._adj[direction]
            deg = adj.degree()
            if fold == "size":
                res = deg.astype(np.int64)
            elif fold in ("min", "max"):
                ufunc = np.minimum if fold == "min" else np.maximum
                ident = NULL_VERTEX if fold == "min" else -1
                res = np.full(self.n, ident, dtype=np.int64)
                nz = deg > 0
                if adj.other.size:
                    red = ufunc.reduceat(adj.other, adj.ptr[:-1][nz])
                    res[nz] = red
            else:
                raise ValueError(f"unknown neighbour fold {fold!r}")
            res.flags.writeable = False
            self._folds[key] = res
        return self._folds[key]

    def neighbor_view(
        self,
        v: int,
        direction: str = "out",
        kind: str = "vertices",
        edge_filter: Optional[Callable[[int], bool]] = None,
    ) -> list[int]:
        """Neighbours (or incident edges) of ``v`` ordered by edge id.

        ``edge_filter`` receives the edge id and keeps the element when true.
        """
        self._check_vertex(v)
        if v >= self.n:
            return []
        adj = self._adj[direction]
        lo, hi = adj.ptr[v], adj.ptr[v + 1]
        eids = adj.eid[lo:hi].tolist()
        items = eids if kind == "edges" else adj.other[lo:hi].tolist()
        if edge_filter is None:
            return items
        return [x for x, e in zip(items, eids) if edge_filter(e)]

    def out(self, v: int) -> list[int]:
        return self.neighbor_view(v, "out")

    def in_(self, v: int) -> list[int]:
        return self.neighbor_view(v, "in")

    def both(self, v: int) -> list[int]:
        return self.neighbor_view(v, "both")

    def out_edges(self, v: int) -> list[int]:
        return self.neighbor_view(v, "out", "edges")

    def in_edges(self, v: int) -> list[int]:
        return self.neighbor_view(v, "in", "edges")

    def both_edges(self, v: int) -> list[int]:
        return self.neighbor_view(v, "both", "edges")

    def label_of(self, code: int) -> str:
        return self.label_names[code]

    # -- properties ------------------------------------------------------------

    def declare_runtime_property(self, schema: PropertySchema) -> None:
        if schema.kind != RUNTIME:
            raise SchemaError(f"{schema.name!r} is not declared as a runtime property")
        key = (schema.target, schema.name)
        if key in self.runtime:
            raise SchemaError(f"runtime property {schema.name!r} already declared")
        size = self.n_total if schema.target == VERTEX else self.m
        self.runtime[key] = (schema, new_column(schema.vtype, size))
        if self.strict:
            self._written[key] = np.zeros(size, dtype=bool)

    def declare(self, name: str, vtype: ValueType, target: str = VERTEX) -> None:
        self.declare_runtime_property(PropertySchema.runtime(name, vtype, target))

    def has_property(self, name: str, target: str = VERTEX) -> bool:
        return (target, name) in self.runtime or (target, name) in self.static

    def schema_of(self, name: str, target: str = VERTEX) -> PropertySchema:
        key = (target, name)
        if key in self.runtime:
            return self.runtime[key][0]
        if key in self.static:
            return self.static[key][0]
        raise PropertyError(f"unknown {target} property {name!r}")

    def runtime_column(self, name: str, target: str = VERTEX) -> np.ndarray:
        try:
            return self.runtime[(target, name)][1]
        except KeyError:
            raise PropertyError(f"undeclared runtime property {name!r}") from None

    def read_column(self, name: str, target: str, ids: np.ndarray) -> np.ndarray:
        """Gather property values for ``ids`` (vertex ids may include grouped vertices)."""
        key = (target, name)
        if key in self.runtime:
            if self.strict:
                w = self._written[key][ids]
                if not w.all():
                    bad = int(ids[~w][0])
                    raise PropertyError(f"read of uninitialised {name!r} on {target} {bad}")
            return self.runtime[key][1][ids]
        if key in self.static:
            col = self.static[key][1]
            if target == VERTEX and ids.size and ids.max() >= self.n:
                return self._read_static_grouped(name, col, ids)
            return col[ids]
        raise PropertyError(f"unknown {target} property {name!r}")

    def _read_static_grouped(self, name, col, ids):
        schema = self.static[(VERTEX, name)][0]
        overlay = self.grouped_static.get(name)
        if overlay is None:
            overlay = new_column(schema.vtype, self.n_grouped)
        full = np.concatenate([col, overlay])
        return full[ids]

    def write_column(self, name: str, target: str, ids: np.ndarray, values) -> None:
        key = (target, name)
        if key not in self.runtime:
            if key in self.static:
                raise PropertyError(f"static property {name!r} is read-only")
            raise PropertyError(f"undeclared runtime property {name!r}")
        schema, col = self.runtime[key]
        col[ids] = coerce_array(schema.vtype, values, len(ids), name)
        if self.strict:
            self._written[key][ids] = True

    def kappa_get(self, target: int, key: str, *, edge: bool = False):
        """Property value of a vertex (default) or an edge (``edge=True``)."""
        if edge:
            self._check_edge(target)
            if key == "id":
                return target
            if key == "label":
                return self.label_names[self.edge_label[target]]
            if key == "src":
                return int(self.edge_src[target])
            if key == "dst":
                return int(self.edge_dst[target])
            return _scalar(self.read_column(key, EDGE, np.array([target]))[0])
        self._check_vertex(target)
        if key == "id":
            return target
        if key == "label":
            return self.label_names[self.vertex_label[target]] if target < self.n else DEFAULT_LABEL
        if key in ("out", "in", "both"):
            return self.neighbor_view(target, key)
        if key in ("outE", "inE", "bothE"):
            return self.neighbor_view(target, key[:-1], "edges")
        return _scalar(self.read_column(key, VERTEX, np.array([target]))[0])

    def kappa_set(self, target: int, key: str, value, *, edge: bool = False) -> None:
        reserved = EDGE_RESERVED if edge else VERTEX_RESERVED
        if key in reserved:
            raise PropertyError(f"reserved property {key!r} is not settable")
        if edge:
            self._check_edge(target)
        else:
            self._check_vertex(target)
        tgt = EDGE if edge else VERTEX
        if (tgt, key) in self.static:
            raise PropertyError(f"static property {key!r} is read-only")
        if (tgt, key) not in self.runtime:
            raise PropertyError(f"undeclared runtime property {key!r}")
        schema, col = self.runtime[(tgt, key)]
        try:
            col[target] = check_scalar(schema.vtype, value)
        except TypeError as exc:
            raise PropertyError(str(exc)) from None
        if self.strict:
            self._written[(tgt, key)][target] = True

    def _check_vertex(self, v):
        if not (0 <= v < self.n_total):
            raise PropertyError(f"vertex {v} out of range")

    def _check_edge(self, e):
        if not (0 <= e < self.m):
            raise PropertyError(f"edge {e} out of range")

    # -- grouped vertices ------------------------------------------------------

    def add_grouped(self, count: int) -> np.ndarray:
        """Allocate ``count`` grouped runtime vertices; returns their ids."""
        start = self.n_total
        self.n_grouped += count
        for key, (schema, col) in list(self.runtime.items()):
            if schema.target == VERTEX:
                self.runtime[key] = (schema, np.concatenate([col, new_column(schema.vtype, count)]))
                if self.strict:
                    self._written[key] = np.concatenate([self._written[key], np.zeros(count, bool)])
        for name, col in list(self.grouped_static.items()):
            schema = self.static[(VERTEX, name)][0]
            self.grouped_static[name] = np.concatenate([col, new_column(schema.vtype, count)])
        return np.arange(start, start + count, dtype=np.int64)

    def set_grouped_static(self, name: str, ids: np.ndarray, values) -> None:
        schema = self.static[(VERTEX, name)][0]
        if name not in self.grouped_static:
            self.grouped_static[name] = new_column(schema.vtype, self.n_grouped)
        self.grouped_static[name][ids - self.n] = coerce_array(schema.vtype, values, len(ids), name)

    # -- misc ------------------------------------------------------------------

    def dump_tsv(self, sink: IO[str]) -> None:
        """Debug dump: one ``V`` row per vertex and one ``E`` row per edge."""
        vprops = [(s, c) for (t, _), (s, c) in list(self.static.items()) + list(self.runtime.items()) if t == VERTEX]
        eprops = [(s, c) for (t, _), (s, c) in list(self.static.items()) + list(self.runtime.items()) if t == EDGE]
        sink.write("\t".join(["V", "id", "label"] + [s.name for s, _ in vprops]) + "\n")
        for v in range(self.n):
            row = ["V", str(v), self.label_names[self.vertex_label[v]]]
            row += [format_value(c[v]) for _, c in vprops]
            sink.write("\t".join(row) + "\n")
        sink.write("\t".join(["E", "id", "src", "dst", "label"] + [s.name for s, _ in eprops]) + "\n")
        for e in range(self.m):
            row = ["E", str(e), str(self.edge_src[e]), str(self.edge_dst[e]), self.label_names[self.edge_label[e]]]
            row += [format_value(c[e]) for _, c in eprops]
            sink.write("\t".join(row) + "\n")

    def symmetrized(self) -> "RuntimePropertyGraph":
        """Undirected view of the same edge list (static columns carried over)."""
        static = {s: c.tolist() for s, c in self.static.values()}
        g = RuntimePropertyGraph(
            self.n,
            self.edge_src,
            self.edge_dst,
            directed=False,
            vertex_labels=[self.label_names[c] for c in self.vertex_label],
            edge_labels=[self.label_names[c] for c in self.edge_label],
            static=static,
        )
        return g

    def __repr__(self) -> str:
        kind = "directed" if self.directed else "undirected"
        return f"RuntimePropertyGraph(n={self.n}, m={self.m}, {kind})"


def _scalar(x):
    if isinstance(x, np.generic):
        return x.item()
    return x


def coerce_array(vt: ValueType, values, size: int, name: str = "?") -> np.ndarray:
    """Convert evaluated values to the column dtype of ``vt`` or raise PropertyError."""
    if type(values) is np.ndarray and values.shape == (size,) and values.dtype == vt.dtype and vt.dtype is not object:
        return values
    if np.isscalar(values) or isinstance(values, tuple) or values is None:
        values = _broadcast(values, size)
    arr = np.asarray(values) if not isinstance(values, np.ndarray) else values
    if arr.shape != (size,):
        arr = _broadcast_obj(arr, size)
    kind = arr.dtype.kind
    if vt.name in ("int", "ID"):
        if kind in "iu":
            return arr.astype(np.int64, copy=False)
    elif vt.name == "float":
        if kind in "iuf":
            return arr.astype(np.float64, copy=False)
    elif vt.name == "bool":
        if kind == "b":
            return arr
    else:
        out = np.empty(size, dtype=object)
        try:
            for i, x in enumerate(arr.tolist()):
                out[i] = check_scalar(vt, _scalar(x))
        except TypeError as exc:
            raise PropertyError(f"type mismatch writing {name!r}: {exc}") from None
        return out
    raise PropertyError(f"type mismatch writing {name!r}: {arr.dtype} values into {vt} column")


def _broadcast(value, size):
    if isinstance(value, tuple):
        out = np.empty(size, dtype=object)
        for i in range(size):
            out[i] = value
        return out
    return np.full(size, value)


def _broadcast_obj(arr, size):
    if arr.ndim == 0:
        return _broadcast(arr.item(), size)
    raise PropertyError(f"expected {size} values, got shape {arr.shape}")


# -- loading ---------------------------------------------------------------------


def _read_lines(source) -> list[str]:
    """Lines from raw bytes, a path, or an open (text or binary) stream."""
    if isinstance(source, (bytes, bytearray)):
        return source.decode("utf-8").splitlines()
    if isinstance(source, (str, os.PathLike)):
        with open(source, encoding="utf-8") as fh:
            return fh.read().splitlines()
    data = source.read()
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    return data.splitlines()


def _parse_typed(vt: ValueType, token: str):
    if vt.name in ("int", "ID"):
        return int(token)
    if vt.name == "float":
        return float(token)
    if vt.name == "bool":
        if token.lower() in ("true", "1"):
            return True
        if token.lower() in ("false", "0"):
            return False
        raise ValueError(token)
    if vt.name == "string":
        return token
    raise ValueError(f"type {vt} cannot be loaded from text")


@dataclass(frozen=True)
class ColumnSpec:
    """One static property read from a whitespace-separated column."""

    schema: PropertySchema
    column: int


def read_schema_file(source) -> list[ColumnSpec]:
    """Parse a JSON-lines schema file of ``{name, target, type, column}`` records."""
    specs = []
    for lineno, line in enumerate(_read_lines(source), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            rec = json.loads(line)
            vt = parse_type(rec["type"])
            name = rec["name"]
            target = rec.get("target", EDGE)
            column = int(rec["column"])
        except (ValueError, KeyError, TypeError) as exc:
            raise SchemaError(f"schema line {lineno}: {exc}") from None
        specs.append(ColumnSpec(PropertySchema(name, STATIC, target, vt), column))
    return specs


def load_edge_list(
    source: Union[bytes, str, os.PathLike, IO],
    directed: bool = True,
    weight_schema: Optional[PropertySchema] = None,
    *,
    compact: bool = False,
    columns: Iterable[ColumnSpec] = (),
    vertex_source=None,
    n: Optional[int] = None,
) -> RuntimePropertyGraph:
    """Load an edge list of ``u v [w ...]`` lines; ``#`` starts a comment line.

    ``weight_schema`` reads column 2 into the given static edge property.
    ``columns`` adds further static properties (edge columns index the edge
    line, vertex columns index ``vertex_source`` lines whose field 0 is the id).
    """
    edge_specs = [c for c in columns if c.schema.target == EDGE]
    vertex_specs = [c for c in columns if c.schema.target == VERTEX]
    if weight_schema is not None:
        if weight_schema.target != EDGE or weight_schema.kind != STATIC:
            raise SchemaError("weight schema must be a static edge property")
        edge_specs.insert(0, ColumnSpec(weight_schema, 2))

    src: list[int] = []
    dst: list[int] = []
    edge_vals: list[list] = [[] for _ in edge_specs]
    for lineno, line in enumerate(_read_lines(source), 1):
        text = line.strip()
        if not text or text.startswith("#"):
            continue
        toks = text.split()
        if len(toks) < 2:
            raise GraphParseError(lineno, f"expected 'u v', got {text!r}")
        try:
            u, v = int(toks[0]), int(toks[1])
        except ValueError:
            raise GraphParseError(lineno, f"non-integer vertex id in {text!r}") from None
        if u < 0 or v < 0:
            raise GraphParseError(lineno, "vertex ids must be non-negative")
        src.append(u)
        dst.append(v)
        for spec, vals in zip(edge_specs, edge_vals):
            if spec.column >= len(toks):
                raise SchemaError(f"line {lineno}: missing column {spec.column} for {spec.schema.name!r}")
            try:
                vals.append(_parse_typed(spec.schema.vtype, toks[spec.column]))
            except ValueError:
                raise GraphParseError(lineno, f"bad {spec.schema.vtype} value {toks[spec.column]!r}") from None

    src_a = np.asarray(src, dtype=np.int64)
    dst_a = np.asarray(dst, dtype=np.int64)
    original_ids = None
    if compact:
        original_ids, inv = np.unique(np.concatenate([src_a, dst_a]), return_inverse=True)
        src_a, dst_a = inv[: len(src)], inv[len(src):]
        count = len(original_ids)
    else:
        count = int(max(src_a.max(initial=-1), dst_a.max(initial=-1)) + 1)
    if n is not None:
        if n < count:
            raise GraphError(f"n={n} smaller than max id + 1 = {count}")
        count = n

    static: dict[PropertySchema, list] = {}
    edge_labels = None
    for spec, vals in zip(edge_specs, edge_vals):
        if spec.schema.name == "label":
            edge_labels = vals
        else:
            static[spec.schema] = vals

    vertex_labels = None
    if vertex_specs:
        if vertex_source is None:
            raise SchemaError("vertex properties declared but no vertex file given")
        vstatic, vertex_labels = _load_vertex_columns(vertex_source, vertex_specs, count, original_ids)
        static.update(vstatic)

    g = RuntimePropertyGraph(
        count, src_a, dst_a, directed, static=static, vertex_labels=vertex_labels, edge_labels=edge_labels
    )
    g.original_ids = original_ids
    return g


def _load_vertex_columns(source, specs, n, original_ids):
    remap = None
    if original_ids is not None:
        remap = {int(x): i for i, x in enumerate(original_ids)}
    values = {spec.schema: [None] * n for spec in specs}
    for lineno, line in enumerate(_read_lines(source), 1):
        text = line.strip()
        if not text or text.startswith("#"):
            continue
        toks = text.split()
        try:
            vid = int(toks[0])
        except ValueError:
            raise GraphParseError(lineno, f"bad vertex id in {text!r}") from None
        if remap is not None:
            vid = remap.get(vid, -1)
        if not (0 <= vid < n):
            raise GraphParseError(lineno, f"vertex {toks[0]} not in graph")
        for spec in specs:
            if spec.column >= len(toks):
                raise SchemaError(f"vertex line {lineno}: missing column {spec.column}")
            try:
                values[spec.schema][vid] = _parse_typed(spec.schema.vtype, toks[spec.column])
            except ValueError:
                raise GraphParseError(lineno, f"bad value {toks[spec.column]!r}") from None
    static = {}
    labels = None
    for schema, vals in values.items():
        vals = [default_value(schema.vtype) if x is None else x for x in vals]
        if schema.name == "label":
            labels = [DEFAULT_LABEL if x == "" else x for x in vals]
        else:
            static[schema] = vals
    return static, labels


def from_edges(n: int, edges: Iterable[tuple], directed: bool = True, weight: Optional[str] = None) -> RuntimePropertyGraph:
    """Convenience constructor from ``(u, v)`` or ``(u, v, w)`` tuples."""
    edges = list(edges)
    src = [e[0] for e in edges]
    dst = [e[1] for e in edges]
    static = {}
    if weight is not None:
        ws = [e[2] for e in edges]
        vt = FLOAT if any(isinstance(w, float) for w in ws) else INT
        static[PropertySchema.static(weight, vt, EDGE)] = ws
    return RuntimePropertyGraph(n, src, dst, directed, static=static)


__all__ = [
    "Adjacency",
    "BOOL",
    "ColumnSpec",
    "EDGE",
    "FLOAT",
    "GraphError",
    "GraphParseError",
    "ID",
    "INT",
    "LIST_ID",
    "PropertyError",
    "PropertySchema",
    "RUNTIME",
    "RuntimePropertyGraph",
    "STATIC",
    "STRING",
    "SchemaError",
    "VERTEX",
    "from_edges",
    "load_edge_list",
    "read_schema_file",
]
