"""``flashgraph run``: load a graph, run a builtin algorithm or a ``.flash`` script.

Exit codes: 0 ok, 2 configuration or input, 3 script syntax, 4 script typing,
5 runtime failure.
"""

from __future__ import annotations

import argparse
import contextlib
import io
import json
import sys
import time
from dataclasses import dataclass, field
from typing import IO, Optional, Sequence

from .dsl import (
    LexError,
    ParamError,
    ParseError,
    Schema,
    TypecheckError,
    bundled_source,
    compile_source,
    to_json,
)
from .dsl.lower import LowerError
from .engine import EngineError
from .expr import EvalError
from .graph import (
    EDGE,
    INT,
    FLOAT,
    GraphError,
    PropertySchema,
    RuntimePropertyGraph,
    load_edge_list,
    read_schema_file,
)
from .machine import DEFAULT_STEP_LIMIT, MachineError
from .values import format_value

EXIT_OK, EXIT_CONFIG, EXIT_PARSE, EXIT_TYPE, EXIT_RUNTIME = 0, 2, 3, 4, 5

BUILTINS = ("wcc", "sssp", "pagerank", "cc-pull", "cc-opt", "gas-pr", "turing-demo")
# builtins with a bundled script encoding; used when a control-flow trace is requested
_SCRIPT_OF = {"wcc": "wcc", "sssp": "sssp", "pagerank": "pagerank", "cc-pull": "cc_pull", "cc-opt": "cc_opt"}


class ConfigError(Exception):
    pass


@dataclass
class RunStats:
    query: str
    wall: float = 0.0
    rounds: int = 0
    ops: dict = field(default_factory=dict)
    loops: dict = field(default_factory=dict)


def emit_stats(stats: RunStats, sink: IO[str], as_json: bool = False) -> str:
    """Write one summary line (wall time, operator counts, loop rounds) and return it."""
    if as_json:
        line = json.dumps({"query": stats.query, "wall_s": round(stats.wall, 6), "rounds": stats.rounds,
                           "ops": stats.ops, "loops": stats.loops}, sort_keys=True)
    else:
        ops = ",".join(f"{k}:{v}" for k, v in sorted(stats.ops.items()))
        line = f"query={stats.query} wall={stats.wall:.3f}s rounds={stats.rounds} ops={ops or '-'}"
    sink.write(line + "\n")
    return line


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="flashgraph", description="Vertex-centric graph analytics runtime.")
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run a builtin query or a .flash script")
    r.add_argument("--graph", help="edge list file: 'u v [w ...]' per line, '#' comments")
    d = r.add_mutually_exclusive_group()
    d.add_argument("--directed", dest="directed", action="store_true", default=True)
    d.add_argument("--undirected", dest="directed", action="store_false")
    r.add_argument("--weighted", action="store_true", help="read column 2 as the static edge property 'weight'")
    r.add_argument("--float-weights", action="store_true", help="parse weights as floats instead of ints")
    r.add_argument("--schema", help="JSON-lines static property schema {name, target, type, column}")
    r.add_argument("--vertices", help="vertex property file, one 'id col1 col2 ...' line per vertex")
    r.add_argument("--compact", action="store_true", help="renumber vertex ids densely in order of appearance")
    q = r.add_mutually_exclusive_group(required=True)
    q.add_argument("--query", choices=BUILTINS)
    q.add_argument("--script", help="path of a .flash script")
    r.add_argument("--threads", type=int, default=1)
    r.add_argument("--source", type=int, default=None, help="sssp source vertex (also binds script param src_id)")
    r.add_argument("--damping", type=float, default=None)
    r.add_argument("--tol", type=float, default=None)
    r.add_argument("--max-iters", type=int, default=10_000)
    r.add_argument("--param", action="append", default=[], metavar="NAME=VALUE", help="script parameter")
    r.add_argument("--output", help="result file (default stdout)")
    r.add_argument("--trace", nargs="?", const="-", default=None, metavar="PATH",
                   help="control-flow trace as JSON-lines to PATH (default stderr)")
    r.add_argument("--step-limit", type=int, default=DEFAULT_STEP_LIMIT)
    r.add_argument("--json", action="store_true", help="machine-readable stats line")
    r.add_argument("--quiet", action="store_true", help="no stats line")
    r.add_argument("--dump-ast", action="store_true", help="print the script AST as JSON and exit")
    r.add_argument("--dump-machine", action="store_true", help="print the lowered machine as JSON and exit")
    return p


def _load_graph(args, err: IO[str]) -> RuntimePropertyGraph:
    if not args.graph:
        raise ConfigError("--graph is required")
    columns = read_schema_file(args.schema) if args.schema else []
    weight = None
    if args.weighted:
        weight = PropertySchema.static("weight", FLOAT if args.float_weights else INT, EDGE)
    return load_edge_list(args.graph, args.directed, weight, compact=args.compact,
                          columns=columns, vertex_source=args.vertices)


def _params(args, declared: dict) -> dict:
    given = {}
    for item in args.param:
        name, sep, value = item.partition("=")
        if not sep or not name:
            raise ConfigError(f"--param expects NAME=VALUE, got {item!r}")
        given[name.strip()] = value
    implied = {"src_id": args.source, "d": args.damping, "tol": args.tol}
    for name, value in implied.items():
        if value is not None and name in declared and name not in given:
            given[name] = value
    return given


def _rows(ids, values) -> str:
    return "".join(f"{i}\t{format_value(x)}\n" for i, x in zip(ids, values))


def _run_script_text(text: str, graph, args, out, trace, stats: RunStats, params=None):
    prog = compile_source(text, Schema.from_graph(graph))
    bound = params if params is not None else _params(args, prog.params)
    t0 = time.perf_counter()
    res = prog.run(graph, threads=args.threads, params=bound, out=out, trace_sink=trace,
                   step_limit=args.step_limit, record=False)
    stats.wall = time.perf_counter() - t0
    stats.ops = dict(res.stats)
    stats.loops = {k: {"feedbacks": res.run.feedbacks.get(k, 0), "visits": res.run.visits.get(k, 0)}
                   for k in res.run.feedbacks}
    stats.rounds = sum(res.run.feedbacks.values())
    return res


def _symmetrize(g: RuntimePropertyGraph, name: str, err: IO[str]) -> RuntimePropertyGraph:
    if g.directed:
        err.write(f"warning: {name} expects an undirected graph; symmetrizing the directed input\n")
        return g.symmetrized()
    return g


def _run_builtin(args, out: IO[str], err: IO[str], trace, stats: RunStats) -> None:
    from . import algorithms as alg

    name = args.query
    if name == "turing-demo":
        t0 = time.perf_counter()
        ones = 3
        for item in args.param:
            key, _, value = item.partition("=")
            if key.strip() == "ones":
                try:
                    ones = int(value)
                except ValueError:
                    raise ConfigError(f"--param ones expects an integer, got {value!r}") from None
        spec = alg.unary_increment(ones)
        res = alg.turing_simulate(spec, step_cap=args.step_limit, keep_traces=trace is not None)
        if trace is not None:
            for seg in res.traces:
                for rec in seg:
                    trace.write(json.dumps(rec) + "\n")
        stats.wall = time.perf_counter() - t0
        stats.rounds = res.steps
        lo, hi = (min(res.tape), max(res.tape)) if res.tape else (0, -1)
        tape = "".join(str(res.tape.get(i, spec.blank)) for i in range(lo, hi + 1))
        out.write(f"halted\t{format_value(res.halted)}\nsteps\t{res.steps}\nstate\t{res.state}\n"
                  f"head\t{res.head}\ntape\t{tape}\n")
        return

    g = _load_graph(args, err)
    if name in ("cc-pull", "cc-opt"):
        g = _symmetrize(g, name, err)
    if name in ("sssp",) and (EDGE, "weight") not in g.static:
        raise ConfigError("sssp needs --weighted (or a schema column named 'weight')")
    source = 0 if args.source is None else args.source
    damping = 0.85 if args.damping is None else args.damping
    tol = 1e-10 if args.tol is None else args.tol
    if name == "sssp" and not 0 <= source < g.n:
        raise ConfigError(f"--source {source} out of range for {g.n} vertices")

    if trace is not None and name in _SCRIPT_OF:
        params = {"sssp": {"src_id": source}, "pagerank": {"d": damping, "tol": tol}}.get(name, {})
        res = _run_script_text(bundled_source(_SCRIPT_OF[name]), g, args, io.StringIO(), trace, stats, params)
        col = {"wcc": "@cc", "sssp": "@dist", "pagerank": "@pr", "cc-pull": "@cc", "cc-opt": "@p"}[name]
        labels = res.graph.runtime_column(col)[: g.n]
        if name == "wcc":
            uniq, counts = _census(labels)
            out.write(_rows(uniq, counts))
        else:
            out.write(_rows(range(g.n), labels.tolist()))
        return

    t0 = time.perf_counter()
    if name == "wcc":
        r = alg.wcc(g, args.threads)
        uniq, counts = _census(r.labels)
        text = _rows(uniq, counts)
    elif name in ("cc-pull", "cc-opt"):
        r = (alg.cc_pull if name == "cc-pull" else alg.cc_opt)(g, args.threads)
        text = _rows(range(g.n), r.labels.tolist())
    elif name == "sssp":
        r = alg.sssp(g, source, threads=args.threads)
        text = _rows(range(g.n), r.dist.tolist())
    elif name == "pagerank":
        r = alg.pagerank(g, damping, tol, args.max_iters, args.threads)
        text = _rows(range(g.n), r.pr.tolist())
    else:  # gas-pr
        r = alg.gas_run(g, alg.pagerank_spec(damping, tol, args.max_iters), args.threads, args.step_limit)
        if trace is not None:
            for rec in r.run.trace:
                trace.write(json.dumps(rec) + "\n")
        text = _rows(range(g.n), r.data[: g.n].tolist())
    stats.wall = time.perf_counter() - t0
    stats.rounds = r.rounds
    stats.ops = dict(r.stats)
    out.write(text)


def _census(labels):
    import numpy as np

    uniq, counts = np.unique(np.asarray(labels), return_counts=True)
    return uniq.tolist(), counts.tolist()


def _run(args, out: IO[str], err: IO[str]) -> int:
    if args.threads < 1:
        raise ConfigError("--threads must be at least 1")
    if args.step_limit < 1:
        raise ConfigError("--step-limit must be positive")
    with contextlib.ExitStack() as stack:
        trace = None
        if args.trace == "-":
            trace = err
        elif args.trace is not None:
            trace = stack.enter_context(open(args.trace, "w", encoding="utf-8"))
        if args.script:
            try:
                with open(args.script, encoding="utf-8") as fh:
                    text = fh.read()
            except OSError as exc:
                raise ConfigError(f"cannot read script: {exc}") from None
            stats = RunStats(args.script)
            if args.dump_ast or args.dump_machine:
                from .dsl import parse

                if args.dump_ast:
                    out.write(json.dumps(to_json(parse(text)), indent=1) + "\n")
                if args.dump_machine:
                    out.write(json.dumps(compile_source(text).machine.to_dict(), indent=1) + "\n")
                return EXIT_OK
            graph = _load_graph(args, err)
            sink = stack.enter_context(open(args.output, "w", encoding="utf-8")) if args.output else out
            _run_script_text(text, graph, args, sink, trace, stats)
        else:
            if args.dump_ast or args.dump_machine:
                raise ConfigError("--dump-ast/--dump-machine need --script")
            stats = RunStats(args.query)
            buf = io.StringIO()
            _run_builtin(args, buf, err, trace, stats)
            if args.output:
                with open(args.output, "w", encoding="utf-8") as fh:
                    fh.write(buf.getvalue())
            else:
                out.write(buf.getvalue())
    if not args.quiet:
        emit_stats(stats, err, args.json)
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None, out: Optional[IO[str]] = None, err: Optional[IO[str]] = None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        return _run(args, out, err)
    except (ConfigError, ParamError, GraphError, OSError) as exc:
        err.write(f"error: {exc}\n")
        return EXIT_CONFIG
    except (ParseError, LexError) as exc:
        err.write(f"syntax error: {exc}\n")
        return EXIT_PARSE
    except TypecheckError as exc:
        for d in exc.diagnostics:
            err.write(f"type error: {d}\n")
        return EXIT_TYPE
    except LowerError as exc:
        err.write(f"unsupported: {exc}\n")
        return EXIT_TYPE
    except (EngineError, EvalError, MachineError) as exc:
        err.write(f"runtime error: {exc}\n")
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
