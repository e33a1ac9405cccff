"""End-to-end acceptance checks, each bounded by a wall-clock limit."""

import hashlib
import io
import random
import time
from contextlib import contextmanager

import numpy as np
import pytest

from flashgraph import INT, Engine, Filter, Local, Pull, Push, VertexSet, from_edges, route
from flashgraph.algorithms import (
    cc_opt,
    cc_pull,
    forest_init,
    gas_run,
    pagerank,
    pagerank_spec,
    sssp,
    sssp_spec,
    star_detection,
    star_hooking,
    turing_simulate,
    unary_increment,
    wcc,
)
from flashgraph.algorithms.cc import declare_cc_opt
from flashgraph.cli import main
from flashgraph.dsl import BUNDLED, bundled_source, compile_source, parse, pretty_print
from flashgraph.expr import Max, Min, Sum, _, var
from flashgraph.graph import VERTEX

from helpers import all_simple_graphs, random_forest, random_graph, rmat_edges
from oracles import (
    canonical_partition,
    oracle_cc,
    oracle_dijkstra,
    oracle_forest_init,
    oracle_pr,
    oracle_star_conditions,
    oracle_tm,
)
from test_algorithms import random_tm, stars_violating

pytestmark = pytest.mark.acceptance

v = var("v")


@contextmanager
def timed(criterion, name, limit):
    state = {"ok": False}
    start = time.perf_counter()
    try:
        yield state
    finally:
        elapsed = time.perf_counter() - start
        met = criterion(name, state["ok"], elapsed, limit)
    assert met, f"{name}: {elapsed:.2f}s against a {limit}s limit"


def cc_engine(g):
    g = g.fresh()
    declare_cc_opt(g)
    return Engine(g)


def parents(eng):
    return eng.g.runtime_column("@p")[: eng.g.n].tolist()


def test_partition_equivalence(criterion):
    with timed(criterion, "partition equivalence", 60) as st:
        rng = random.Random(1)
        cases = []
        for _i in range(200):
            n = rng.randint(1, 256)
            cases.append(random_graph(rng, n, rng.uniform(0.5, 8)))
        for n in range(1, 6):
            cases += [(from_edges(n, es, directed=False), es) for es in all_simple_graphs(n)]
        for g, edges in cases:
            expect = oracle_cc(g.n, edges)
            for algo in (wcc, cc_pull, cc_opt):
                assert canonical_partition(algo(g).labels.tolist()) == expect, (algo.__name__, edges)
        st["ok"] = True


def test_propositions(criterion):
    with timed(criterion, "forest_init / star_detection / star_hooking", 30) as st:
        rng = random.Random(2)
        for _i in range(200):
            n = rng.randint(1, 128)
            g, edges = random_graph(rng, n, rng.uniform(0, 6))
            eng = cc_engine(g)
            forest_init(eng)
            assert parents(eng) == oracle_forest_init(n, edges)
        for _i in range(100):
            n = rng.randint(1, 128)
            parent = random_forest(rng, n)
            eng = cc_engine(from_edges(n, []))
            eng.g.write_column("@p", VERTEX, np.arange(n), np.array(parent, dtype=np.int64))
            star_detection(eng)
            assert eng.g.runtime_column("@is_star")[:n].tolist() == oracle_star_conditions(parent)
        for cond in (True, False):
            for _i in range(100):
                n = rng.randint(2, 128)
                g, edges = random_graph(rng, n, rng.uniform(0.5, 6))
                eng = cc_engine(g)
                forest_init(eng)
                star_detection(eng)
                star_hooking(eng, cond)
                assert stars_violating(parents(eng), edges) == []
        st["ok"] = True


def test_round_bound(criterion):
    with timed(criterion, "cc_opt round bound on paths", 10) as st:
        def path(n):
            return from_edges(n, [(i, i + 1) for i in range(n - 1)], directed=False)

        p1024 = path(1024)
        run = compile_source(bundled_source("wcc")).run(p1024)
        kinds = [r["kind"] for r in run.run.trace]
        feedbacks = sum(1 for a, b in zip(kinds, kinds[1:]) if (a, b) == ("LoopE", "LoopS"))
        assert feedbacks == wcc(p1024).rounds == 1023
        assert cc_opt(p1024).rounds <= 30
        assert cc_opt(path(4096)).rounds <= 36
        st["ok"] = True


def test_sssp_matches_dijkstra(criterion):
    with timed(criterion, "sssp against dijkstra", 30) as st:
        rng = random.Random(4)
        for _i in range(100):
            n = rng.randint(1, 500)
            g, edges = random_graph(rng, n, rng.uniform(0.5, 6), directed=True, weights=(0, 100))
            src = rng.randrange(n)
            assert sssp(g, src).dist.tolist() == oracle_dijkstra(n, edges, src)
        st["ok"] = True


def test_pagerank(criterion):
    with timed(criterion, "pagerank against power iteration", 10) as st:
        rng = random.Random(5)
        for _i in range(20):
            n = rng.randint(1, 50)
            g, edges = random_graph(rng, n, rng.uniform(0.5, 5), directed=True)
            got = pagerank(g, 0.85, 1e-10).pr
            assert np.max(np.abs(got - oracle_pr(n, edges))) <= 1e-8
            # add a ring so nobody dangles
            ring = edges + [(i, (i + 1) % n) for i in range(n)]
            assert abs(pagerank(from_edges(n, ring), 0.85, 1e-10).pr.sum() - 1) <= 1e-6
        st["ok"] = True


def test_gas_equivalence(criterion):
    with timed(criterion, "gas equivalence", 10) as st:
        rng = random.Random(6)
        for _i in range(10):
            n = rng.randint(1, 60)
            g, _e = random_graph(rng, n, rng.uniform(0.5, 5), directed=True, weights=(0, 100))
            assert np.max(np.abs(gas_run(g, pagerank_spec()).data - pagerank(g).pr)) <= 1e-12
            src = rng.randrange(n)
            assert gas_run(g, sssp_spec(src)).data.tolist() == sssp(g, src).dist.tolist()
        st["ok"] = True


def test_turing_construction(criterion):
    with timed(criterion, "turing machine construction", 20) as st:
        unary = unary_increment(4)
        r = turing_simulate(unary)
        assert (r.halted, r.steps, r.tape, r.state) == oracle_tm(unary.delta, unary.start, unary.finals, unary.tape)
        rng = random.Random(7)
        for _i in range(50):
            spec = random_tm(rng)
            r = turing_simulate(spec, step_cap=10_000)
            assert (r.halted, r.steps, r.tape, r.state) == oracle_tm(spec.delta, 0, spec.finals, spec.tape)
        st["ok"] = True


BUILTINS = ("wcc", "sssp", "pagerank", "cc-pull", "cc-opt", "gas-pr", "turing-demo")


def test_determinism(criterion, tmp_path):
    with timed(criterion, "thread-count determinism on rmat", 60) as st:
        rng = random.Random(8)
        graph = tmp_path / "rmat.txt"
        graph.write_text("".join(f"{u % 10_000} {w % 10_000} {rng.randint(0, 100)}\n"
                                 for u, w in rmat_edges(14, 40_000, seed=11)))
        for query in BUILTINS:
            digests = set()
            for threads in (1, 2, 4, 8):
                out = io.StringIO()
                code = main(["run", "--graph", str(graph), "--weighted", "--query", query,
                             "--threads", str(threads), "--quiet"], out, io.StringIO())
                assert code == 0 and out.getvalue(), query
                digests.add(hashlib.sha256(out.getvalue().encode()).hexdigest())
            assert len(digests) == 1, query
        st["ok"] = True


def test_frontend(criterion):
    with timed(criterion, "scripts match embedded implementations", 30) as st:
        rng = random.Random(9)
        programs = {name: compile_source(bundled_source(name)) for name in BUNDLED if name != "dblp"}
        for prog in programs.values():
            assert prog.machine.validate() == []
        for _i in range(20):
            n = rng.randint(1, 120)
            g, _e = random_graph(rng, n, rng.uniform(0.5, 5), weights=(0, 50))
            for name, algo, key in (("wcc", wcc, "@cc"), ("cc_pull", cc_pull, "@cc"), ("cc_opt", cc_opt, "@p")):
                got = programs[name].run(g).graph.runtime_column(key)[:n].tolist()
                assert got == algo(g).labels.tolist(), name
            dg, _e = random_graph(rng, n, rng.uniform(0.5, 5), directed=True, weights=(0, 50))
            src = rng.randrange(n)
            got = programs["sssp"].run(dg, params={"src_id": src}).graph.runtime_column("@dist")[:n]
            assert got.tolist() == sssp(dg, src).dist.tolist()
            got = programs["pagerank"].run(dg).graph.runtime_column("@pr")[:n]
            assert got.tolist() == pagerank(dg).pr.tolist()
        for name in BUNDLED:
            tree = parse(bundled_source(name))
            assert parse(pretty_print(tree)) == tree, name
        st["ok"] = True


PROPS = (("@a", INT), ("@b", INT))


def random_op(rng):
    k = rng.randint(1, 5)
    src = rng.choice(["@a", "@b"])
    dst = rng.choice(["@a", "@b"])
    agg = rng.choice([Sum, Min, Max])
    kind = rng.choice(["local", "filter", "push", "pull"])
    if kind == "local":
        return Local((_.set(dst, (_[src] + _.id) % (k + 3)),))
    if kind == "filter":
        return Filter(_[src] % k != 0)
    rt = rng.choice([route.out(), route.in_(), route.both()])
    if kind == "push":
        return Push(rt, (v.set(dst, agg(_[src] + k)),))
    return Pull(rt, (_.set(dst, agg(v[src] * k)),))


def fresh_engine(g):
    g = g.fresh()
    for name, vt in PROPS:
        g.declare(name, vt)
    eng = Engine(g)
    eng.V.local(_.set("@a", _.id), _.set("@b", 0))
    return eng


def test_chaining(criterion):
    with timed(criterion, "fused chains equal stepwise execution", 30) as st:
        rng = random.Random(10)
        for _i in range(50):
            n = rng.randint(1, 64)
            g, _e = random_graph(rng, n, rng.uniform(0.5, 5), directed=rng.random() < 0.5)
            ops = [random_op(rng) for _j in range(rng.randint(1, 8))]
            fused_eng, step_eng = fresh_engine(g), fresh_engine(g)
            fused = fused_eng.V.chain(ops)
            vs = step_eng.all_vertices
            for op in ops:
                vs = VertexSet(step_eng.apply(vs, op).tolist())
            assert fused.ids.tolist() == vs.tolist()
            for name, _vt in PROPS:
                a, b = fused_eng.g.runtime_column(name), step_eng.g.runtime_column(name)
                assert a.tobytes() == b.tobytes(), name
        st["ok"] = True
