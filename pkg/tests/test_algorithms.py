import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from flashgraph import INT_MAX, Engine, from_edges
from flashgraph.algorithms import (
    GasSpec,
    TuringSpec,
    cc_opt,
    cc_pull,
    forest_init,
    gas_run,
    pagerank,
    pagerank_spec,
    pointer_jumping,
    sssp,
    sssp_spec,
    star_detection,
    star_hooking,
    turing_simulate,
    unary_increment,
    wcc,
)
from flashgraph.algorithms.cc import declare_cc_opt
from flashgraph.engine import EngineError
from flashgraph.expr import _
from flashgraph.graph import VERTEX

from helpers import all_forests, random_forest, random_graph
from oracles import (
    canonical_partition,
    oracle_cc,
    oracle_dijkstra,
    oracle_forest_init,
    oracle_pointer_jump,
    oracle_pr,
    oracle_star_conditions,
    oracle_tm,
    pr_update,
)


def path(n, directed=False, weighted=False):
    edges = [(i, i + 1, 1) if weighted else (i, i + 1) for i in range(n - 1)]
    return from_edges(n, edges, directed=directed, weight="weight" if weighted else None)


def cc_engine(g):
    g = g.fresh()
    declare_cc_opt(g)
    return Engine(g)


def set_parents(eng, parent):
    eng.g.write_column("@p", VERTEX, np.arange(len(parent)), np.array(parent, dtype=np.int64))


def parents(eng):
    return eng.g.runtime_column("@p")[: eng.g.n].tolist()


def stars_violating(parent, edges):
    """Edges whose endpoints sit in two different stars."""
    star = oracle_star_conditions(parent)
    return [(u, w) for u, w, *_r in edges if star[u] and star[w] and parent[u] != parent[w]]


class TestWcc:
    def test_two_triangles(self, two_triangles):
        r = wcc(two_triangles)
        assert r.labels.tolist() == [0, 0, 0, 3, 3, 3]
        assert r.census == {0: 3, 3: 3}

    def test_path_rounds(self):
        assert wcc(path(1024)).rounds == 1023

    def test_directed_is_weak(self):
        r = wcc(from_edges(4, [(1, 0), (2, 3)], directed=True))
        assert r.labels.tolist() == [0, 0, 2, 2]

    def test_empty_graph(self):
        r = wcc(from_edges(0, []))
        assert r.labels.tolist() == [] and r.rounds == 0 and r.census == {}


class TestCcPull:
    def test_k4(self):
        k4 = from_edges(4, [(a, b) for a in range(4) for b in range(a + 1, 4)], directed=False)
        r = cc_pull(k4)
        assert r.labels.tolist() == [0] * 4 and r.rounds <= 2

    def test_edgeless_has_no_feedback(self):
        r = cc_pull(from_edges(5, [], directed=False))
        assert r.labels.tolist() == list(range(5)) and r.rounds == 0

    def test_uses_both_strategies_on_path(self):
        r = cc_pull(path(64))
        assert r.labels.tolist() == [0] * 64
        assert set(r.strategy) == {"push", "pull"}


class TestCcOpt:
    def test_two_triangles(self, two_triangles):
        assert cc_opt(two_triangles).labels.tolist() == [0, 0, 0, 3, 3, 3]

    def test_star_single_iteration(self):
        star = from_edges(10, [(0, i) for i in range(1, 10)], directed=False)
        r = cc_opt(star)
        assert r.labels.tolist() == [0] * 10 and r.rounds == 1

    @pytest.mark.parametrize("n,bound", [(1024, 30), (4096, 36)])
    def test_path_round_bound(self, n, bound):
        r = cc_opt(path(n))
        assert r.labels.tolist() == [0] * n and r.rounds <= bound

    @given(st.integers(0, 48), st.floats(0, 5), st.randoms())
    @settings(max_examples=40, deadline=None)
    def test_partition_agreement(self, n, deg, rnd):
        g, edges = random_graph(random.Random(rnd.random()), n, deg)
        expect = oracle_cc(n, edges)
        for algo in (wcc, cc_pull, cc_opt):
            assert canonical_partition(algo(g).labels.tolist()) == expect, algo.__name__

    @pytest.mark.parametrize("seed", range(25))
    def test_forest_safety_and_monotone_parents(self, seed):
        rng = random.Random(seed)
        n = rng.randint(2, 64)
        g, edges = random_graph(rng, n, rng.uniform(0.5, 4))
        snaps = []
        cc_opt(g, observer=lambda phase, gr: snaps.append((phase, gr.runtime_column("@p")[:n].tolist())))
        prev = None
        for phase, p in snaps:
            for x in range(n):
                y = x
                for _i in range(n):
                    if p[y] == y:
                        break
                    y = p[y]
                assert p[y] == y, (phase, x)
            if prev is not None:
                assert all(a <= b for a, b in zip(p, prev)), phase
            prev = p
            if phase.endswith("hooking"):
                assert stars_violating(p, edges) == [], phase


class TestPropositions:
    def test_forest_init_cases(self):
        eng = cc_engine(from_edges(3, [(0, 1)], directed=False))
        forest_init(eng)
        assert parents(eng) == [0, 0, 2]

    def test_forest_init_non_isolated_singleton(self):
        # 0-2, 1-2: 2 picks 0, vertex 1 chooses 1 but nobody chose it, so it hooks to 2
        eng = cc_engine(from_edges(3, [(0, 2), (1, 2)], directed=False))
        forest_init(eng)
        assert parents(eng) == [0, 2, 0] == oracle_forest_init(3, [(0, 2), (1, 2)])

    @given(st.integers(1, 64), st.floats(0, 6), st.randoms())
    @settings(max_examples=60, deadline=None)
    def test_forest_init_matches_case_split(self, n, deg, rnd):
        g, edges = random_graph(random.Random(rnd.random()), n, deg)
        eng = cc_engine(g)
        forest_init(eng)
        assert parents(eng) == oracle_forest_init(n, edges)

    @pytest.mark.parametrize("parent,expect", [
        ([0, 0], [True, True]),
        ([0, 0, 1], [False, False, False]),
        ([0, 0, 2, 2, 2], [True, True, True, True, True]),
    ])
    def test_star_detection_examples(self, parent, expect):
        eng = cc_engine(from_edges(len(parent), []))
        set_parents(eng, parent)
        star_detection(eng)
        assert eng.g.runtime_column("@is_star")[: len(parent)].tolist() == expect

    @pytest.mark.parametrize("n", range(1, 6))
    def test_star_detection_exhaustive(self, n):
        for parent in all_forests(n):
            eng = cc_engine(from_edges(n, []))
            set_parents(eng, parent)
            star_detection(eng)
            assert eng.g.runtime_column("@is_star")[:n].tolist() == oracle_star_conditions(parent), parent

    @given(st.integers(1, 64), st.randoms())
    @settings(max_examples=60, deadline=None)
    def test_star_detection_random_forests(self, n, rnd):
        parent = random_forest(random.Random(rnd.random()), n)
        eng = cc_engine(from_edges(n, []))
        set_parents(eng, parent)
        star_detection(eng)
        assert eng.g.runtime_column("@is_star")[:n].tolist() == oracle_star_conditions(parent)

    def test_conditional_hooking_cross_edge(self):
        # stars {0,1} and {2,3} joined by 1-3
        g = from_edges(4, [(0, 1), (2, 3), (1, 3)], directed=False)
        eng = cc_engine(g)
        set_parents(eng, [0, 0, 2, 2])
        eng.V.local(_.set("@new_p", _["@p"]))
        star_detection(eng)
        star_hooking(eng, True)
        assert parents(eng) == [0, 0, 0, 2]

    def test_single_star_is_fixpoint(self):
        g = from_edges(4, [(0, 1), (0, 2), (0, 3)], directed=False)
        for cond in (True, False):
            eng = cc_engine(g)
            set_parents(eng, [0, 0, 0, 0])
            eng.V.local(_.set("@new_p", _["@p"]))
            star_detection(eng)
            star_hooking(eng, cond)
            assert parents(eng) == [0, 0, 0, 0]

    @pytest.mark.parametrize("cond", [True, False])
    @given(st.integers(2, 64), st.floats(0.5, 5), st.randoms())
    @settings(max_examples=30, deadline=None)
    def test_hooking_leaves_no_adjacent_stars(self, cond, n, deg, rnd):
        g, edges = random_graph(random.Random(rnd.random()), n, deg)
        eng = cc_engine(g)
        forest_init(eng)
        star_detection(eng)
        before = parents(eng)
        star_hooking(eng, cond)
        after = parents(eng)
        assert stars_violating(after, edges) == []
        if cond:
            assert all(a <= b for a, b in zip(after, before))

    def test_pointer_jump_chain(self):
        eng = cc_engine(from_edges(4, []))
        set_parents(eng, [0, 0, 1, 2])
        active = pointer_jumping(eng)
        assert parents(eng) == [0, 0, 0, 1] == oracle_pointer_jump([0, 0, 1, 2])
        assert active.ids.tolist() == [2, 3]

    def test_pointer_jump_star_is_inactive(self):
        eng = cc_engine(from_edges(4, []))
        set_parents(eng, [0, 0, 0, 0])
        assert pointer_jumping(eng).size() == 0

    @pytest.mark.parametrize("k", range(0, 7))
    def test_chain_needs_k_jumps(self, k):
        n = 2 ** k + 1
        parent = [max(0, x - 1) for x in range(n)]
        eng = cc_engine(from_edges(n, []))
        set_parents(eng, parent)
        jumps = 0
        while pointer_jumping(eng).size():
            jumps += 1
        assert jumps == k and parents(eng) == [0] * n

    @given(st.integers(1, 40), st.randoms())
    @settings(max_examples=50, deadline=None)
    def test_pointer_jump_random(self, n, rnd):
        parent = random_forest(random.Random(rnd.random()), n)
        eng = cc_engine(from_edges(n, []))
        set_parents(eng, parent)
        active = pointer_jumping(eng)
        jumped = oracle_pointer_jump(parent)
        assert parents(eng) == jumped
        assert active.ids.tolist() == [x for x in range(n) if jumped[x] != parent[x]]


class TestSssp:
    def test_single_edge(self):
        r = sssp(from_edges(2, [(0, 1, 5)], weight="weight"), 0)
        assert r.dist.tolist() == [0, 5]

    def test_unreachable_and_zero_weights(self):
        g = from_edges(4, [(0, 1, 0), (1, 2, 0), (3, 0, 1)], weight="weight")
        assert sssp(g, 0).dist.tolist() == [0, 0, 0, INT_MAX]

    def test_needs_weights(self):
        with pytest.raises(EngineError):
            sssp(from_edges(2, [(0, 1)]), 0)
        with pytest.raises(EngineError):
            sssp(from_edges(2, [(0, 1, 1)], weight="weight"), 5)

    @given(st.integers(1, 80), st.floats(0.5, 6), st.booleans(), st.randoms())
    @settings(max_examples=40, deadline=None)
    def test_matches_dijkstra(self, n, deg, directed, rnd):
        r = random.Random(rnd.random())
        g, edges = random_graph(r, n, deg, directed=directed, weights=(0, 100))
        src = r.randrange(n)
        expect = oracle_dijkstra(n, edges, src, directed=directed)
        assert sssp(g, src).dist.tolist() == expect


class TestPagerank:
    def test_two_cycle(self):
        assert pagerank(from_edges(2, [(0, 1), (1, 0)])).pr.tolist() == pytest.approx([0.5, 0.5], abs=1e-12)

    def test_toy_against_power_iteration(self):
        edges = [(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 0), (1, 3)]
        got = pagerank(from_edges(5, edges)).pr
        assert np.max(np.abs(got - oracle_pr(5, edges))) <= 1e-8

    @given(st.integers(1, 40), st.floats(0.5, 5), st.randoms())
    @settings(max_examples=25, deadline=None)
    def test_residual_bound(self, n, deg, rnd):
        g, edges = random_graph(random.Random(rnd.random()), n, deg, directed=True)
        d, tol = 0.85, 1e-10
        r = pagerank(g, d, tol)
        assert r.converged
        indeg = max([sum(1 for _u, w in edges if w == x) for x in range(n)] or [0])
        again = pr_update(n, edges, r.pr.tolist(), d)
        assert max(abs(a - b) for a, b in zip(again, r.pr)) <= tol * (1 + d * indeg)

    def test_conservation_without_dangling(self):
        edges = [(i, (i + 1) % 7) for i in range(7)] + [(0, 3), (5, 1)]
        assert abs(pagerank(from_edges(7, edges)).pr.sum() - 1) <= 1e-6

    def test_dangling_mass_is_lost(self):
        assert pagerank(from_edges(2, [(0, 1)])).pr.sum() < 1

    def test_max_iters(self):
        r = pagerank(from_edges(3, [(0, 1), (1, 2), (2, 0), (0, 2)]), max_iters=2)
        assert r.rounds == 2 and not r.converged


class TestGas:
    def test_pagerank_equivalence(self):
        g, _e = random_graph(random.Random(3), 40, 3.0, directed=True)
        gas = gas_run(g, pagerank_spec())
        assert np.max(np.abs(gas.data - pagerank(g).pr)) <= 1e-12

    def test_sssp_equivalence_on_chain(self):
        g = path(12, directed=True, weighted=True)
        assert gas_run(g, sssp_spec(0)).data.tolist() == sssp(g, 0).dist.tolist() == list(range(12))

    def test_converge_false_single_round(self):
        spec = pagerank_spec()
        spec = GasSpec(spec.init, spec.gather, spec.gather_agg, spec.apply, False, spec.max_iters)
        r = gas_run(from_edges(3, [(0, 1), (1, 2)]), spec)
        assert r.rounds == 0 and r.run.visits["LoopS"] == 1
        assert r.data.tolist() == pytest.approx([1 / 3] * 3)
        assert [rec["node"] for rec in r.run.trace] == ["Input", "O1", "LoopS", "O", "Fin"]

    def test_scatter_writes_edges(self):
        spec = pagerank_spec(max_iters=1)
        spec.scatter = _["@D_v"] * 2
        edges = [(0, 1), (1, 2), (2, 0), (0, 2)]
        r = gas_run(from_edges(3, edges), spec)
        # one commit + scatter, then the counter guard stops before the second commit
        assert [rec["node"] for rec in r.run.trace].count("O'") == 1
        # only vertices that stayed active after the convergence filter scatter
        active = [abs(x - 1 / 3) > 1e-10 for x in r.data]
        assert active == [False, True, True]
        assert r.edge_data.tolist() == [2 * r.data[u] if active[u] else 0.0 for u, _w in edges]


def random_tm(rng, tape_len=6):
    delta = {(q, a): (rng.randrange(4), rng.randrange(2), rng.choice("LR")) for q in range(3) for a in range(2)}
    tape = tuple(rng.randrange(2) for _i in range(rng.randint(0, tape_len)))
    return TuringSpec(4, 2, 0, frozenset({3}), delta, tape=tape)


class TestTuring:
    def test_unary_increment(self):
        r = turing_simulate(unary_increment(3))
        assert (r.halted, r.steps, r.tape, r.state) == (True, 4, {0: 1, 1: 1, 2: 1, 3: 1}, 1)

    def test_start_in_final(self):
        spec = TuringSpec(2, 2, 1, {1}, {(0, 0): (1, 0, "R"), (0, 1): (1, 1, "R")}, tape=(1, 0, 1))
        r = turing_simulate(spec)
        assert (r.halted, r.steps, r.tape) == (True, 0, {0: 1, 2: 1})

    def test_step_cap(self):
        spin = TuringSpec(2, 2, 0, {1}, {(0, 0): (0, 0, "R"), (0, 1): (0, 1, "R")})
        r = turing_simulate(spin, step_cap=50)
        assert not r.halted and r.steps == 50 and r.head == 50

    def test_tape_grows_left(self):
        left = TuringSpec(2, 2, 0, {1}, {(0, 0): (0, 1, "L"), (0, 1): (1, 1, "L")}, tape=(0,) * 0)
        r = turing_simulate(left, step_cap=100, pad=2)
        assert r.halted is False and r.segments > 1
        assert r.tape == {-i: 1 for i in range(100)}

    def test_missing_transition(self):
        with pytest.raises(ValueError):
            TuringSpec(2, 2, 0, {1}, {(0, 0): (1, 0, "R")})

    @pytest.mark.parametrize("seed", range(12))
    def test_matches_direct_simulator(self, seed):
        spec = random_tm(random.Random(seed))
        r = turing_simulate(spec, step_cap=400, pad=3)
        assert (r.halted, r.steps, r.tape, r.state) == oracle_tm(spec.delta, 0, spec.finals, spec.tape, cap=400)

    def test_trace_loop_count_equals_steps(self):
        r = turing_simulate(unary_increment(5), keep_traces=True, pad=2)
        entries = sum(1 for tr in r.traces for rec in tr if rec["node"] == "LoopS")
        assert r.halted and entries == r.steps == 6
