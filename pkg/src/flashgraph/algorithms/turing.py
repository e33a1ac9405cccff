"""Turing-machine simulation on a tape graph.

Cells are vertices of a directed path (cell i -> cell i+1). The head cell is
the only one whose ``@state`` is a non-finishing state; every other cell holds
the parked sentinel state ``len(states)``, which counts as finishing.

Operators:

* O1 ``Filter``: keep cells whose state is not finishing (the head, if running).
* O2 ``Local``: look up the transition for (@state, @symbol); store the next
  state in ``@nstate`` and the neighbour to move to in ``@to``, write the new
  symbol, then park the cell.
* O3 ``Push`` along the implicit edge ``@to``: ``v.@state = min(_.@nstate)``.

Control: Input(V) -> O1 -> [beta] LoopS -> O2.O3.O1 -> LoopE -> [beta]
LoopS | Fin, so the loop body runs exactly once per TM step. The tape grows
lazily: beta also fails when the head sits on a boundary cell, and the
driver then re-lays the tape with padding and resumes the machine.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from ..engine import Engine, Filter, Local, Push, route
from ..expr import Min, _, apply, var
from ..graph import VERTEX, RuntimePropertyGraph
from ..machine import Machine
from ..values import ID, INT

v = var("v")
LEFT, RIGHT = "L", "R"


@dataclass
class TuringSpec:
    """(Q, Sigma, s, F, lambda) with states and symbols as small non-negative ints.

    ``delta[(q, a)] = (q2, a2, "L" | "R")`` must be total on non-finishing states.
    """

    n_states: int
    n_symbols: int
    start: int
    finals: frozenset
    delta: dict
    tape: Sequence[int] = ()
    head: int = 0
    blank: int = 0

    def __post_init__(self):
        self.finals = frozenset(self.finals)
        for q in range(self.n_states):
            if q in self.finals:
                continue
            for a in range(self.n_symbols):
                if (q, a) not in self.delta:
                    raise ValueError(f"transition missing for state {q}, symbol {a}")


@dataclass
class TuringResult:
    halted: bool
    steps: int
    tape: dict  # position relative to the initial head cell -> non-blank symbol
    state: int
    head: int
    segments: int = 1
    traces: list = field(default_factory=list, repr=False)


def _tables(spec: TuringSpec):
    parked = spec.n_states
    shape = (spec.n_states + 1, spec.n_symbols)
    nxt = np.full(shape, parked, dtype=np.int64)
    sym = np.zeros(shape, dtype=np.int64)
    right = np.zeros(shape, dtype=bool)
    for (q, a), (q2, a2, d) in spec.delta.items():
        nxt[q, a] = q2
        sym[q, a] = a2
        right[q, a] = d == RIGHT
    return nxt, sym, right


def turing_machine(spec: TuringSpec, width: int, cap: int, done: int) -> Machine:
    """FLASH machine for ``spec`` on a tape of ``width`` cells; ``done`` steps already taken."""
    nxt, sym, right = _tables(spec)
    stopping = sorted(set(spec.finals) | {spec.n_states})

    running = _["@state"] != stopping[0]
    for q in stopping[1:]:
        running = running & (_["@state"] != q)

    def step_state(s, a):
        return nxt[s, a]

    def step_symbol(s, a):
        return sym[s, a]

    def step_to(s, a, out_min, in_min):
        return np.where(right[s, a], out_min, in_min)

    o2 = Local((
        _.set("@nstate", apply(step_state, _["@state"], _["@symbol"], name="delta_state")),
        _.set("@to", apply(step_to, _["@state"], _["@symbol"], _.out.min(), _.in_.min(), name="delta_move")),
        _.set("@symbol", apply(step_symbol, _["@state"], _["@symbol"], name="delta_symbol")),
        _.set("@state", spec.n_states),
    ))
    o3 = Push(route.prop("@to"), (v.set("@state", Min(_["@nstate"])),))

    def beta(ctx, node):
        head = ctx.engine.sets[node].ids
        if head.size == 0:
            return False
        if done + ctx.visits("LoopS") >= cap:
            return False
        h = int(head[0])
        return 0 < h < width - 1

    m = Machine()
    m.input("V")
    m.op("O1", [Filter(running)])
    m.loop_start("LoopS")
    m.op("Step", [o2, o3, Filter(running)])
    m.loop_end("LoopE")
    m.fin()
    m.predicate("beta_entry", lambda ctx: beta(ctx, "O1"))
    m.predicate("beta", lambda ctx: beta(ctx, "Step"))
    m.edge("Input", "O1")
    m.branch("O1", "beta_entry", "LoopS", "Fin")
    m.edge("LoopS", "Step")
    m.edge("Step", "LoopE")
    m.branch("LoopE", "beta", "LoopS", "Fin")
    return m


def _tape_graph(width: int) -> RuntimePropertyGraph:
    src = np.arange(width - 1, dtype=np.int64)
    g = RuntimePropertyGraph(width, src, src + 1, directed=True).fresh()
    for name in ("@symbol", "@state", "@nstate"):
        g.declare(name, INT)
    g.declare("@to", ID)
    return g


def turing_simulate(spec: TuringSpec, step_cap: int = 10_000, pad: int = 8, keep_traces: bool = False) -> TuringResult:
    tape = list(spec.tape)
    parked = spec.n_states
    lo = min(0, spec.head)
    hi = max(len(tape), spec.head + 1)
    origin = pad - lo  # graph index of tape position 0
    width = (hi - lo) + 2 * pad
    symbols = np.full(width, spec.blank, dtype=np.int64)
    symbols[origin:origin + len(tape)] = tape
    head = origin + spec.head
    state = spec.start
    start_index = head
    steps = 0
    segments = 0
    traces = []
    while True:
        segments += 1
        g = _tape_graph(width)
        states = np.full(width, parked, dtype=np.int64)
        states[head] = state
        g.write_column("@symbol", VERTEX, np.arange(width), symbols)
        g.write_column("@state", VERTEX, np.arange(width), states)
        m = turing_machine(spec, width, step_cap, steps)
        with Engine(g) as eng:
            run = m.run(eng, record=keep_traces)
        if keep_traces:
            traces.append(run.trace)
        steps += run.visits["LoopS"]
        symbols = g.runtime_column("@symbol").copy()
        states = g.runtime_column("@state")
        live = np.flatnonzero(states != parked)
        head = int(live[0])
        state = int(states[head])
        if state in spec.finals:
            halted = True
            break
        if steps >= step_cap:
            halted = False
            break
        # head reached a boundary cell: re-lay the tape with fresh padding on both sides
        grow = max(pad, width)
        symbols = np.concatenate([np.full(grow, spec.blank, np.int64), symbols, np.full(grow, spec.blank, np.int64)])
        head += grow
        start_index += grow
        width += 2 * grow
    cells = {int(i - start_index): int(s) for i, s in enumerate(symbols.tolist()) if s != spec.blank}
    return TuringResult(halted, steps, cells, state, head - start_index, segments, traces)


def unary_increment(ones: int = 3) -> TuringSpec:
    """Append one ``1`` to a block of ``ones`` ones; halts after ``ones + 1`` steps."""
    delta = {(0, 1): (0, 1, "R"), (0, 0): (1, 1, "R")}
    return TuringSpec(2, 2, 0, frozenset({1}), delta, tape=(1,) * ones)
