"""Gather-apply-scatter programs run as an explicit control-flow machine.

Operators, in machine order::

    O1  Local   @D_v <- init, @A_v <- gather identity
    O2  Pull    in-edges, @A_v <- (+) gather(e.src.@D_v, e.@D_e, e.dst.@D_v)
    O3  Local   @D_star <- apply(@A_v, @D_v)
    O4  Filter  converge(@D_star, @D_v)       (true keeps the vertex active)
    O5  Local   @D_v <- @D_star
    O6  Push    out-edges, e.@D_e <- scatter(...)

Control: Input(V) -> O1 -> LoopS -> O2.O3.O4, then on
``|O4| != 0 and #loop < max_iters`` continue with O5.O6 -> LoopS, else Fin.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..engine import Engine, Filter, Local, Pull, Push, _identity, route
from ..expr import Expr, SetSize, Write, _, apply, fabs, lift, size_of, var
from ..graph import EDGE, RuntimePropertyGraph
from ..machine import Machine, RunResult, loop_counter
from ..values import FLOAT, INT, INT_MAX, ValueType

e = var("e")


@dataclass
class GasSpec:
    """User functions as expressions.

    ``gather`` sees the in-edge ``e`` (``e.src``, ``e.dst``, ``e["@D_e"]``);
    ``apply`` and ``converge`` see ``_`` with ``@A_v``, ``@D_v`` and ``@D_star``;
    ``scatter`` sees the out-edge ``e``.
    """

    init: Expr
    gather: Expr
    gather_agg: str
    apply: Expr
    converge: Expr
    max_iters: int
    scatter: Optional[Expr] = None
    vtype: ValueType = FLOAT
    etype: ValueType = FLOAT


@dataclass
class GasResult:
    graph: RuntimePropertyGraph
    data: np.ndarray
    edge_data: np.ndarray
    run: RunResult
    machine: Machine = field(repr=False, default=None)
    stats: dict = field(default_factory=dict)

    @property
    def rounds(self) -> int:
        return self.run.counters.get("LoopS", 0)


def gas_machine(spec: GasSpec) -> Machine:
    ident = _identity(spec.gather_agg, spec.vtype)
    m = Machine()
    m.input("V")
    m.op("O1", [Local((_.set("@D_v", spec.init), _.set("@A_v", ident)))])
    m.loop_start("LoopS")
    m.op("O", [
        Pull(route.inE("e"), (Write(_, "@A_v", lift(spec.gather), spec.gather_agg),)),
        Local((_.set("@D_star", spec.apply),)),
        Filter(lift(spec.converge)),
    ])
    writes = () if spec.scatter is None else (e.set("@D_e", spec.scatter),)
    m.op("O'", [Local((_.set("@D_v", _["@D_star"]),)), Push(route.outE("e"), writes)])
    m.fin()
    m.predicate("beta1", (SetSize("O") != 0) & (loop_counter("LoopS") < spec.max_iters))
    m.edge("Input", "O1")
    m.edge("O1", "LoopS")
    m.edge("LoopS", "O")
    m.branch("O", "beta1", "O'", "Fin")
    m.edge("O'", "LoopS")
    return m


def gas_run(g: RuntimePropertyGraph, spec: GasSpec, threads: int = 1, step_limit: int = 10_000_000) -> GasResult:
    g = g.fresh()
    for name in ("@D_v", "@A_v", "@D_star"):
        g.declare(name, spec.vtype)
    g.declare("@D_e", spec.etype, EDGE)
    m = gas_machine(spec)
    with Engine(g, threads) as eng:
        run = m.run(eng, step_limit=step_limit)
    return GasResult(g, g.runtime_column("@D_v")[: g.n].copy(), g.runtime_column("@D_e", EDGE).copy(), run, m,
                     dict(eng.stats))


def pagerank_spec(damping: float = 0.85, tol: float = 1e-10, max_iters: int = 10_000) -> GasSpec:
    d = float(damping)
    return GasSpec(
        init=1 / size_of("V"),
        gather=e.src["@D_v"] / e.src.out.size(),
        gather_agg="sum",
        apply=(1 - d) / size_of("V") + d * _["@A_v"],
        converge=fabs(_["@D_star"] - _["@D_v"]) > tol,
        max_iters=max_iters,
    )


def _sat_add(dist, w):
    return np.where(dist == INT_MAX, INT_MAX, dist + w)


def _source_init(ids, src):
    return np.where(ids == src, 0, INT_MAX)


def sssp_spec(source: int, weight: str = "weight", max_iters: int = 10_000_000) -> GasSpec:
    return GasSpec(
        init=apply(_source_init, _.id, source, name="source_init"),
        gather=apply(_sat_add, e.src["@D_v"], e[weight], name="sat_add"),
        gather_agg="min",
        apply=apply(np.minimum, _["@A_v"], _["@D_v"], name="min"),
        converge=_["@D_star"] < _["@D_v"],
        max_iters=max_iters,
        vtype=INT,
        etype=INT,
    )
