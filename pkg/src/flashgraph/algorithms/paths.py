"""Single-source shortest paths and PageRank in the listing style."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..engine import Engine, EngineError, route
from ..expr import Min, Sum, _, fabs, size_of, var
from ..graph import EDGE, RuntimePropertyGraph
from ..machine import Control
from ..values import FLOAT, INT, INT_MAX

v = var("v")
e = var("e")


@dataclass
class SsspResult:
    graph: RuntimePropertyGraph
    dist: np.ndarray
    rounds: int
    stats: dict = field(default_factory=dict)


@dataclass
class PagerankResult:
    graph: RuntimePropertyGraph
    pr: np.ndarray
    rounds: int
    converged: bool
    stats: dict = field(default_factory=dict)


def sssp(g: RuntimePropertyGraph, source: int, weight: str = "weight", threads: int = 1) -> SsspResult:
    """Label-correcting frontier SSSP; unreachable vertices keep INT_MAX."""
    if (EDGE, weight) not in g.static and (EDGE, weight) not in g.runtime:
        raise EngineError(f"sssp needs the edge weight property {weight!r}")
    if not 0 <= source < g.n:
        raise EngineError(f"source vertex {source} out of range")
    g = g.fresh()
    g.declare("@dist", INT)
    g.declare("@min_d", INT)
    with Engine(g, threads, params={"src_id": source}) as eng:
        ctl = Control()
        A = (eng.V.local(_.set("@dist", INT_MAX))
                  .filter(_.id == source)
                  .local(_.set("@dist", 0)))
        for _round in ctl.loop(lambda: A.size() > 0):
            A = (A.push(route.outE(), e.dst.set("@min_d", Min(_["@dist"] + e[weight])))
                  .filter(_["@dist"] > _["@min_d"])
                  .local(_.set("@dist", _["@min_d"])))
        return SsspResult(g, g.runtime_column("@dist")[: g.n].copy(), ctl.counter(), dict(eng.stats))


def pagerank(
    g: RuntimePropertyGraph,
    damping: float = 0.85,
    tol: float = 1e-10,
    max_iters: int = 10_000,
    threads: int = 1,
) -> PagerankResult:
    """PageRank by rounds over all of V; vertices without out-edges contribute nothing."""
    g = g.fresh()
    for name in ("@pr", "@tmp", "@sum", "@new"):
        g.declare(name, FLOAT)
    d = float(damping)
    with Engine(g, threads) as eng:
        ctl = Control()
        A = eng.V.local(_.set("@pr", 1 / size_of("V")))
        for _round in ctl.loop(lambda: A.size() > 0 and ctl.visits["loop"] < max_iters):
            eng.V.local(_.set("@sum", 0.0))
            (eng.V.filter(_.out.size() > 0)
                  .local(_.set("@tmp", _["@pr"] / _.out.size()))
                  .push(route.out(), v.set("@sum", Sum(_["@tmp"]))))
            A = (eng.V.local(_.set("@new", (1 - d) / size_of("V") + d * _["@sum"]))
                      .filter(fabs(_["@new"] - _["@pr"]) > tol)
                      .local(_.set("@pr", _["@new"])))
        return PagerankResult(g, g.runtime_column("@pr")[: g.n].copy(), ctl.visits["loop"], A.size() == 0,
                              dict(eng.stats))
