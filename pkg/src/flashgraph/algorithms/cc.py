"""Connected components: label propagation (WCC), push/pull hybrid and the star-based CC-opt."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from ..engine import Engine, Frontier, route
from ..expr import Min, Sum, _, fmin, var
from ..graph import VERTEX, RuntimePropertyGraph
from ..machine import Control
from ..values import BOOL, ID, INT

v = var("v")


@dataclass
class CcResult:
    graph: RuntimePropertyGraph
    labels: np.ndarray
    rounds: int
    census: dict = field(default_factory=dict)
    strategy: list = field(default_factory=list)
    stats: dict = field(default_factory=dict)


def _census(g: RuntimePropertyGraph, groups: Frontier, key: str) -> dict:
    ids = groups.ids
    labels = g.read_column(key, VERTEX, ids).tolist()
    counts = g.read_column("@cnt", VERTEX, ids).tolist()
    return dict(zip(labels, counts))


def wcc(g: RuntimePropertyGraph, threads: int = 1) -> CcResult:
    """Min-label propagation over both directions; ``rounds`` counts loop feedbacks."""
    g = g.fresh()
    for name in ("@cc", "@precc", "@cnt"):
        g.declare(name, INT)
    with Engine(g, threads) as eng:
        ctl = Control()
        A = eng.V.local(_.set("@cc", _.id))
        for _round in ctl.loop(lambda: A.size() > 0):
            A = (A.push(route.both(), v.set("@precc", Min(_["@cc"])))
                  .filter(_["@precc"] < _["@cc"])
                  .local(_.set("@cc", _["@precc"])))
        groups = eng.V.group("@cc", v.set("@cnt", Sum(1)))
        census = _census(g, groups, "@cc")
        return CcResult(g, g.runtime_column("@cc")[: g.n].copy(), ctl.counter(), census, stats=dict(eng.stats))


def cc_pull(g: RuntimePropertyGraph, threads: int = 1) -> CcResult:
    """Adaptive CC: Pull from all of V when the active set is small, Push otherwise."""
    g = g.fresh()
    g.declare("@cc", INT)
    g.declare("@precc", INT)
    strategy = []
    with Engine(g, threads) as eng:
        ctl = Control()
        # @precc starts equal to @cc so vertices that pull nothing compare equal
        A = eng.V.local(_.set("@cc", _.id), _.set("@precc", _.id))
        n = g.n
        for _round in ctl.loop(lambda: A.size() > 0):
            if A.size() < n / 2:
                strategy.append("pull")
                A = (eng.V.pull(route.out(where=_["@cc"] > v["@cc"]), _.set("@precc", Min(v["@cc"])))
                     .filter(_["@precc"] != _["@cc"])
                     .local(_.set("@cc", _["@precc"])))
            else:
                strategy.append("push")
                A = (A.push(route.out(where=_["@cc"] < v["@cc"]), v.set("@precc", Min(_["@cc"])))
                      .local(_.set("@cc", _["@precc"])))
        return CcResult(g, g.runtime_column("@cc")[: g.n].copy(), ctl.counter(), strategy=strategy, stats=dict(eng.stats))


# -- CC-opt ------------------------------------------------------------------------

CC_OPT_PROPERTIES = (
    ("@p", ID),
    ("@new_p", ID),
    ("@grandp", ID),
    ("@cnt", INT),
    ("@is_star", BOOL),
    ("@is_p_star", BOOL),
)


def declare_cc_opt(g: RuntimePropertyGraph) -> None:
    for name, vt in CC_OPT_PROPERTIES:
        g.declare(name, vt)


def forest_init(eng: Engine) -> None:
    (eng.V.local(_.set("@p", fmin(_.id, _.out.min())))
          .local(_.set("@cnt", 0))
          .filter(_["@p"] != _.id)
          .push(route.prop("@p"), v.set("@cnt", Sum(1))))
    (eng.V.filter((_["@cnt"] == 0) & (_.out.size() != 0) & (_["@p"] == _.id))
          .local(_.set("@p", _.out.min())))
    # isolated vertices never pull a neighbour parent; keep @new_p meaningful for hooking
    eng.V.local(_.set("@new_p", _["@p"]))


def star_detection(eng: Engine) -> None:
    (eng.V.local(_.set("@is_star", True))
          .pull(route.prop("@p"), _.set("@grandp", Min(v["@p"])))
          .filter(_["@p"] != _["@grandp"])
          .local(_.set("@is_star", False))
          .push(route.prop("@grandp"))
          .local(_.set("@is_star", False)))
    (eng.V.filter(_["@is_star"] == True)  # noqa: E712 - builds an expression
          .pull(route.prop("@p"), _.set("@is_star", Min(v["@is_star"]))))


def star_hooking(eng: Engine, is_cond: bool) -> None:
    A = (eng.V.pull(route.prop("@p"), _.set("@is_p_star", Min(v["@is_star"] & (v == v["@p"]))))
              .filter(_["@is_p_star"])
              .pull(route.out(), _.set("@new_p", Min(v["@p"]))))
    if is_cond:
        (A.push(route.prop("@p"), v.set("@new_p", Min(_["@new_p"])))
          .filter(_["@new_p"] < _["@p"])
          .local(_.set("@p", _["@new_p"])))
    else:
        A.push(route.prop("@p"), v.set("@p", Min(_["@new_p"])))


def pointer_jumping(eng: Engine) -> Frontier:
    return (eng.V.pull(route.prop("@p"), _.set("@new_p", Min(v["@p"])))
                 .filter(_["@new_p"] != _["@p"])
                 .local(_.set("@p", _["@new_p"])))


def cc_opt(
    g: RuntimePropertyGraph,
    threads: int = 1,
    observer: Optional[Callable[[str, RuntimePropertyGraph], None]] = None,
) -> CcResult:
    """Star-hooking CC; ``observer(phase, graph)`` runs after every sub-procedure."""
    g = g.fresh()
    declare_cc_opt(g)
    seen = observer or (lambda phase, graph: None)
    with Engine(g, threads) as eng:
        ctl = Control()
        forest_init(eng)
        seen("forest_init", g)
        A = None
        for _round in ctl.do_while(lambda: A.size() != 0):
            star_detection(eng)
            seen("star_detection", g)
            star_hooking(eng, True)
            seen("conditional_hooking", g)
            star_detection(eng)
            seen("star_detection", g)
            star_hooking(eng, False)
            seen("unconditional_hooking", g)
            A = pointer_jumping(eng)
            seen("pointer_jumping", g)
        return CcResult(g, g.runtime_column("@p")[: g.n].copy(), ctl.visits["loop"], stats=dict(eng.stats))
