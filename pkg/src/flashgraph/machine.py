"""Control-flow machine M = (G, Omega, Theta, F).

Nodes are ``Input``, operator nodes (a chain of operators), ``Switch``,
``LoopS``, ``LoopE`` and ``Fin``. Transitions are unconditional (``None``
guard) or guarded by ``(predicate, polarity)``. Loops are recovered from the
graph structure: a transition into a ``LoopS`` node that the ``LoopS``
dominates is a Feedback transition, and any transition leaving the loop body
is an Exit transition.

Counter semantics: entering an inactive ``LoopS`` sets its counter to 0 and
activates it; each Feedback arrival adds one; taking an Exit transition
deactivates the loop so that the next entry starts again from 0.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import IO, Any, Callable, Iterator, Optional, Sequence, Union

from .engine import Engine, Operator, VertexSet, describe
from .expr import Env, EvalError, Expr, Param, evaluate_scalar, render

INPUT, OP, SWITCH, LOOPS, LOOPE, FIN = "Input", "Op", "Switch", "LoopS", "LoopE", "Fin"
KINDS = (INPUT, OP, SWITCH, LOOPS, LOOPE, FIN)

DEFAULT_STEP_LIMIT = 10_000_000


class MachineError(Exception):
    pass


class StepLimitExceeded(MachineError):
    def __init__(self, limit: int):
        super().__init__(f"step limit of {limit} node executions exceeded")
        self.limit = limit


def loop_counter(loop: str) -> Param:
    """Guard-expression handle for the counter of loop ``loop`` (its LoopS node name)."""
    return Param("#" + loop)


@dataclass
class Node:
    name: str
    kind: str
    ops: tuple = ()
    source: Any = None  # Input: set name or VertexSet; Op: set name to start from (None = flow)
    assign: Optional[str] = None

    def to_dict(self) -> dict:
        d: dict[str, Any] = {"name": self.name, "kind": self.kind}
        if self.ops:
            d["ops"] = [describe(o) for o in self.ops]
        if self.source is not None:
            d["source"] = self.source if isinstance(self.source, str) else sorted(self.source)
        if self.assign is not None:
            d["assign"] = self.assign
        return d


@dataclass(frozen=True)
class Transition:
    src: str
    dst: str
    guard: Optional[tuple[str, bool]] = None

    def to_dict(self) -> dict:
        guard = None if self.guard is None else [self.guard[0], self.guard[1]]
        return {"from": self.src, "to": self.dst, "guard": guard}


@dataclass
class LoopInfo:
    head: str
    body: frozenset
    feedback: list
    exits: list


@dataclass
class RunResult:
    final: VertexSet
    trace: list
    counters: dict
    visits: dict
    steps: int
    feedbacks: dict = field(default_factory=dict)


Guard = Union[Expr, Callable[["Context"], bool]]


class Context:
    """What a callable predicate may inspect: set sizes and loop counters."""

    def __init__(self, engine: Engine, counters: dict, visits: dict):
        self.engine = engine
        self._counters = counters
        self._visits = visits

    def size(self, name: str) -> int:
        return self.engine.set_size(name)

    def counter(self, loop: str) -> int:
        return self._counters[loop]

    def visits(self, loop: str) -> int:
        """Body entries of ``loop`` during this run."""
        return self._visits[loop]


class Machine:
    def __init__(self):
        self.nodes: dict[str, Node] = {}
        self.predicates: dict[str, Guard] = {}
        self.transitions: list[Transition] = []

    # -- building ------------------------------------------------------------------

    def _add(self, node: Node) -> str:
        if node.name in self.nodes:
            raise MachineError(f"duplicate node name {node.name!r}")
        self.nodes[node.name] = node
        return node.name

    def input(self, source: Any = "V", name: str = "Input") -> str:
        return self._add(Node(name, INPUT, source=source))

    def op(self, name: str, ops: Sequence[Operator], source: Optional[str] = None, assign: Optional[str] = None) -> str:
        return self._add(Node(name, OP, tuple(ops), source, assign))

    def switch(self, name: str) -> str:
        return self._add(Node(name, SWITCH))

    def loop_start(self, name: str) -> str:
        return self._add(Node(name, LOOPS))

    def loop_end(self, name: str) -> str:
        return self._add(Node(name, LOOPE))

    def fin(self, name: str = "Fin") -> str:
        return self._add(Node(name, FIN))

    def predicate(self, name: str, guard: Guard) -> str:
        if name in self.predicates:
            raise MachineError(f"duplicate predicate {name!r}")
        self.predicates[name] = guard
        return name

    def edge(self, src: str, dst: str, guard: Optional[tuple[str, bool]] = None) -> None:
        self.transitions.append(Transition(src, dst, guard))

    def branch(self, src: str, pred: str, if_true: str, if_false: str) -> None:
        self.edge(src, if_true, (pred, True))
        self.edge(src, if_false, (pred, False))

    # -- structure -------------------------------------------------------------------

    def outgoing(self, name: str) -> list[Transition]:
        return [t for t in self.transitions if t.src == name]

    def _entry(self) -> Optional[str]:
        inputs = [n.name for n in self.nodes.values() if n.kind == INPUT]
        return inputs[0] if len(inputs) == 1 else None

    def _reachable(self, start: str) -> list[str]:
        seen, stack = [start], [start]
        while stack:
            for t in self.outgoing(stack.pop()):
                if t.dst in self.nodes and t.dst not in seen:
                    seen.append(t.dst)
                    stack.append(t.dst)
        return seen

    def dominators(self) -> dict[str, set]:
        entry = self._entry()
        if entry is None:
            return {}
        nodes = self._reachable(entry)
        preds: dict[str, list] = {n: [] for n in nodes}
        for t in self.transitions:
            if t.src in preds and t.dst in preds:
                preds[t.dst].append(t.src)
        dom = {n: set(nodes) for n in nodes}
        dom[entry] = {entry}
        changed = True
        while changed:
            changed = False
            for n in nodes:
                if n == entry:
                    continue
                ps = [dom[p] for p in preds[n]]
                new = set.intersection(*ps) | {n} if ps else {n}
                if new != dom[n]:
                    dom[n] = new
                    changed = True
        return dom

    def loops(self) -> dict[str, LoopInfo]:
        """Natural loop of every LoopS node (body, Feedback and Exit transitions)."""
        dom = self.dominators()
        out: dict[str, LoopInfo] = {}
        for name, node in self.nodes.items():
            if node.kind != LOOPS or name not in dom:
                continue
            back = [t for t in self.transitions if t.dst == name and t.src in dom and name in dom[t.src]]
            body = {name}
            stack = [t.src for t in back]
            while stack:
                x = stack.pop()
                if x in body:
                    continue
                body.add(x)
                stack.extend(t.src for t in self.transitions if t.dst == x and t.src in dom)
            exits = [t for t in self.transitions if t.src in body and t.dst not in body]
            out[name] = LoopInfo(name, frozenset(body), back, exits)
        return out

    def validate(self) -> list[str]:
        """Structural diagnostics; an empty list means the machine is well formed."""
        diags: list[str] = []
        inputs = [n for n in self.nodes.values() if n.kind == INPUT]
        if len(inputs) != 1:
            diags.append(f"expected exactly one Input node, found {len(inputs)}")
        for t in self.transitions:
            for end in (t.src, t.dst):
                if end not in self.nodes:
                    diags.append(f"transition {t.src}->{t.dst} names unknown node {end!r}")
            if t.guard is not None and t.guard[0] not in self.predicates:
                diags.append(f"transition {t.src}->{t.dst} uses unknown predicate {t.guard[0]!r}")
        for name, node in self.nodes.items():
            outs = self.outgoing(name)
            plain = [t for t in outs if t.guard is None]
            guarded = [t for t in outs if t.guard is not None]
            if node.kind == FIN:
                if outs:
                    diags.append(f"Fin node {name} has outgoing transitions")
                continue
            if not outs:
                diags.append(f"node {name} has no outgoing transition")
            if len(plain) > 1:
                diags.append(f"node {name} has {len(plain)} unconditional transitions")
            if plain and guarded:
                diags.append(f"node {name} mixes unconditional and guarded transitions")
            if node.kind == SWITCH and not guarded:
                diags.append(f"unpaired switch {name}: no guarded transitions")
            by_pred: dict[str, set] = {}
            for t in guarded:
                by_pred.setdefault(t.guard[0], set()).add(t.guard[1])
            for pred, pols in by_pred.items():
                if pols != {True, False}:
                    diags.append(f"unpaired switch {name}: predicate {pred} lacks its "
                                 f"{'false' if True in pols else 'true'} branch")
            if len(by_pred) > 1:
                diags.append(f"node {name} branches on more than one predicate")
            if node.kind == OP and not node.ops:
                diags.append(f"operator node {name} has no operators")
        entry = self._entry()
        if entry is not None:
            reach = set(self._reachable(entry))
            if not any(self.nodes[n].kind == FIN for n in reach):
                diags.append("no Fin node is reachable from Input")
            for name in self.nodes:
                if name not in reach:
                    diags.append(f"node {name} is unreachable")
            loops = self.loops()
            for head, info in loops.items():
                if not info.feedback:
                    diags.append(f"loop {head} has no feedback transition")
                if not info.exits:
                    diags.append(f"loop {head} has no exit transition")
            for name, node in self.nodes.items():
                if node.kind == LOOPE and name in reach and not any(name in i.body for i in loops.values()):
                    diags.append(f"LoopE node {name} is outside every loop")
        return diags

    # -- execution -------------------------------------------------------------------

    def run(
        self,
        engine: Engine,
        step_limit: int = DEFAULT_STEP_LIMIT,
        trace_sink: Optional[IO[str]] = None,
        record: bool = True,
    ) -> RunResult:
        """Execute from Input to Fin; ``record=False`` skips building the trace list."""
        diags = self.validate()
        if diags:
            raise MachineError("invalid machine: " + "; ".join(diags))
        loops = self.loops()
        feedback = {(t.src, t.dst, t.guard) for info in loops.values() for t in info.feedback}
        exits: dict[tuple, list[str]] = {}
        for head, info in loops.items():
            for t in info.exits:
                exits.setdefault((t.src, t.dst, t.guard), []).append(head)
        counters = {h: 0 for h in loops}
        visits = {h: 0 for h in loops}
        feedbacks = {h: 0 for h in loops}
        active = {h: False for h in loops}
        ctx = Context(engine, counters, visits)
        outgoing = {name: self.outgoing(name) for name in self.nodes}
        labels = {name: " . ".join(describe(o) for o in n.ops) for name, n in self.nodes.items() if n.ops}
        trace: list[dict] = []

        node = self.nodes[self._entry()]
        current = VertexSet()
        steps = 0
        while True:
            steps += 1
            if steps > step_limit:
                raise StepLimitExceeded(step_limit)
            vin = current
            if node.kind == INPUT:
                current = self._resolve(engine, node.source)
                vin = current
            elif node.kind == OP:
                vin = current if node.source is None else self._resolve(engine, node.source)
                current = engine.run_chain(vin, node.ops)
                engine.sets[node.name] = current
                if node.assign:
                    engine.sets[node.assign] = current
            elif node.kind == LOOPS:
                if active[node.name]:
                    counters[node.name] += 1
                else:
                    active[node.name] = True
                    counters[node.name] = 0
                visits[node.name] += 1
            if record or trace_sink is not None:
                rec = {
                    "step": steps,
                    "node": node.name,
                    "kind": node.kind,
                    "in": len(vin),
                    "out": len(current),
                    "counters": dict(counters),
                }
                if node.ops:
                    rec["op"] = labels[node.name]
                if record:
                    trace.append(rec)
                if trace_sink is not None:
                    trace_sink.write(json.dumps(rec) + "\n")
            if node.kind == FIN:
                return RunResult(current, trace, dict(counters), dict(visits), steps, dict(feedbacks))
            t = self._choose(outgoing[node.name], engine, ctx, counters)
            key = (t.src, t.dst, t.guard)
            if key in feedback:
                feedbacks[t.dst] += 1
            for head in exits.get(key, ()):
                active[head] = False
            node = self.nodes[t.dst]

    @staticmethod
    def _resolve(engine: Engine, source) -> VertexSet:
        if isinstance(source, VertexSet):
            return source
        if source == "V":
            return engine.all_vertices
        try:
            return engine.sets[source]
        except KeyError:
            raise EvalError(f"set variable {source!r} used before assignment") from None

    def _choose(self, outs: list[Transition], engine: Engine, ctx: Context, counters: dict) -> Transition:
        if len(outs) == 1 and outs[0].guard is None:
            return outs[0]
        pred = outs[0].guard[0]
        value = self.evaluate_guard(pred, engine, ctx, counters)
        for t in outs:
            if t.guard[1] == value:
                return t
        raise MachineError(f"no transition for {pred}={value}")  # unreachable after validate

    def evaluate_guard(self, pred: str, engine: Engine, ctx: Context, counters: dict) -> bool:
        guard = self.predicates[pred]
        if isinstance(guard, Expr):
            params = dict(engine.params)
            params.update({"#" + k: v for k, v in counters.items()})
            env = Env(engine.g, 1, {}, engine.set_size, params)
            value = evaluate_scalar(guard, env)
        else:
            value = guard(ctx)
        if not isinstance(value, bool):
            raise EvalError(f"guard {pred} did not evaluate to a boolean")
        return value

    # -- serialisation ----------------------------------------------------------------

    def to_dict(self) -> dict:
        preds = {k: (render(v) if isinstance(v, Expr) else getattr(v, "__name__", "<callable>"))
                 for k, v in self.predicates.items()}
        return {
            "nodes": [n.to_dict() for n in self.nodes.values()],
            "predicates": preds,
            "transitions": [t.to_dict() for t in self.transitions],
        }


# -- host-language control ----------------------------------------------------------


class Control:
    """Counters for Python-driven loops, mirroring the machine's bookkeeping.

    ``for _ in ctl.loop(lambda: A.size() > 0): ...`` behaves like a guarded
    entry followed by LoopS/body/LoopE, so ``counters[name]`` ends as the
    number of Feedback transitions and ``visits[name]`` as the number of body
    executions.
    """

    def __init__(self, step_limit: int = DEFAULT_STEP_LIMIT):
        self.counters: dict[str, int] = {}
        self.visits: dict[str, int] = {}
        self.step_limit = step_limit

    def _run(self, name, cond, check_first) -> Iterator[int]:
        self.counters[name] = 0
        self.visits[name] = 0
        if check_first and not cond():
            return
        while True:
            self.visits[name] += 1
            if self.visits[name] > self.step_limit:
                raise StepLimitExceeded(self.step_limit)
            yield self.counters[name]
            if not cond():
                return
            self.counters[name] += 1

    def loop(self, cond: Callable[[], bool], name: str = "loop") -> Iterator[int]:
        return self._run(name, cond, True)

    def do_while(self, cond: Callable[[], bool], name: str = "loop") -> Iterator[int]:
        return self._run(name, cond, False)

    def counter(self, name: str = "loop") -> int:
        return self.counters.get(name, 0)
