"""Procedure inlining: call sites are replaced by the procedure body with arguments substituted."""

from __future__ import annotations

from dataclasses import replace

from . import ast as A
from .lexer import DslError

MAX_DEPTH = 64


class Diagnostic(DslError):
    """A semantic problem found after parsing (typing, naming, inlining)."""


def _substitute(node, env: dict, bound: frozenset = frozenset()):
    """Replace free ``Name`` nodes that name procedure parameters with their argument literals."""
    if isinstance(node, tuple):
        return tuple(_substitute(x, env, bound) for x in node)
    if isinstance(node, A.Name):
        if node.ident in env and node.ident not in bound:
            arg = env[node.ident]
            return replace(arg, pos=node.pos)
        return node
    if isinstance(node, A.Lambda):
        inner = bound | frozenset(node.params)
        return replace(node, body=_substitute(node.body, env, inner))
    if not hasattr(node, "__dataclass_fields__"):
        return node
    changes = {}
    for name in node.__dataclass_fields__:
        if name == "pos":
            continue
        old = getattr(node, name)
        if isinstance(old, tuple) or hasattr(old, "__dataclass_fields__"):
            changes[name] = _substitute(old, env, bound)
    return replace(node, **changes) if changes else node


def expand(script: A.Script) -> tuple[list, list[Diagnostic]]:
    """Top-level statements with every procedure call inlined, plus inlining diagnostics."""
    procs = {}
    diags: list[Diagnostic] = []
    for p in script.items:
        if isinstance(p, A.Procedure):
            if p.name in procs:
                diags.append(Diagnostic(f"procedure {p.name} defined twice", *p.pos))
            procs[p.name] = p

    def run(stmts, stack: tuple) -> list:
        out = []
        for s in stmts:
            if isinstance(s, A.CallStmt):
                out.extend(call(s, stack))
            elif isinstance(s, A.While):
                out.append(replace(s, body=tuple(run(s.body, stack))))
            elif isinstance(s, A.DoWhile):
                out.append(replace(s, body=tuple(run(s.body, stack))))
            elif isinstance(s, A.If):
                orelse = None if s.orelse is None else tuple(run(s.orelse, stack))
                out.append(replace(s, then=tuple(run(s.then, stack)), orelse=orelse))
            else:
                out.append(s)
        return out

    def call(s: A.CallStmt, stack: tuple) -> list:
        proc = procs.get(s.name)
        if proc is None:
            diags.append(Diagnostic(f"unknown procedure {s.name}", *s.pos))
            return []
        if s.name in stack or len(stack) >= MAX_DEPTH:
            diags.append(Diagnostic(f"recursive call of procedure {s.name}", *s.pos))
            return []
        if len(s.args) != len(proc.params):
            diags.append(Diagnostic(
                f"procedure {s.name} takes {len(proc.params)} argument(s), got {len(s.args)}", *s.pos))
            return []
        env = {}
        for pname, arg in zip(proc.params, s.args):
            lit = _constant(arg)
            if lit is None:
                diags.append(Diagnostic(f"argument {pname} of {s.name} must be a literal constant", *arg.pos))
                return []
            env[pname] = lit
        body = _substitute(proc.body, env)
        return run(body, stack + (s.name,))

    return run(script.statements, ()), diags


def _constant(e):
    """Literal value of a constant argument (``-`` on numbers allowed), else None."""
    if isinstance(e, A.Literal):
        return e
    if isinstance(e, A.Unary) and e.op == "-" and isinstance(e.operand, A.Literal) and e.operand.kind in ("int", "float"):
        return A.Literal(-e.operand.value, e.operand.kind, e.pos)
    return None
