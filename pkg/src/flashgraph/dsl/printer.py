"""Canonical source rendering; ``parse(pretty_print(t)) == t`` for every tree ``t``."""

from __future__ import annotations

from . import ast as A
from .lexer import quote

_PREC = {"||": 1, "&&": 2, "==": 3, "!=": 3, "<": 4, "<=": 4, ">": 4, ">=": 4,
         "+": 5, "-": 5, "*": 6, "/": 6, "%": 6}
_UNARY = 7
_INDENT = "    "


def type_str(t: A.TypeRef) -> str:
    if t.name == "Pair":
        return f"Pair<{type_str(t.args[0])}, {type_str(t.args[1])}>"
    return t.name


def expr_str(e, ctx: int = 0) -> str:
    """Render ``e``; ``ctx`` is the binding strength required by the surrounding operator."""
    if isinstance(e, A.Literal):
        if e.kind == "bool":
            return "true" if e.value else "false"
        if e.kind == "string":
            return quote(e.value)
        if e.kind == "INT_MAX":
            return "INT_MAX"
        if e.kind == "float":
            text = repr(float(e.value))
            return text if any(c in text for c in ".en") else text + ".0"
        return str(e.value)
    if isinstance(e, A.Name):
        return e.ident
    if isinstance(e, A.Member):
        return f"{expr_str(e.base, 8)}.{e.key}"
    if isinstance(e, A.MethodCall):
        return f"{expr_str(e.base, 8)}.{e.method}()"
    if isinstance(e, A.CallExpr):
        return f"{e.func}({', '.join(expr_str(a) for a in e.args)})"
    if isinstance(e, A.PairExpr):
        return f"({expr_str(e.first)}, {expr_str(e.second)})"
    if isinstance(e, A.Unary):
        text = e.op + expr_str(e.operand, _UNARY)
        return f"({text})" if ctx > _UNARY else text
    if isinstance(e, A.Binary):
        p = _PREC[e.op]
        # left-associative: the right operand needs strictly tighter binding
        text = f"{expr_str(e.left, p)} {e.op} {expr_str(e.right, p + 1)}"
        return f"({text})" if p < ctx else text
    raise TypeError(f"not an expression: {e!r}")


def assignment_str(a: A.Assignment) -> str:
    return f"{expr_str(a.target, 8)}.{a.key} = {expr_str(a.value)}"


def _lambda(lam: A.Lambda, body: str) -> str:
    return f"|{', '.join(lam.params)}| {body}"


def route_str(r: A.RouteRef) -> str:
    s = f"_.{r.name}"
    if r.where is not None:
        s += "[" + _lambda(r.where, expr_str(r.where.body)) + "]"
    if r.effect is not None:
        s += "(" + _lambda(r.effect, ", ".join(assignment_str(a) for a in r.effect.body)) + ")"
    return s


def op_str(op) -> str:
    if isinstance(op, A.FilterOp):
        return f"Filter({expr_str(op.pred)})"
    if isinstance(op, A.LocalOp):
        return f"Local({', '.join(assignment_str(a) for a in op.writes)})"
    if isinstance(op, A.RouteOp):
        return f"{op.op}({route_str(op.route)})"
    if isinstance(op, A.GroupOp):
        parts = list(op.keys)
        if op.effect is not None:
            parts.append(_lambda(op.effect, ", ".join(assignment_str(a) for a in op.effect.body)))
        return f"Group({', '.join(parts)})"
    if isinstance(op, A.OrderOp):
        parts = [k if d is None else f"{k}({d})" for k, d in op.keys]
        if op.limit is not None:
            parts.append(str(op.limit))
        return f"Order({', '.join(parts)})"
    if isinstance(op, A.OutputOp):
        return f"Output({', '.join(op.keys)})"
    raise TypeError(f"not an operator: {op!r}")


def chain_str(c: A.Chain, indent: str) -> str:
    head = f"{c.source}.{op_str(c.ops[0])}"
    pad = indent + " " * len(c.source)
    return "\n".join([head] + [f"{pad}.{op_str(o)}" for o in c.ops[1:]])


def _block(stmts, indent: str) -> list[str]:
    lines = ["{"]
    for s in stmts:
        lines.extend(stmt_lines(s, indent + _INDENT))
    lines.append(indent + "}")
    return lines


def _join_block(prefix: str, stmts, indent: str) -> list[str]:
    body = _block(stmts, indent)
    return [prefix + body[0]] + body[1:]


def stmt_lines(s, indent: str = "") -> list[str]:
    if isinstance(s, A.Assign):
        lead = f"{s.target} = "
        return [indent + lead + chain_str(s.chain, indent + " " * len(lead)) + ";"]
    if isinstance(s, A.ChainStmt):
        return [indent + chain_str(s.chain, indent) + ";"]
    if isinstance(s, A.CallStmt):
        return [f"{indent}{s.name}({', '.join(expr_str(a) for a in s.args)});"]
    if isinstance(s, A.While):
        return _join_block(f"{indent}while ({expr_str(s.cond)}) ", s.body, indent)
    if isinstance(s, A.DoWhile):
        lines = _join_block(f"{indent}do ", s.body, indent)
        lines[-1] += f" while ({expr_str(s.cond)});"
        return lines
    if isinstance(s, A.If):
        lines = _join_block(f"{indent}if ({expr_str(s.cond)}) ", s.then, indent)
        if s.orelse is not None:
            if len(s.orelse) == 1 and isinstance(s.orelse[0], A.If):
                nested = stmt_lines(s.orelse[0], indent)
                lines[-1] += " else " + nested[0].lstrip()
                lines.extend(nested[1:])
            else:
                body = _block(s.orelse, indent)
                lines[-1] += " else " + body[0]
                lines.extend(body[1:])
        return lines
    raise TypeError(f"not a statement: {s!r}")


def item_lines(item) -> list[str]:
    if isinstance(item, A.Decl):
        return [("edge " if item.edge else "") + f"{type_str(item.type)} {item.name};"]
    if isinstance(item, A.ParamDecl):
        default = "" if item.default is None else f" = {expr_str(item.default)}"
        return [f"param {type_str(item.type)} {item.name}{default};"]
    if isinstance(item, A.Procedure):
        return _join_block(f"procedural {item.name}({', '.join(item.params)}) ", item.body, "")
    return stmt_lines(item)


def pretty_print(script: A.Script) -> str:
    return "".join(line + "\n" for item in script.items for line in item_lines(item))
