"""Recursive-descent parser producing :mod:`flashgraph.dsl.ast` trees."""

from __future__ import annotations

from typing import Optional

from . import ast as A
from .lexer import DslError, Token, tokenize, unquote


class ParseError(DslError):
    def __init__(self, message: str, line: int, col: int, expected: tuple = ()):
        self.expected = tuple(expected)
        super().__init__(message, line, col)


TYPE_NAMES = ("int", "float", "bool", "ID", "string", "list", "Pair")
OPERATORS = ("Filter", "Local", "Push", "Pull", "Group", "Order", "Output")
KEYWORDS = ("while", "do", "if", "else", "procedural", "param", "edge", "true", "false", "INT_MAX")
FUNCTIONS = ("min", "max", "abs", "sum", "list", "set")

_BINARY_LEVELS = (
    ("||",),
    ("&&",),
    ("==", "!="),
    ("<", "<=", ">", ">="),
    ("+", "-"),
    ("*", "/", "%"),
)


class Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0

    # -- token helpers --------------------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, kind: str, text: Optional[str] = None) -> bool:
        t = self.tok
        return t.kind == kind and (text is None or t.text == text)

    def at_word(self, word: str) -> bool:
        return self.at("IDENT", word)

    def advance(self) -> Token:
        t = self.tok
        self.i += 1
        return t

    def fail(self, expected) -> ParseError:
        t = self.tok
        exp = tuple(expected)
        return ParseError(f"expected {' or '.join(exp)}, found {t}", t.line, t.col, exp)

    def expect(self, kind: str, text: Optional[str] = None) -> Token:
        if self.at(kind, text):
            return self.advance()
        raise self.fail([repr(text) if text else kind if kind in ("IDENT", "PROP", "INT") else repr(kind)])

    def expect_word(self, word: str) -> Token:
        if self.at_word(word):
            return self.advance()
        raise self.fail([repr(word)])

    def ident(self, what: str = "identifier") -> Token:
        if self.at("IDENT") and self.tok.text not in KEYWORDS:
            return self.advance()
        raise self.fail([what])

    # -- script ---------------------------------------------------------------------

    def script(self) -> A.Script:
        items = []
        while not self.at("EOF"):
            items.append(self.item())
        return A.Script(tuple(items), (1, 1))

    def item(self):
        if self.at_word("param"):
            return self.param_decl()
        if self.at_word("procedural"):
            return self.procedure()
        if self._at_decl():
            return self.decl()
        return self.statement()

    def _at_decl(self) -> bool:
        t = self.tok
        if t.kind != "IDENT":
            return False
        if t.text == "edge" and self.peek().kind == "IDENT" and self.peek().text in TYPE_NAMES:
            return True
        if t.text == "Pair" and self.peek().kind == "<":
            return True
        return t.text in TYPE_NAMES and self.peek().kind == "PROP"

    def type_ref(self) -> A.TypeRef:
        t = self.tok
        if not (t.kind == "IDENT" and t.text in TYPE_NAMES):
            raise self.fail(["type name"])
        self.advance()
        if t.text != "Pair":
            return A.TypeRef(t.text, (), (t.line, t.col))
        self.expect("<")
        first = self.type_ref()
        self.expect(",")
        second = self.type_ref()
        self.expect(">")
        return A.TypeRef("Pair", (first, second), (t.line, t.col))

    def decl(self) -> A.Decl:
        t = self.tok
        edge = False
        if self.at_word("edge"):
            self.advance()
            edge = True
        ty = self.type_ref()
        name = self.expect("PROP").text
        self.expect(";")
        return A.Decl(ty, name, edge, (t.line, t.col))

    def param_decl(self) -> A.ParamDecl:
        t = self.expect_word("param")
        ty = self.type_ref()
        name = self.ident("parameter name").text
        default = None
        if self.at("="):
            self.advance()
            default = self.expr()
        self.expect(";")
        return A.ParamDecl(ty, name, default, (t.line, t.col))

    def procedure(self) -> A.Procedure:
        t = self.expect_word("procedural")
        name = self.ident("procedure name").text
        self.expect("(")
        params = []
        if not self.at(")"):
            params.append(self.ident("parameter name").text)
            while self.at(","):
                self.advance()
                params.append(self.ident("parameter name").text)
        self.expect(")")
        body = self.block()
        return A.Procedure(name, tuple(params), body, (t.line, t.col))

    def block(self) -> tuple:
        self.expect("{")
        body = []
        while not self.at("}"):
            if self.at("EOF"):
                raise self.fail(["'}'"])
            body.append(self.statement())
        self.advance()
        return tuple(body)

    # -- statements -----------------------------------------------------------------

    def statement(self):
        t = self.tok
        pos = (t.line, t.col)
        if self.at_word("while"):
            self.advance()
            cond = self.paren_expr()
            return A.While(cond, self.block(), pos)
        if self.at_word("do"):
            self.advance()
            body = self.block()
            self.expect_word("while")
            cond = self.paren_expr()
            self.expect(";")
            return A.DoWhile(body, cond, pos)
        if self.at_word("if"):
            return self.if_stmt()
        if t.kind == "IDENT" and t.text not in KEYWORDS:
            nxt = self.peek()
            if nxt.kind == "=":
                name = self.advance().text
                self.advance()
                chain = self.chain()
                self.expect(";")
                return A.Assign(name, chain, pos)
            if nxt.kind == "(":
                name = self.advance().text
                args = self.call_args()
                self.expect(";")
                return A.CallStmt(name, args, pos)
            chain = self.chain()
            self.expect(";")
            return A.ChainStmt(chain, pos)
        raise self.fail(["statement"])

    def if_stmt(self) -> A.If:
        t = self.expect_word("if")
        cond = self.paren_expr()
        then = self.block()
        orelse = None
        if self.at_word("else"):
            self.advance()
            orelse = (self.if_stmt(),) if self.at_word("if") else self.block()
        return A.If(cond, then, orelse, (t.line, t.col))

    def paren_expr(self):
        self.expect("(")
        e = self.expr()
        self.expect(")")
        return e

    def call_args(self) -> tuple:
        self.expect("(")
        args = []
        if not self.at(")"):
            args.append(self.expr())
            while self.at(","):
                self.advance()
                args.append(self.expr())
        self.expect(")")
        return tuple(args)

    # -- chains ---------------------------------------------------------------------

    def chain(self) -> A.Chain:
        src = self.ident("set variable")
        ops = []
        while self.at("."):
            self.advance()
            ops.append(self.operator())
        if not ops:
            raise self.fail(["'.'"])
        return A.Chain(src.text, tuple(ops), (src.line, src.col))

    def operator(self):
        t = self.tok
        pos = (t.line, t.col)
        if not (t.kind == "IDENT" and t.text in OPERATORS):
            raise self.fail(["operator (" + ", ".join(OPERATORS) + ")"])
        self.advance()
        self.expect("(")
        name = t.text
        if name == "Filter":
            op = A.FilterOp(self.expr(), pos)
        elif name == "Local":
            op = A.LocalOp(self.assignments(), pos)
        elif name in ("Push", "Pull"):
            op = A.RouteOp(name, self.route(), pos)
        elif name == "Group":
            op = self.group(pos)
        elif name == "Order":
            op = self.order(pos)
        else:
            op = self.output(pos)
        self.expect(")")
        return op

    def route(self) -> A.RouteRef:
        t = self.tok
        if not self.at("IDENT", "_"):
            raise self.fail(["'_'"])
        self.advance()
        self.expect(".")
        if self.at("PROP"):
            name = self.advance().text
        else:
            name = self.ident("route name").text
        where = effect = None
        if self.at("["):
            lt = self.advance()
            params = self.lambda_params()
            where = A.Lambda(params, self.expr(), (lt.line, lt.col))
            self.expect("]")
        if self.at("("):
            lt = self.advance()
            params = self.lambda_params()
            effect = A.Lambda(params, self.assignments(), (lt.line, lt.col))
            self.expect(")")
        return A.RouteRef(name, where, effect, (t.line, t.col))

    def lambda_params(self) -> tuple:
        self.expect("|")
        params = [self.ident("lambda parameter").text]
        while self.at(","):
            self.advance()
            params.append(self.ident("lambda parameter").text)
        self.expect("|")
        return tuple(params)

    def assignments(self) -> tuple:
        out = [self.assignment()]
        while self.at(","):
            self.advance()
            out.append(self.assignment())
        return tuple(out)

    def assignment(self) -> A.Assignment:
        t = self.tok
        lhs = self.postfix()
        if not isinstance(lhs, A.Member) or lhs.key in ("id", "label", "src", "dst", "out", "in", "both"):
            raise ParseError("left side of an assignment must be a property access such as _.@p", t.line, t.col)
        self.expect("=")
        return A.Assignment(lhs.base, lhs.key, self.expr(), (t.line, t.col))

    def prop_key(self) -> str:
        if self.at("PROP"):
            return self.advance().text
        return self.ident("property name").text

    def group(self, pos) -> A.GroupOp:
        keys = [self.prop_key()]
        effect = None
        while self.at(","):
            self.advance()
            if self.at("|"):
                lt = self.tok
                params = self.lambda_params()
                effect = A.Lambda(params, self.assignments(), (lt.line, lt.col))
                break
            keys.append(self.prop_key())
        return A.GroupOp(tuple(keys), effect, pos)

    def order(self, pos) -> A.OrderOp:
        keys = []
        limit = None
        while True:
            if self.at("INT") and keys:
                limit = int(self.advance().text)
                break
            key = self.prop_key()
            direction = None
            if self.at("("):
                self.advance()
                if self.at_word("ASC") or self.at_word("DESC"):
                    direction = self.advance().text
                else:
                    raise self.fail(["'ASC'", "'DESC'"])
                self.expect(")")
            keys.append((key, direction))
            if not self.at(","):
                break
            self.advance()
        return A.OrderOp(tuple(keys), limit, pos)

    def output(self, pos) -> A.OutputOp:
        if self.at("*"):
            self.advance()
            return A.OutputOp(("*",), pos)
        keys = [self.prop_key()]
        while self.at(","):
            self.advance()
            keys.append(self.prop_key())
        return A.OutputOp(tuple(keys), pos)

    # -- expressions ----------------------------------------------------------------

    def expr(self, level: int = 0):
        if level == len(_BINARY_LEVELS):
            return self.unary()
        left = self.expr(level + 1)
        while self.tok.kind in _BINARY_LEVELS[level]:
            t = self.advance()
            right = self.expr(level + 1)
            left = A.Binary(t.kind, left, right, (t.line, t.col))
        return left

    def unary(self):
        if self.at("!") or self.at("-"):
            t = self.advance()
            return A.Unary(t.kind, self.unary(), (t.line, t.col))
        return self.postfix()

    def postfix(self):
        node = self.primary()
        while self.at("."):
            self.advance()
            t = self.tok
            if t.kind == "PROP":
                self.advance()
                node = A.Member(node, t.text, (t.line, t.col))
                continue
            key = self.ident("property or method name").text
            if self.at("("):
                self.advance()
                self.expect(")")
                node = A.MethodCall(node, key, (t.line, t.col))
            else:
                node = A.Member(node, key, (t.line, t.col))
        return node

    def primary(self):
        t = self.tok
        pos = (t.line, t.col)
        if t.kind == "INT":
            self.advance()
            return A.Literal(int(t.text), "int", pos)
        if t.kind == "FLOAT":
            self.advance()
            return A.Literal(float(t.text), "float", pos)
        if t.kind == "STRING":
            self.advance()
            return A.Literal(unquote(t.text), "string", pos)
        if t.kind == "IDENT":
            if t.text in ("true", "false"):
                self.advance()
                return A.Literal(t.text == "true", "bool", pos)
            if t.text == "INT_MAX":
                self.advance()
                return A.Literal("INT_MAX", "INT_MAX", pos)
            if t.text in FUNCTIONS and self.peek().kind == "(":
                self.advance()
                return A.CallExpr(t.text, self.call_args(), pos)
            if t.text in KEYWORDS:
                raise self.fail(["expression"])
            self.advance()
            return A.Name(t.text, pos)
        if t.kind == "(":
            self.advance()
            first = self.expr()
            if self.at(","):
                self.advance()
                second = self.expr()
                self.expect(")")
                return A.PairExpr(first, second, pos)
            self.expect(")")
            return first
        raise self.fail(["expression"])


def parse(text: str) -> A.Script:
    """Parse a whole script; raises :class:`ParseError` (or ``LexError``) with a position."""
    return Parser(text).script()


def parse_expr(text: str):
    p = Parser(text)
    e = p.expr()
    p.expect("EOF")
    return e
