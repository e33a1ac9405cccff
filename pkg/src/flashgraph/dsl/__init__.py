"""Script frontend: ``.flash`` text to a runnable control-flow machine.

Pipeline: :func:`parse` (tokens to tree), :func:`typecheck` (diagnostics with
positions), :func:`lower` (tree to :class:`~flashgraph.machine.Machine`).
:func:`compile_source` runs all three.
"""

from __future__ import annotations

from importlib import resources
from typing import Optional

from .ast import Script, to_json
from .checker import Schema, typecheck
from .inline import Diagnostic
from .lexer import DslError, LexError, Token, tokenize
from .lower import ParamError, Program, ScriptRun, TypecheckError, compile_script, lower
from .parser import ParseError, parse, parse_expr
from .printer import pretty_print

BUNDLED = ("wcc", "sssp", "pagerank", "cc_pull", "cc_opt", "dblp")


def compile_source(text: str, schema: Optional[Schema] = None) -> Program:
    """Parse, check and lower; raises ParseError/LexError or TypecheckError."""
    return compile_script(parse(text), schema)


def bundled_source(name: str) -> str:
    """Text of a script shipped with the package (``wcc``, ``cc_opt``, ...)."""
    if name not in BUNDLED:
        raise KeyError(f"no bundled script {name!r}; choose from {', '.join(BUNDLED)}")
    return resources.files(__package__).joinpath("scripts", f"{name}.flash").read_text()


__all__ = [
    "BUNDLED",
    "Diagnostic",
    "DslError",
    "LexError",
    "ParamError",
    "ParseError",
    "Program",
    "Schema",
    "Script",
    "ScriptRun",
    "Token",
    "TypecheckError",
    "bundled_source",
    "compile_script",
    "compile_source",
    "lower",
    "parse",
    "parse_expr",
    "pretty_print",
    "to_json",
    "tokenize",
    "typecheck",
]
