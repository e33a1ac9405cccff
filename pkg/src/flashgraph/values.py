"""Value types, defaults and sentinels shared by the graph store and the engine."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

INT_MAX = int(np.iinfo(np.int64).max)
INT_MIN = int(np.iinfo(np.int64).min)
# Max representable id; doubles as "unset parent" and the min-identity for ids.
NULL_VERTEX = INT_MAX


@dataclass(frozen=True)
class ValueType:
    name: str
    args: tuple["ValueType", ...] = ()

    def __str__(self) -> str:
        if self.name == "pair":
            return f"Pair<{self.args[0]}, {self.args[1]}>"
        return self.name

    @property
    def is_numeric(self) -> bool:
        return self.name in ("int", "float", "ID")

    @property
    def is_ordered(self) -> bool:
        return self.name in ("int", "float", "ID", "bool", "string")

    @cached_property
    def dtype(self):
        return _DTYPES.get(self.name, object)


INT = ValueType("int")
FLOAT = ValueType("float")
BOOL = ValueType("bool")
ID = ValueType("ID")
STRING = ValueType("string")
LIST_ID = ValueType("list")


def pair_of(a: ValueType, b: ValueType) -> ValueType:
    return ValueType("pair", (a, b))


_DTYPES = {"int": np.int64, "float": np.float64, "bool": np.bool_, "ID": np.int64}

_BY_NAME = {"int": INT, "float": FLOAT, "bool": BOOL, "ID": ID, "string": STRING, "list": LIST_ID}


def parse_type(text: str) -> ValueType:
    """Parse a type name such as ``int``, ``ID`` or ``Pair<string, int>``."""
    text = text.strip()
    if text.startswith("Pair<") and text.endswith(">"):
        inner = text[5:-1]
        depth = 0
        for i, ch in enumerate(inner):
            if ch == "<":
                depth += 1
            elif ch == ">":
                depth -= 1
            elif ch == "," and depth == 0:
                return pair_of(parse_type(inner[:i]), parse_type(inner[i + 1:]))
        raise ValueError(f"malformed pair type {text!r}")
    try:
        return _BY_NAME[text]
    except KeyError:
        raise ValueError(f"unknown value type {text!r}") from None


def default_value(vt: ValueType):
    if vt.name in ("int", "float"):
        return 0 if vt.name == "int" else 0.0
    if vt.name == "bool":
        return False
    if vt.name == "ID":
        return NULL_VERTEX
    if vt.name == "string":
        return ""
    if vt.name == "list":
        return ()
    return (default_value(vt.args[0]), default_value(vt.args[1]))


def new_column(vt: ValueType, size: int) -> np.ndarray:
    """Allocate a column of ``size`` slots filled with the type's default."""
    if vt.dtype is object:
        col = np.empty(size, dtype=object)
        fill = default_value(vt)
        for i in range(size):
            col[i] = fill
        return col
    return np.full(size, default_value(vt), dtype=vt.dtype)


def check_scalar(vt: ValueType, value) -> object:
    """Validate one value against ``vt``; returns the normalised value or raises TypeError."""
    name = vt.name
    if name == "bool":
        if isinstance(value, (bool, np.bool_)):
            return bool(value)
    elif name in ("int", "ID"):
        if isinstance(value, (int, np.integer)) and not isinstance(value, (bool, np.bool_)):
            if name == "ID" and value < 0:
                raise TypeError(f"vertex id must be non-negative, got {value}")
            return int(value)
    elif name == "float":
        if isinstance(value, (int, float, np.integer, np.floating)) and not isinstance(value, (bool, np.bool_)):
            return float(value)
    elif name == "string":
        if isinstance(value, str):
            return value
    elif name == "list":
        if isinstance(value, (list, tuple)):
            return tuple(sorted(check_scalar(ID, x) for x in value))
    elif name == "pair":
        if isinstance(value, tuple) and len(value) == 2:
            return (check_scalar(vt.args[0], value[0]), check_scalar(vt.args[1], value[1]))
    raise TypeError(f"value {value!r} does not match type {vt}")


def format_value(value) -> str:
    """Render a value for TSV output; floats use repr so output round-trips."""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, tuple):
        return "(" + ",".join(format_value(x) for x in value) + ")"
    return str(value)
