"""flashgraph: a runtime property graph engine and script language for vertex-centric analytics."""

from .engine import (
    Aggregator,
    Engine,
    EngineError,
    Filter,
    Frontier,
    Group,
    Local,
    Order,
    Output,
    Pull,
    Push,
    Route,
    VertexSet,
    aggregate_combine,
    route,
)
from .expr import EvalError, Max, Min, Set, Sum, List, _, fabs, fmax, fmin, param, size_of, var
from .graph import (
    EDGE,
    VERTEX,
    GraphError,
    GraphParseError,
    PropertyError,
    PropertySchema,
    RuntimePropertyGraph,
    SchemaError,
    from_edges,
    load_edge_list,
)
from .values import BOOL, FLOAT, ID, INT, INT_MAX, LIST_ID, NULL_VERTEX, STRING, ValueType, pair_of

__version__ = "0.1.0"
