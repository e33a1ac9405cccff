"""Vertex-centric programs written against the embedded operator API."""

from .cc import CcResult, cc_opt, cc_pull, forest_init, pointer_jumping, star_detection, star_hooking, wcc
from .gas import GasResult, GasSpec, gas_machine, gas_run, pagerank_spec, sssp_spec
from .paths import PagerankResult, SsspResult, pagerank, sssp
from .turing import TuringResult, TuringSpec, turing_machine, turing_simulate, unary_increment

__all__ = [
    "CcResult",
    "GasResult",
    "GasSpec",
    "PagerankResult",
    "SsspResult",
    "TuringResult",
    "TuringSpec",
    "cc_opt",
    "cc_pull",
    "forest_init",
    "gas_machine",
    "gas_run",
    "pagerank",
    "pagerank_spec",
    "pointer_jumping",
    "sssp",
    "sssp_spec",
    "star_detection",
    "star_hooking",
    "turing_machine",
    "turing_simulate",
    "unary_increment",
    "wcc",
]
