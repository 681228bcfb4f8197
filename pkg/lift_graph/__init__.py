"""
随机提升图与基图工具
"""

from .base_graph import (
    DirectedH1,
    directed_h1,
    extra_edges,
    load_instance,
    parse_instance,
    random_instance,
    residual_graph,
    union_subgraph,
    validate,
)
from .lift import LiftState
from .rotation import RotationPath

__all__ = [
    "DirectedH1",
    "LiftState",
    "RotationPath",
    "directed_h1",
    "extra_edges",
    "load_instance",
    "parse_instance",
    "random_instance",
    "residual_graph",
    "union_subgraph",
    "validate",
]
