"""Exact-arithmetic Hopf-algebra machinery on decorated planar rooted trees."""

from .linalg import LinComb, Multiset, aslc, bilinear, pair, tensor2
from .trees import (EdgeType, InvalidTree, ModeMismatch, MultiIndex,
                    NonplanarTree, ParseError, PlanarTree, RegularityConfig,
                    TreeError, canonicalize, regularity, vertex_count)

__all__ = [
    "EdgeType", "InvalidTree", "LinComb", "ModeMismatch", "MultiIndex",
    "Multiset", "NonplanarTree", "ParseError", "PlanarTree",
    "RegularityConfig", "TreeError", "aslc", "bilinear", "canonicalize",
    "pair", "regularity", "tensor2", "vertex_count",
]
