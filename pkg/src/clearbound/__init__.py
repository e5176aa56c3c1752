"""Admissible heuristics for the reciprocal obstacle-clearance path cost."""

__version__ = "0.1.0"

from .cost_oracle import PolylinePath, QuadratureConfig, reciprocal_cost, state_at
from .errors import ClearboundError, ConvergenceError, InputError, UnsupportedRenderError
from .geometry import AxisAlignedBox, HalfSpace, Hypersphere, World, clearance, is_valid
from .heuristics import (
    ArcLengthInfo,
    BoundKind,
    ClearanceSample,
    CostBound,
    bound_endpoint_chain,
    bound_multi_sample,
    bound_one_endpoint,
    bound_single_sample,
    bound_two_endpoint,
    clearance_cone,
)
from .planner import GeometricGraph, GraphParams, SearchMode, SearchResult, build_graph, search
