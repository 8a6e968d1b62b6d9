"""Structural controllability of hypergraph-induced polynomial systems."""

from __future__ import annotations

from .errors import CapacityError, HypergraphError, ParseError, ValidationError
from .gen import TOPOLOGIES, GenConfig, generate
from .hypergraph import (
    DirectedHypergraph,
    Hyperedge,
    SparsityPattern,
    build_hypergraph,
    dumps_hypergraph,
    loads_hypergraph,
    pattern_from_hypergraph,
    projection_digraph,
    read_hypergraph,
    star_expand,
    write_hypergraph,
)
from .matching import (
    compare_dilation_tests,
    find_dilation_exact,
    has_dilation_matching,
    matching_lower_bound,
    maximum_matching,
    signal_expansion,
)
from .oracle import (
    apply_polynomial,
    apply_symmetric,
    controllability_rank,
    cross_validate,
    realize_random,
)
from .reach import IncrementalReach, inaccessible_set, target_accessible, walk_reach
from .select import (
    SelectionResult,
    is_structurally_controllable,
    select,
    select_greedy,
    select_mag,
    select_matching_only,
    select_optimal_bfs,
    verify_structural_controllability,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
