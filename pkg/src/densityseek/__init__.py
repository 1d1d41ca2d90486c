"""Longest substrings of a bitstream with density exactly or at least alpha/beta."""
from .core import (
    Bitstream,
    Problem,
    Ratio,
    RatioError,
    Span,
    SpanResult,
    distance_sequence,
    ones_in_range,
    parse_ratio,
    rank_table,
    trivial_extremes,
    verify_span,
)
from .loglinear import SolverCounters, dist_map, dist_sort, skip_mismatch, sorted_distance_pairs
from .matrix import (
    LatticeCoord,
    MappingMatrix,
    MatrixStats,
    StructureError,
    dist_matrix,
    dist_matrix_checked,
    lattice_coords,
    lattice_step,
    lattice_value,
    matrix_stats,
)
from .oracle import brute_bounded, brute_fixed
from .solvers import ALGORITHMS, Outcome, solve
from .sweep import maximal_positions, minimal_positions, position_sweep

__version__ = "0.1.0"
