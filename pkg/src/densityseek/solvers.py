"""Algorithm registry and dispatch shared by the CLI and the bench harness."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .core import Bitstream, Problem, Ratio, SpanResult, trivial_extremes
from .loglinear import SolverCounters, dist_map, dist_sort, skip_mismatch
from .matrix import MatrixStats, dist_matrix
from .oracle import brute_bounded, brute_fixed
from .sweep import position_sweep

FIXED_ONLY = ("skip-mismatch", "dist-map", "dist-matrix")
BOUNDED_ONLY = ("position-sweep",)
ALGORITHMS = ("brute", "skip-mismatch", "dist-map", "dist-sort", "dist-matrix", "position-sweep")
AUTO = {Problem.FIXED: "dist-matrix", Problem.BOUNDED: "position-sweep"}


class IncompatibleAlgorithm(ValueError):
    """The algorithm does not solve the requested problem."""


@dataclass
class Outcome:
    span: SpanResult
    algorithm: str
    ops: int = 0
    alloc_bytes: int = 0

    @property
    def length(self) -> int:
        return self.span.length if self.span else 0


def supports(algorithm: str, problem: Problem | str) -> bool:
    problem = Problem(problem)
    if algorithm == "auto":
        return True
    if algorithm not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {algorithm!r}")
    if problem is Problem.FIXED:
        return algorithm not in BOUNDED_ONLY
    return algorithm not in FIXED_ONLY


def _counted(fn: Callable, ops_field: str) -> Callable:
    def run(s, r):
        c = SolverCounters()
        span = fn(s, r, c)
        return span, getattr(c, ops_field), c.allocated_bytes

    return run


def _matrix(s, r):
    st = MatrixStats()
    span = dist_matrix(s, r, st)
    return span, st.walk_links_followed, st.allocated_bytes


_RUNNERS = {
    (Problem.FIXED, "brute"): _counted(brute_fixed, "comparisons"),
    (Problem.BOUNDED, "brute"): _counted(brute_bounded, "comparisons"),
    (Problem.FIXED, "skip-mismatch"): _counted(skip_mismatch, "comparisons"),
    (Problem.FIXED, "dist-map"): _counted(dist_map, "map_operations"),
    (Problem.FIXED, "dist-sort"): _counted(
        lambda s, r, c: dist_sort(s, r, Problem.FIXED, c), "comparisons"
    ),
    (Problem.BOUNDED, "dist-sort"): _counted(
        lambda s, r, c: dist_sort(s, r, Problem.BOUNDED, c), "comparisons"
    ),
    (Problem.FIXED, "dist-matrix"): _matrix,
    (Problem.BOUNDED, "position-sweep"): _counted(position_sweep, "comparisons"),
}


def solve(s: Bitstream, r: Ratio, problem: Problem | str, algorithm: str = "auto") -> Outcome:
    """Run one algorithm; theta in {0, 1} always goes to the trivial solver.

    ``ops`` is the algorithm's headline counter: spans checked (brute),
    windows (skip-mismatch), map operations (dist-map), sort comparisons
    (dist-sort), walk links followed (dist-matrix) or pointer moves plus
    candidates (position-sweep).
    """
    problem = Problem(problem)
    if not supports(algorithm, problem):
        raise IncompatibleAlgorithm(f"{algorithm} does not solve the {problem.value} problem")
    name = AUTO[problem] if algorithm == "auto" else algorithm
    if r.trivial:
        return Outcome(trivial_extremes(s, r, problem), "trivial")
    span, ops, nbytes = _RUNNERS[problem, name](s, r)
    return Outcome(span, name, int(ops), int(nbytes))
