"""Quadratic brute-force reference solvers.

Every span is checked through the rank table, longest lengths first, so the
first hit is a longest span and, among those, the one with smallest start.
"""
from __future__ import annotations

import numba

from .core import Bitstream, Ratio, Span, SpanResult, rank_table
from .loglinear import SolverCounters


@numba.njit(cache=True)
def _brute(rank, alpha, beta, bounded):
    n = rank.size - 1
    step = 1 if bounded else beta
    length = n - n % step
    checked = 0
    while length > 0:
        for a in range(1, n - length + 2):
            b = a + length - 1
            checked += 1
            lhs = beta * (rank[b] - rank[a - 1])
            rhs = alpha * length
            if lhs == rhs or (bounded and lhs > rhs):
                return a, b, checked
        length -= step
    return 0, 0, checked


def _solve(s: Bitstream, r: Ratio, bounded: bool, counters) -> SpanResult:
    if s.n == 0:
        return None
    rank = rank_table(s)
    a, b, checked = _brute(rank, r.alpha, r.beta, bounded)
    if counters is not None:
        counters.add(comparisons=checked, allocated_bytes=rank.nbytes)
    return Span(int(a), int(b)) if a else None


def brute_fixed(s: Bitstream, r: Ratio, counters: SolverCounters | None = None) -> SpanResult:
    return _solve(s, r, False, counters)


def brute_bounded(s: Bitstream, r: Ratio, counters: SolverCounters | None = None) -> SpanResult:
    return _solve(s, r, True, counters)
