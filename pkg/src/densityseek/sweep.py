"""Linear-time bounded-density search over minimal and maximal positions.

A span [a+1, b] has density at least theta iff d[a] <= d[b]. The left end of
a longest such span can only be a minimal position (distance below every
earlier one) and the right end only a maximal position (no later distance at
or above it). Both lists are ordered by strictly decreasing distance, so one
forward pointer pairs each minimal position with its furthest partner.
"""
from __future__ import annotations

import numba
import numpy as np

from .core import Bitstream, Ratio, Span, SpanResult, distance_sequence
from .loglinear import SolverCounters, _require_nontrivial


def minimal_positions(d: np.ndarray) -> np.ndarray:
    """Indices k with d[k] < d[i] for every i < k (always starts with 0)."""
    d = np.asarray(d, dtype=np.int64)
    if d.size == 0:
        return np.empty(0, np.int64)
    prior_min = np.minimum.accumulate(d)
    keep = np.empty(d.size, bool)
    keep[0] = True
    keep[1:] = d[1:] < prior_min[:-1]
    return np.flatnonzero(keep)


def maximal_positions(d: np.ndarray) -> np.ndarray:
    """Indices k with d[k] > d[i] for every i > k, in increasing order."""
    d = np.asarray(d, dtype=np.int64)
    if d.size == 0:
        return np.empty(0, np.int64)
    later_max = np.maximum.accumulate(d[::-1])[::-1]
    keep = np.empty(d.size, bool)
    keep[-1] = True
    keep[:-1] = d[:-1] > later_max[1:]
    return np.flatnonzero(keep)


@numba.njit(cache=True)
def _match(da, db):
    # partner[i] = largest j with db[j] >= da[i], or -1; j only moves forward
    partner = np.empty(da.size, np.int64)
    j = -1
    moves = 0
    for i in range(da.size):
        while j + 1 < db.size and db[j + 1] >= da[i]:
            j += 1
            moves += 1
        partner[i] = j
    return partner, moves


def sweep_partners(d: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Minimal positions, maximal positions, and the partner index of each minimal one.

    ``partner[i]`` indexes into the maximal list (-1 when no maximal position
    reaches ``d[minimal[i]]``); the sequence is non-decreasing.
    """
    d = np.asarray(d, dtype=np.int64)
    amin = minimal_positions(d)
    bmax = maximal_positions(d)
    partner, _ = _match(d[amin], d[bmax])
    return amin, bmax, partner


def position_sweep(s: Bitstream, r: Ratio, counters: SolverCounters | None = None) -> SpanResult:
    """Longest substring of density at least alpha/beta in linear time."""
    _require_nontrivial(r)
    if s.n == 0:
        return None
    d = distance_sequence(s, r)
    amin = minimal_positions(d)
    bmax = maximal_positions(d)
    partner, moves = _match(d[amin], d[bmax])
    if counters is not None:
        counters.add(
            comparisons=moves + amin.size,
            positions_scanned=2 * d.size,
            allocated_bytes=d.nbytes + amin.nbytes + bmax.nbytes + partner.nbytes,
        )
    ok = partner >= 0
    if not ok.any():
        return None
    lengths = np.where(ok, bmax[np.maximum(partner, 0)] - amin, 0)
    # argmax keeps the first maximum, i.e. strict improvement in sweep order
    k = int(np.argmax(lengths))
    if lengths[k] <= 0:
        return None
    return Span(int(amin[k]) + 1, int(bmax[partner[k]]))
