"""SkipMisMatch, DistMap and DistSort.

All three are compiled with numba so that timings are comparable with the
linear-time solvers. The ordered map behind DistMap is an array-backed AVL
tree (worst-case logarithmic; hashing would lose the worst-case bound), and
DistSort uses a bottom-up merge sort that counts its comparisons.
"""
from __future__ import annotations

from dataclasses import dataclass

import numba
import numpy as np

from .core import (
    Bitstream,
    Problem,
    Ratio,
    RatioError,
    Span,
    SpanResult,
    check_overflow,
    rank_table,
)


@dataclass
class SolverCounters:
    """Operation counts filled in by a solver run.

    What each field counts depends on the solver: for SkipMisMatch
    ``comparisons`` is the number of windows examined and
    ``positions_scanned`` the total distance the window skipped; for DistMap
    ``map_operations`` is lookups plus insertions and ``comparisons`` the key
    comparisons inside the tree; for DistSort ``comparisons`` covers the sort
    and ``positions_scanned`` the clump scan.
    """

    comparisons: int = 0
    map_operations: int = 0
    positions_scanned: int = 0
    allocated_bytes: int = 0

    def add(self, comparisons=0, map_operations=0, positions_scanned=0, allocated_bytes=0):
        self.comparisons += int(comparisons)
        self.map_operations += int(map_operations)
        self.positions_scanned += int(positions_scanned)
        self.allocated_bytes += int(allocated_bytes)


def _require_nontrivial(r: Ratio) -> None:
    if not 0 < r.alpha < r.beta:
        raise RatioError(f"{r}: route theta in {{0, 1}} to trivial_extremes")


def _span(a, b) -> SpanResult:
    return Span(int(a), int(b)) if b > 0 else None


# --- SkipMisMatch ----------------------------------------------------------


@numba.njit(cache=True)
def _skip_mismatch(rank, alpha, beta):
    n = rank.size - 1
    windows = 0
    skipped = 0
    for k in range(n // beta, 0, -1):
        target = k * alpha
        a = 1
        b = k * beta
        while b <= n:
            windows += 1
            eps = abs(target - (rank[b] - rank[a - 1]))
            if eps == 0:
                return a, b, windows, skipped
            a += eps
            b += eps
            skipped += eps
    return 0, 0, windows, skipped


def skip_mismatch(s: Bitstream, r: Ratio, counters: SolverCounters | None = None) -> SpanResult:
    """Search lengths k*beta from longest to shortest, skipping by the error."""
    _require_nontrivial(r)
    if r.beta > s.n:
        return None
    rank = rank_table(s)
    a, b, windows, skipped = _skip_mismatch(rank, r.alpha, r.beta)
    if counters is not None:
        counters.add(comparisons=windows, positions_scanned=skipped, allocated_bytes=rank.nbytes)
    return _span(a, b)


# --- DistMap ---------------------------------------------------------------

_MAX_DEPTH = 128


@numba.njit(cache=True)
def _height(h, x):
    return h[x] if x else 0


@numba.njit(cache=True)
def _fix_height(left, right, h, x):
    hl = _height(h, left[x])
    hr = _height(h, right[x])
    h[x] = (hl if hl > hr else hr) + 1


@numba.njit(cache=True)
def _rotate_right(left, right, h, y):
    x = left[y]
    left[y] = right[x]
    right[x] = y
    _fix_height(left, right, h, y)
    _fix_height(left, right, h, x)
    return x


@numba.njit(cache=True)
def _rotate_left(left, right, h, x):
    y = right[x]
    right[x] = left[y]
    left[y] = x
    _fix_height(left, right, h, x)
    _fix_height(left, right, h, y)
    return y


@numba.njit(cache=True)
def _rebalance(left, right, h, x):
    _fix_height(left, right, h, x)
    bal = _height(h, left[x]) - _height(h, right[x])
    if bal > 1:
        c = left[x]
        if _height(h, left[c]) < _height(h, right[c]):
            left[x] = _rotate_left(left, right, h, c)
        return _rotate_right(left, right, h, x)
    if bal < -1:
        c = right[x]
        if _height(h, right[c]) < _height(h, left[c]):
            right[x] = _rotate_right(left, right, h, c)
        return _rotate_left(left, right, h, x)
    return x


@numba.njit(cache=True)
def _dist_map(bits, alpha, beta):
    n = bits.size
    # node 0 is the null node
    keys = np.empty(n + 2, np.int64)
    vals = np.empty(n + 2, np.int64)
    left = np.zeros(n + 2, np.int32)
    right = np.zeros(n + 2, np.int32)
    h = np.zeros(n + 2, np.int8)
    path = np.empty(_MAX_DEPTH, np.int32)
    keys[1] = 0
    vals[1] = 0
    h[1] = 1
    root = 1
    size = 1
    comparisons = 0
    lookups = 0
    inserts = 1
    best_a = 0
    best_b = 0
    best_len = 0
    up = beta - alpha
    delta = 0
    for i in range(1, n + 1):
        delta = delta + up if bits[i - 1] else delta - alpha
        lookups += 1
        cur = root
        depth = 0
        found = -1
        while cur:
            comparisons += 1
            k = keys[cur]
            if delta == k:
                found = vals[cur]
                break
            path[depth] = cur
            depth += 1
            cur = left[cur] if delta < k else right[cur]
        if found >= 0:
            if i - found > best_len:
                best_len = i - found
                best_a = found + 1
                best_b = i
            continue
        size += 1
        inserts += 1
        x = size
        keys[x] = delta
        vals[x] = i
        h[x] = 1
        child = x
        j = depth - 1
        while j >= 0:
            node = path[j]
            if delta < keys[node]:
                left[node] = child
            else:
                right[node] = child
            old_height = h[node]
            child = _rebalance(left, right, h, node)
            if child == node and h[node] == old_height:
                break
            j -= 1
        if j < 0:
            root = child
    node_bytes = 8 + 8 + 4 + 4 + 1
    return best_a, best_b, comparisons, lookups + inserts, size * node_bytes


def dist_map(s: Bitstream, r: Ratio, counters: SolverCounters | None = None) -> SpanResult:
    """One pass with an ordered map from distance to first position."""
    _require_nontrivial(r)
    if r.beta > s.n:
        return None
    check_overflow(s.n, r)
    a, b, comps, ops, nbytes = _dist_map(s.bits, r.alpha, r.beta)
    if counters is not None:
        counters.add(comparisons=comps, map_operations=ops, allocated_bytes=nbytes)
    return _span(a, b)


# --- DistSort --------------------------------------------------------------


@numba.njit(cache=True)
def _merge_sort(keys, vals):
    """Stable bottom-up merge sort of (keys, vals) by key; returns comparisons."""
    n = keys.size
    src_k, src_v = keys, vals
    dst_k = np.empty_like(keys)
    dst_v = np.empty_like(vals)
    comparisons = 0
    swapped = False
    width = 1
    while width < n:
        lo = 0
        while lo < n:
            mid = min(lo + width, n)
            hi = min(lo + 2 * width, n)
            i, j, o = lo, mid, lo
            while i < mid and j < hi:
                comparisons += 1
                if src_k[j] < src_k[i]:
                    dst_k[o] = src_k[j]
                    dst_v[o] = src_v[j]
                    j += 1
                else:
                    dst_k[o] = src_k[i]
                    dst_v[o] = src_v[i]
                    i += 1
                o += 1
            while i < mid:
                dst_k[o] = src_k[i]
                dst_v[o] = src_v[i]
                i += 1
                o += 1
            while j < hi:
                dst_k[o] = src_k[j]
                dst_v[o] = src_v[j]
                j += 1
                o += 1
            lo = hi
        src_k, dst_k = dst_k, src_k
        src_v, dst_v = dst_v, src_v
        swapped = not swapped
        width *= 2
    if swapped:
        keys[:] = src_k
        vals[:] = src_v
    return comparisons


@numba.njit(cache=True)
def _distance_pairs(bits, alpha, beta):
    n = bits.size
    dist = np.empty(n + 1, np.int64)
    pos = np.empty(n + 1, np.int64)
    dist[0] = 0
    pos[0] = 0
    up = beta - alpha
    delta = 0
    for i in range(1, n + 1):
        delta = delta + up if bits[i - 1] else delta - alpha
        dist[i] = delta
        pos[i] = i
    comparisons = _merge_sort(dist, pos)
    return dist, pos, comparisons


@numba.njit(cache=True)
def _clump_scan(dist, pos, bounded):
    n = dist.size - 1
    best_a = 0
    best_b = 0
    best_len = 0
    pmin = pos[0]
    pmax = pos[0]
    i = 0
    while i <= n:
        if not bounded or pos[i] < pmin:
            pmin = pos[i]
        pmax = pos[i]
        i += 1
        while i <= n and dist[i] == dist[i - 1]:
            if pos[i] < pmin:
                pmin = pos[i]
            if pos[i] > pmax:
                pmax = pos[i]
            i += 1
        if pmax - pmin > best_len:
            best_len = pmax - pmin
            best_a = pmin + 1
            best_b = pmax
    return best_a, best_b


def sorted_distance_pairs(s: Bitstream, r: Ratio) -> tuple[np.ndarray, np.ndarray]:
    """All pairs (d_i, i) sorted by distance, as parallel arrays (D, P)."""
    _require_nontrivial(r)
    check_overflow(s.n, r)
    dist, pos, _ = _distance_pairs(s.bits, r.alpha, r.beta)
    return dist, pos


def dist_sort(
    s: Bitstream,
    r: Ratio,
    mode: Problem | str = Problem.FIXED,
    counters: SolverCounters | None = None,
) -> SpanResult:
    """Sort (distance, position) pairs, then scan clumps of equal distance.

    In bounded mode the smallest position is carried across clumps, so each
    clump pairs with the earliest position of any distance not above it.
    """
    _require_nontrivial(r)
    bounded = Problem(mode) is Problem.BOUNDED
    if not bounded and r.beta > s.n:
        return None
    check_overflow(s.n, r)
    dist, pos, comps = _distance_pairs(s.bits, r.alpha, r.beta)
    a, b = _clump_scan(dist, pos, bounded)
    if counters is not None:
        counters.add(
            comparisons=comps,
            positions_scanned=dist.size,
            allocated_bytes=2 * (dist.nbytes + pos.nbytes),
        )
    return _span(a, b)
