"""Linear-time fixed-density search through a compressed mapping matrix.

Every integer z has unique lattice coordinates (r, c) with
``(beta - alpha) * c - alpha * r == z`` and ``0 <= r < beta - alpha``. A one
bit moves the walk one column right; a zero bit moves one row down, wrapping
from the bottom row to row 0 with a shift of ``alpha`` columns to the left.
The matrix remembers the first position at which each cell was visited, so
revisiting a cell exposes a substring of density exactly alpha/beta.

Only cells where the walk enters or leaves a row, the origin, the cursor and
two sentinels per row are stored. Each stored record also carries the value
that starts the run of consecutive positions to its right; cells between two
records are reconstructed from that. Rows are doubly linked lists; a record
that was stepped down from carries a vertical link to the destination and a
secondary link to the next such record in its row.

The pool is a set of parallel numpy arrays addressed by integer handles and
all mutation happens in numba kernels. ``MappingMatrix`` drives the kernels
step by step (for tests and inspection); :func:`dist_matrix` runs the whole
stream in one compiled call.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numba
import numpy as np
from numba import types
from numba.typed import Dict

from .core import Bitstream, Ratio, RatioError, Span, SpanResult, check_overflow

NONE = -1  # null handle
EMPTY = -1  # empty cell / no run to the right
NEG_INF = np.iinfo(np.int64).min
POS_INF = np.iinfo(np.int64).max

# slots of the state array
CURSOR, CROW, FREE, TOP, RIGHT, DOWN, WALK, ALLOC, LIVE, PEAK = range(10)
_STATE_SIZE = 10

# col, cell, run: int64; prev, next, vert, sec: int32; pinned: uint8
RECORD_BYTES = 3 * 8 + 4 * 4 + 1

HEALTH_ERRORS = {
    1: "row list broken (bad back link, cycle or missing sentinel)",
    2: "row records not strictly ordered by column",
    3: "secondary chain broken or out of order",
    4: "secondary chain does not match the vertical-link carriers",
    5: "vertical link points at the wrong cell",
    6: "cursor not at the current distance",
    7: "unpinned record that is not the cursor",
    8: "stored value disagrees with the first-visit shadow map",
    9: "run extends to the +inf sentinel",
    10: "reconstructed cells do not match the visited cells",
    11: "step reported a first visit inconsistent with the shadow map",
    12: "sentinel carries a value",
}


class StructureError(AssertionError):
    """The mapping matrix failed a structural health check."""


# --- lattice coordinates ---------------------------------------------------


class LatticeCoord(NamedTuple):
    row: int
    col: int


def _check_nontrivial(r: Ratio) -> None:
    if not 0 < r.alpha < r.beta:
        raise RatioError("the lattice needs 0 < alpha < beta")


def lattice_coords(z: int, r: Ratio) -> LatticeCoord:
    """Solve (beta-alpha)*c - alpha*r = z with 0 <= r < beta-alpha."""
    _check_nontrivial(r)
    rows = r.beta - r.alpha
    row = (-z * pow(r.alpha, -1, rows)) % rows if rows > 1 else 0
    col, rem = divmod(z + r.alpha * row, rows)
    assert rem == 0
    return LatticeCoord(row, col)


def lattice_value(coord: LatticeCoord, r: Ratio) -> int:
    _check_nontrivial(r)
    rows = r.beta - r.alpha
    if not 0 <= coord.row < rows:
        raise ValueError(f"row {coord.row} outside 0..{rows - 1}")
    return rows * coord.col - r.alpha * coord.row


def lattice_step(coord: LatticeCoord, bit: int, r: Ratio) -> LatticeCoord:
    _check_nontrivial(r)
    row, col = coord
    if bit:
        return LatticeCoord(row, col + 1)
    if row < r.beta - r.alpha - 1:
        return LatticeCoord(row + 1, col)
    return LatticeCoord(0, col - r.alpha)


# --- kernels ---------------------------------------------------------------


@numba.njit(cache=True)
def _init(m, rows):
    col, cell, run, prv, nxt, vert, sec, pin, st = m
    for r in range(rows):
        a = 2 * r
        b = a + 1
        below = 2 * ((r + 1) % rows)
        col[a] = NEG_INF
        col[b] = POS_INF
        cell[a] = EMPTY
        cell[b] = EMPTY
        run[a] = EMPTY
        run[b] = EMPTY
        prv[a] = NONE
        nxt[a] = b
        prv[b] = a
        nxt[b] = NONE
        vert[a] = below
        vert[b] = below + 1
        sec[a] = b
        sec[b] = NONE
        pin[a] = 1
        pin[b] = 1
    origin = 2 * rows
    col[origin] = 0
    cell[origin] = 0
    run[origin] = EMPTY
    vert[origin] = NONE
    sec[origin] = NONE
    pin[origin] = 1
    prv[origin] = 0
    nxt[origin] = 1
    nxt[0] = origin
    prv[1] = origin
    st[:] = 0
    st[CURSOR] = origin
    st[CROW] = 0
    st[FREE] = NONE
    st[TOP] = origin + 1
    st[ALLOC] = origin + 1
    st[LIVE] = origin + 1
    st[PEAK] = origin + 1


@numba.njit(cache=True)
def _health(col, cell, run, prv, nxt, vert, sec, pin, st, rows, alpha, shadow, z):
    """Full structural check; returns 0 or a HEALTH_ERRORS code."""
    top = st[TOP]
    rowof = np.full(top, -1, np.int64)
    limit = top + 1
    for r in range(rows):
        h = 2 * r
        if col[h] != NEG_INF or prv[h] != NONE:
            return 1
        steps = 0
        while True:
            rowof[h] = r
            q = nxt[h]
            if q == NONE:
                break
            if prv[q] != h:
                return 1
            if col[q] <= col[h]:
                return 2
            h = q
            steps += 1
            if steps > limit:
                return 1
        if h != 2 * r + 1:
            return 1
    for r in range(rows):
        carriers = 0
        h = 2 * r
        while h != NONE:
            if vert[h] != NONE:
                carriers += 1
                t = vert[h]
                below = (r + 1) % rows
                if t < 0 or t >= top or rowof[t] != below:
                    return 5
                if col[h] == NEG_INF or col[h] == POS_INF:
                    if col[t] != col[h]:
                        return 5
                elif col[t] != (col[h] if r < rows - 1 else col[h] - alpha):
                    return 5
            h = nxt[h]
        chain = 0
        h = 2 * r
        while True:
            if h < 0 or h >= top or rowof[h] != r or vert[h] == NONE:
                return 3
            chain += 1
            q = sec[h]
            if q == NONE:
                break
            if col[q] <= col[h]:
                return 3
            h = q
            if chain > limit:
                return 3
        if h != 2 * r + 1:
            return 3
        if chain != carriers:
            return 4
    cur = st[CURSOR]
    if rowof[cur] != st[CROW] or rows * col[cur] - alpha * st[CROW] != z:
        return 6
    visited = 0
    for r in range(rows):
        a = 2 * r
        b = a + 1
        if cell[a] != EMPTY or run[a] != EMPTY or cell[b] != EMPTY or run[b] != EMPTY:
            return 12
        h = nxt[a]
        while h != b:
            if not pin[h] and h != cur:
                return 7
            zv = rows * col[h] - alpha * r
            if zv not in shadow or shadow[zv] != cell[h]:
                return 8
            visited += 1
            if run[h] != EMPTY:
                q = nxt[h]
                if q == b:
                    return 9
                gap = col[q] - col[h] - 1
                for k in range(1, gap + 1):
                    zk = zv + rows * k
                    if zk not in shadow or shadow[zk] != run[h] + k:
                        return 8
                visited += gap
            h = nxt[h]
    if visited != len(shadow):
        return 10
    return 0


@numba.njit(cache=True)
def _capacity(bits, rows):
    # every zero pins at most its destination plus the floating cursor it left
    zeros = 0
    prev = 0
    tens = 0
    for x in bits:
        if x == 0:
            zeros += 1
            if prev == 1:
                tens += 1
        prev = x
    return zeros + tens + 2 * rows + 4


@numba.njit(cache=True)
def _new_pool(cap):
    return (
        np.empty(cap, np.int64),
        np.empty(cap, np.int64),
        np.empty(cap, np.int64),
        np.empty(cap, np.int32),
        np.empty(cap, np.int32),
        np.empty(cap, np.int32),
        np.empty(cap, np.int32),
        np.empty(cap, np.uint8),
        np.zeros(_STATE_SIZE, np.int64),
    )


@numba.njit(cache=True)
def _walk(col, cell, run, prv, nxt, vert, sec, pin, st, rows, alpha, bits, first, shadow):
    """Apply ``bits`` as steps at positions first, first+1, ...

    Returns (best_a, best_b, last_value, error, error_position). Unless
    ``shadow`` is None it maps every visited distance to its first position
    and the health check runs after each step; passing None compiles the
    checks away. All step logic lives
    in this one loop: calling out per step costs more than the step itself.
    """
    x = st[CURSOR]
    r = st[CROW]
    free = st[FREE]
    top = st[TOP]
    live = st[LIVE]
    peak = st[PEAK]
    alloc = st[ALLOC]
    right = st[RIGHT]
    down = st[DOWN]
    walked = st[WALK]
    z = rows * col[x] - alpha * r
    best_a = 0
    best_b = 0
    best_len = 0
    v = EMPTY
    for k in range(bits.size):
        i = first + k
        c = col[x]
        if bits[k]:
            right += 1
            z += rows
            nx = nxt[x]
            if col[nx] == c + 1:
                # landed on a stored record; a floating cursor merges into it
                if not pin[x]:
                    p = prv[x]
                    nxt[p] = nx
                    prv[nx] = p
                    nxt[x] = free
                    free = x
                    live -= 1
                x = nx
                v = cell[nx]
            elif run[x] != EMPTY:
                # inside an older run
                v = run[x] + 1
                if pin[x]:
                    if free != NONE:
                        f = free
                        free = nxt[f]
                    else:
                        f = top
                        top += 1
                    alloc += 1
                    live += 1
                    if live > peak:
                        peak = live
                    col[f] = c + 1
                    cell[f] = v
                    run[f] = v
                    pin[f] = 0
                    vert[f] = NONE
                    sec[f] = NONE
                    prv[f] = x
                    nxt[f] = nx
                    nxt[x] = f
                    prv[nx] = f
                    x = f
                else:
                    col[x] = c + 1
                    cell[x] = v
                    run[x] = v
            else:
                # fresh cell: start a run from x or extend the one x ends
                v = EMPTY
                if pin[x]:
                    run[x] = i - 1
                    if free != NONE:
                        f = free
                        free = nxt[f]
                    else:
                        f = top
                        top += 1
                    alloc += 1
                    live += 1
                    if live > peak:
                        peak = live
                    col[f] = c + 1
                    cell[f] = i
                    run[f] = EMPTY
                    pin[f] = 0
                    vert[f] = NONE
                    sec[f] = NONE
                    prv[f] = x
                    nxt[f] = nx
                    nxt[x] = f
                    prv[nx] = f
                    x = f
                else:
                    col[x] = c + 1
                    cell[x] = i
        else:
            down += 1
            z -= alpha
            if r < rows - 1:
                r += 1
                c2 = c
            else:
                r = 0
                c2 = c - alpha
            pin[x] = 1
            if vert[x] != NONE:
                x = vert[x]
                walked += 1
                v = cell[x]
            else:
                # back to the nearest carrier L-, over to L+ by its secondary
                # link, down, then back along the destination row
                w = 1
                lm = prv[x]
                while vert[lm] == NONE:
                    lm = prv[lm]
                    w += 1
                lp = sec[lm]
                p = prv[vert[lp]]
                w += 3
                while col[p] > c2:
                    p = prv[p]
                    w += 1
                if col[p] == c2:
                    d = p
                    v = cell[d]
                else:
                    if free != NONE:
                        d = free
                        free = nxt[d]
                    else:
                        d = top
                        top += 1
                    alloc += 1
                    live += 1
                    if live > peak:
                        peak = live
                    col[d] = c2
                    pin[d] = 1
                    vert[d] = NONE
                    sec[d] = NONE
                    if run[p] != EMPTY:
                        v = run[p] + (c2 - col[p])
                        cell[d] = v
                        run[d] = v
                    else:
                        v = EMPTY
                        cell[d] = i
                        run[d] = EMPTY
                    q = nxt[p]
                    prv[d] = p
                    nxt[d] = q
                    nxt[p] = d
                    prv[q] = d
                vert[x] = d
                sec[x] = lp
                sec[lm] = x
                walked += w
                x = d
        if shadow is not None:
            st[CURSOR] = x
            st[CROW] = r
            st[FREE] = free
            st[TOP] = top
            st[LIVE] = live
            if z in shadow:
                if v != shadow[z]:
                    return best_a, best_b, v, 11, i
            else:
                if v != EMPTY:
                    return best_a, best_b, v, 11, i
                shadow[z] = i
            err = _health(col, cell, run, prv, nxt, vert, sec, pin, st, rows, alpha, shadow, z)
            if err:
                return best_a, best_b, v, err, i
        if v != EMPTY and i - v > best_len:
            best_len = i - v
            best_a = v + 1
            best_b = i
    st[CURSOR] = x
    st[CROW] = r
    st[FREE] = free
    st[TOP] = top
    st[LIVE] = live
    st[PEAK] = peak
    st[ALLOC] = alloc
    st[RIGHT] = right
    st[DOWN] = down
    st[WALK] = walked
    return best_a, best_b, v, 0, 0


def _empty_shadow():
    return Dict.empty(key_type=types.int64, value_type=types.int64)


def _run(bits: np.ndarray, alpha: int, beta: int, check: bool):
    rows = beta - alpha
    m = _new_pool(_capacity(bits, rows))
    _init(m, rows)
    shadow = None
    if check:
        shadow = _empty_shadow()
        shadow[0] = 0
    a, b, _, err, where = _walk(*m, rows, alpha, bits, 1, shadow)
    return a, b, m[8], err, where


# --- Python-facing structure -----------------------------------------------


@dataclass
class MatrixStats:
    right_steps: int = 0
    down_steps: int = 0
    walk_links_followed: int = 0
    cells_allocated: int = 0
    peak_records: int = 0

    @classmethod
    def from_state(cls, st: np.ndarray) -> "MatrixStats":
        return cls(
            right_steps=int(st[RIGHT]),
            down_steps=int(st[DOWN]),
            walk_links_followed=int(st[WALK]),
            cells_allocated=int(st[ALLOC]),
            peak_records=int(st[PEAK]),
        )

    @property
    def allocated_bytes(self) -> int:
        return self.peak_records * RECORD_BYTES


@dataclass(frozen=True)
class CellRecord:
    """Read-only view of one stored record."""

    row: int
    column: float | int  # +-math.inf for sentinels
    cell_value: Optional[int]
    run_start_value: Optional[int]
    vertical: Optional[LatticeCoord]
    pinned: bool

    @property
    def sentinel(self) -> bool:
        return math.isinf(self.column)


_ONE = np.ones(1, np.uint8)
_ZERO = np.zeros(1, np.uint8)


def _opt(v) -> Optional[int]:
    return None if v == EMPTY else int(v)


class MappingMatrix:
    """Step-by-step driver for the compressed mapping matrix.

    ``step_right``/``step_down`` return the first-visit value of the cell
    entered, or None if the cell is new (in which case ``position`` is
    stored). With ``debug=True`` a shadow map of every visited cell is kept
    and the full health check runs after each step.
    """

    def __init__(self, ratio: Ratio, capacity: int = 64, debug: bool = False):
        _check_nontrivial(ratio)
        self.ratio = ratio
        self.rows = ratio.beta - ratio.alpha
        self.alpha = ratio.alpha
        self._m = _new_pool(max(capacity, 2 * self.rows + 4))
        _init(self._m, self.rows)
        self.z = 0
        self.debug = debug
        self._shadow = None
        if debug:
            self._shadow = _empty_shadow()
            self._shadow[0] = 0

    @property
    def _state(self) -> np.ndarray:
        return self._m[8]

    def _reserve(self) -> None:
        st = self._state
        cap = self._m[0].size
        if st[FREE] != NONE or st[TOP] + 2 <= cap:
            return
        grown = []
        for arr in self._m[:8]:
            bigger = np.empty(2 * cap, arr.dtype)
            bigger[:cap] = arr
            grown.append(bigger)
        self._m = (*grown, st)

    def _advance(self, bit: np.ndarray, position: int, dz: int) -> Optional[int]:
        self._reserve()
        _, _, v, err, _ = _walk(*self._m, self.rows, self.alpha, bit, position, self._shadow)
        self.z += dz
        if err:
            raise StructureError(HEALTH_ERRORS[err])
        return _opt(v)

    def step_right(self, position: int) -> Optional[int]:
        return self._advance(_ONE, position, self.rows)

    def step_down(self, position: int) -> Optional[int]:
        return self._advance(_ZERO, position, -self.alpha)

    def step(self, bit: int, position: int) -> Optional[int]:
        return self.step_right(position) if bit else self.step_down(position)

    def check_health(self) -> None:
        if self._shadow is None:
            raise RuntimeError("health checks need debug=True")
        err = _health(*self._m, self.rows, self.alpha, self._shadow, self.z)
        if err:
            raise StructureError(HEALTH_ERRORS[err])

    @property
    def cursor(self) -> LatticeCoord:
        st = self._state
        return LatticeCoord(int(st[CROW]), int(self._m[0][st[CURSOR]]))

    def stats(self) -> MatrixStats:
        return MatrixStats.from_state(self._state)

    def row_records(self, row: int, sentinels: bool = False) -> list[CellRecord]:
        col, cell, run, prv, nxt, vert, sec, pin, st = self._m
        below = (row + 1) % self.rows
        out = []
        h = 2 * row
        while h != NONE:
            c = int(col[h])
            is_sentinel = c in (NEG_INF, POS_INF)
            if sentinels or not is_sentinel:
                column = (-math.inf if c == NEG_INF else math.inf) if is_sentinel else c
                target = None
                if vert[h] != NONE and not is_sentinel:
                    target = LatticeCoord(below, int(col[vert[h]]))
                out.append(
                    CellRecord(row, column, _opt(cell[h]), _opt(run[h]), target, bool(pin[h]))
                )
            h = nxt[h]
        return out

    def dump(self, rows=None) -> str:
        """One line per stored record: ``row column cell_value run_start_value``."""
        lines = []
        for r in range(self.rows) if rows is None else rows:
            for rec in self.row_records(r):
                cv = "-" if rec.cell_value is None else str(rec.cell_value)
                rv = "-" if rec.run_start_value is None else str(rec.run_start_value)
                lines.append(f"{rec.row} {rec.column} {cv} {rv}")
        return "\n".join(lines) + ("\n" if lines else "")


def matrix_stats(m: MappingMatrix) -> MatrixStats:
    return m.stats()


def _solve(s: Bitstream, r: Ratio) -> tuple[SpanResult, MatrixStats] | None:
    _check_nontrivial(r)
    if r.beta > s.n:
        return None
    check_overflow(s.n, r)
    a, b, st, _, _ = _run(s.bits, r.alpha, r.beta, False)
    return (Span(int(a), int(b)) if b else None), MatrixStats.from_state(st)


def dist_matrix(s: Bitstream, r: Ratio, stats: MatrixStats | None = None) -> SpanResult:
    """Longest substring of density exactly alpha/beta in linear time.

    Pass a :class:`MatrixStats` to receive the run's step and walk counts.
    """
    out = _solve(s, r)
    if out is None:
        return None
    span, run_stats = out
    if stats is not None:
        vars(stats).update(vars(run_stats))
    return span


def dist_matrix_checked(s: Bitstream, r: Ratio) -> tuple[SpanResult, MatrixStats]:
    """Run :func:`dist_matrix` with the full health check after every step.

    Raises :class:`StructureError` naming the failed check and the position.
    """
    _check_nontrivial(r)
    if r.beta > s.n:
        return None, MatrixStats()
    check_overflow(s.n, r)
    a, b, st, err, where = _run(s.bits, r.alpha, r.beta, True)
    if err:
        raise StructureError(f"{HEALTH_ERRORS[err]} after bit {where}")
    return (Span(int(a), int(b)) if b else None), MatrixStats.from_state(st)
