"""Deterministic random streams and the comparative timing harness.

Streams come from splitmix64: the state advances by a fixed odd constant and
each output is the state passed through the usual two-round xor-shift-multiply
finalizer. Bit i is 1 iff the i-th output mod beta is below alpha, so a given
(seed, n, rho) gives the same stream in any implementation.
"""
from __future__ import annotations

import csv
import io
import logging
import time
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .core import Bitstream, Problem, Ratio
from .solvers import AUTO, supports, solve

log = logging.getLogger(__name__)

GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MUL1 = np.uint64(0xBF58476D1CE4E5B9)
_MUL2 = np.uint64(0x94D049BB133111EB)
_MASK = (1 << 64) - 1
_CHUNK = 1 << 20

CSV_COLUMNS = ("algorithm", "n", "theta", "repeat", "seconds", "result_length", "ops", "alloc_bytes")


def _finalize(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * _MUL1
    z = (z ^ (z >> np.uint64(27))) * _MUL2
    return z ^ (z >> np.uint64(31))


def splitmix64(seed: int, count: int) -> np.ndarray:
    """The first ``count`` outputs of splitmix64 started from ``seed``."""
    return splitmix64_slice(seed, 0, count)


def splitmix64_slice(seed: int, lo: int, hi: int) -> np.ndarray:
    """Outputs lo..hi-1 (0-based); the k-th output finalizes seed + (k+1)*GOLDEN."""
    k = np.arange(lo + 1, hi + 1, dtype=np.uint64)
    return _finalize(np.uint64(seed & _MASK) + k * GOLDEN)


def random_bitstream(seed: int, n: int, rho: Ratio) -> Bitstream:
    """n bits, each 1 iff next_u64() mod beta < alpha."""
    if rho.alpha == 0:
        return Bitstream(np.zeros(n, np.uint8))
    if rho.alpha == rho.beta:
        return Bitstream(np.ones(n, np.uint8))
    bits = np.empty(n, np.uint8)
    beta = np.uint64(rho.beta)
    alpha = np.uint64(rho.alpha)
    for lo in range(0, n, _CHUNK):
        hi = min(lo + _CHUNK, n)
        bits[lo:hi] = splitmix64_slice(seed, lo, hi) % beta < alpha
    return Bitstream(bits)


def case_seed(base: int, length_index: int, theta_index: int, repeat: int) -> int:
    """Per-case seed: the first splitmix64 output from the base seed offset by the case indices."""
    offset = (length_index << 40) | (theta_index << 20) | repeat
    return int(splitmix64((base + offset) & _MASK, 1)[0])


@dataclass
class BenchConfig:
    lengths: Sequence[int]
    thetas: Sequence[Ratio]
    algorithms: Sequence[str]
    repeats: int = 1
    seed: int = 0
    rho: Ratio = field(default_factory=lambda: Ratio(1, 2))
    problem: Problem = Problem.FIXED

    def __post_init__(self):
        if self.repeats < 1:
            raise ValueError("repeats must be at least 1")
        self.problem = Problem(self.problem)


@dataclass
class BenchRecord:
    algorithm: str
    n: int
    theta: Ratio
    repeat: int
    seconds: float
    result_length: int
    ops: int
    alloc_bytes: int

    def row(self) -> list:
        return [self.algorithm, self.n, str(self.theta), self.repeat, f"{self.seconds:.6f}",
                self.result_length, self.ops, self.alloc_bytes]


@dataclass
class BenchReport:
    records: list[BenchRecord]
    skipped: list[str]
    disagreements: list[str]

    def mean_rows(self) -> list[list]:
        groups: dict[tuple, list[BenchRecord]] = {}
        for rec in self.records:
            groups.setdefault((rec.algorithm, rec.n, str(rec.theta)), []).append(rec)
        rows = []
        for (alg, n, theta), recs in groups.items():
            k = len(recs)
            rows.append([
                alg, n, theta, "mean",
                f"{sum(x.seconds for x in recs) / k:.6f}",
                f"{sum(x.result_length for x in recs) / k:.3f}",
                f"{sum(x.ops for x in recs) / k:.3f}",
                f"{sum(x.alloc_bytes for x in recs) / k:.3f}",
            ])
        return rows

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for rec in self.records:
            w.writerow(rec.row())
        w.writerows(self.mean_rows())
        return buf.getvalue()


def run_bench(cfg: BenchConfig) -> BenchReport:
    """Time every (algorithm, n, theta, repeat) case on its derived stream.

    Algorithms that do not solve ``cfg.problem`` are skipped with a warning;
    cases where the algorithms disagree on result length are flagged.
    """
    algorithms = []
    skipped = []
    for alg in cfg.algorithms:
        if supports(alg, cfg.problem):
            algorithms.append(AUTO[cfg.problem] if alg == "auto" else alg)
        else:
            log.warning("skipping %s: it does not solve the %s problem", alg, cfg.problem.value)
            skipped.append(alg)
    # load or compile every kernel before the clock starts
    warm = random_bitstream(cfg.seed, 64, Ratio(1, 2))
    for alg in algorithms:
        solve(warm, Ratio(1, 3), cfg.problem, alg)
    records = []
    disagreements = []
    for li, n in enumerate(cfg.lengths):
        for ti, theta in enumerate(cfg.thetas):
            for rep in range(cfg.repeats):
                s = random_bitstream(case_seed(cfg.seed, li, ti, rep), n, cfg.rho)
                lengths = set()
                for alg in algorithms:
                    t0 = time.perf_counter()
                    out = solve(s, theta, cfg.problem, alg)
                    seconds = time.perf_counter() - t0
                    records.append(BenchRecord(alg, n, theta, rep, seconds, out.length,
                                               out.ops, out.alloc_bytes))
                    lengths.add(out.length)
                if len(lengths) > 1:
                    msg = f"n={n} theta={theta} repeat={rep}: lengths {sorted(lengths)}"
                    log.warning("algorithms disagree, %s", msg)
                    disagreements.append(msg)
    return BenchReport(records, skipped, disagreements)
