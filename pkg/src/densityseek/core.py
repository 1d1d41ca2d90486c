"""Bitstreams, density ratios, rank tables and distance sequences.

Spans are reported as 1-based closed intervals ``[start, end]``; arrays are
0-based internally. A search with no qualifying substring returns ``None``.
"""
from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

# |d_i| <= n * beta, so this keeps every distance and column inside int64.
OVERFLOW_LIMIT = 2**62


class Problem(str, enum.Enum):
    FIXED = "fixed"
    BOUNDED = "bounded"


class RatioError(ValueError):
    """Raised for malformed or out-of-range density ratios."""


class Bitstream:
    """Immutable sequence of bits with 1-based random access.

    ``stream[i]`` returns x_i for 1 <= i <= n. The underlying 0-based
    ``uint8`` array is exposed read-only as :attr:`bits` for kernels.
    """

    __slots__ = ("_bits",)

    def __init__(self, bits: Iterable[int] | np.ndarray = ()):
        arr = np.array(bits, dtype=np.uint8).reshape(-1)
        if arr.size and arr.max() > 1:
            raise ValueError("bits must be 0 or 1")
        arr.setflags(write=False)
        self._bits = arr

    @classmethod
    def from_string(cls, text: str) -> "Bitstream":
        text = "".join(text.split())
        if text.strip("01"):
            raise ValueError(f"not a bit string: {text!r}")
        return cls(np.frombuffer(text.encode("ascii"), dtype=np.uint8) - ord("0"))

    @property
    def bits(self) -> np.ndarray:
        return self._bits

    @property
    def n(self) -> int:
        return int(self._bits.size)

    def __len__(self) -> int:
        return self.n

    def __getitem__(self, i: int) -> int:
        if not 1 <= i <= self.n:
            raise IndexError(f"bit index {i} outside 1..{self.n}")
        return int(self._bits[i - 1])

    def __iter__(self):
        return (int(b) for b in self._bits)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Bitstream):
            return NotImplemented
        return np.array_equal(self._bits, other._bits)

    def __hash__(self) -> int:
        return hash(self._bits.tobytes())

    def __str__(self) -> str:
        return (self._bits + ord("0")).tobytes().decode("ascii")

    def __repr__(self) -> str:
        text = str(self)
        if len(text) > 40:
            text = text[:37] + "..."
        return f"Bitstream({text!r}, n={self.n})"


@dataclass(frozen=True, order=False)
class Ratio:
    """A reduced density alpha/beta with 0 <= alpha <= beta."""

    alpha: int
    beta: int

    def __post_init__(self):
        if self.beta <= 0:
            raise RatioError("denominator must be positive")
        if not 0 <= self.alpha <= self.beta:
            raise RatioError(f"density {self.alpha}/{self.beta} outside [0, 1]")
        if math.gcd(self.alpha, self.beta) != 1:
            raise RatioError(f"{self.alpha}/{self.beta} is not reduced")

    @classmethod
    def of(cls, alpha: int, beta: int) -> "Ratio":
        if beta == 0:
            raise RatioError("denominator must be positive")
        g = math.gcd(alpha, beta) or 1
        return cls(alpha // g, beta // g)

    @property
    def trivial(self) -> bool:
        """True for densities 0 and 1, which need no distance machinery."""
        return self.alpha == 0 or self.alpha == self.beta

    def __float__(self) -> float:
        return self.alpha / self.beta

    def __str__(self) -> str:
        return f"{self.alpha}/{self.beta}"


@dataclass(frozen=True)
class Span:
    """A non-empty 1-based closed interval [start, end]."""

    start: int
    end: int

    def __post_init__(self):
        if not 1 <= self.start <= self.end:
            raise ValueError(f"invalid span [{self.start}, {self.end}]")

    @property
    def length(self) -> int:
        return self.end - self.start + 1


SpanResult = Optional[Span]

_RATIO_RE = re.compile(r"^\s*(\d+)\s*(?:/\s*(\d+)\s*)?$")


def parse_ratio(text: str, n: int | None = None) -> Ratio:
    """Parse ``"A/B"`` (or a bare ``"0"``/``"1"``) into a reduced ratio.

    ``n`` is accepted for symmetry with the solvers but beta > n is allowed;
    fixed-density solvers simply find nothing in that case.
    """
    m = _RATIO_RE.match(text)
    if m is None:
        raise RatioError(f"malformed ratio: {text!r}")
    num = int(m.group(1))
    if m.group(2) is None:
        if num not in (0, 1):
            raise RatioError(f"bare integer ratio must be 0 or 1, got {text!r}")
        return Ratio(num, 1)
    den = int(m.group(2))
    if den == 0:
        raise RatioError("denominator must be positive")
    if num > den:
        raise RatioError(f"density {text} exceeds 1")
    return Ratio.of(num, den)


def rank_table(s: Bitstream) -> np.ndarray:
    """rank[k] = number of ones among x_1..x_k, for 0 <= k <= n."""
    rank = np.zeros(s.n + 1, dtype=np.int64)
    np.cumsum(s.bits, out=rank[1:])
    return rank


def ones_in_range(rank: np.ndarray, a: int, b: int) -> int:
    n = rank.size - 1
    if not 1 <= a <= b <= n:
        raise IndexError(f"range [{a}, {b}] outside 1..{n}")
    return int(rank[b] - rank[a - 1])


def check_overflow(n: int, r: Ratio) -> None:
    if n * r.beta > OVERFLOW_LIMIT:
        raise OverflowError(f"n*beta = {n * r.beta} exceeds 2^62")


def distance_sequence(s: Bitstream, r: Ratio) -> np.ndarray:
    """d[i] = beta*rank[i] - alpha*i, built from +(beta-alpha) / -alpha steps."""
    if not 0 < r.alpha < r.beta:
        raise RatioError("distance sequence needs 0 < alpha < beta")
    check_overflow(s.n, r)
    steps = np.where(s.bits == 1, r.beta - r.alpha, -r.alpha).astype(np.int64)
    d = np.zeros(s.n + 1, dtype=np.int64)
    np.cumsum(steps, out=d[1:])
    return d


def verify_span(s: Bitstream, r: Ratio, span: Span, mode: Problem | str) -> bool:
    """Check a span's density against theta by exact integer arithmetic."""
    mode = Problem(mode)
    if span.end > s.n:
        raise IndexError(f"span {span} outside 1..{s.n}")
    ones = int(s.bits[span.start - 1 : span.end].sum())
    lhs, rhs = r.beta * ones, r.alpha * span.length
    return lhs == rhs if mode is Problem.FIXED else lhs >= rhs


def longest_run(s: Bitstream, bit: int) -> SpanResult:
    """Leftmost longest run of ``bit``, or None if the bit never occurs."""
    hit = np.zeros(s.n + 2, dtype=np.int8)
    hit[1:-1] = s.bits == bit
    edges = np.diff(hit)
    starts = np.flatnonzero(edges == 1)
    if starts.size == 0:
        return None
    ends = np.flatnonzero(edges == -1)
    k = int(np.argmax(ends - starts))
    return Span(int(starts[k]) + 1, int(ends[k]))


def trivial_extremes(s: Bitstream, r: Ratio, mode: Problem | str) -> SpanResult:
    """Solve theta = 0 or theta = 1 directly."""
    mode = Problem(mode)
    if not r.trivial:
        raise RatioError(f"{r} is not 0 or 1")
    if r.alpha == r.beta:
        return longest_run(s, 1)
    if mode is Problem.BOUNDED:
        return Span(1, s.n) if s.n else None
    return longest_run(s, 0)
