"""Command-line front end: ``densityseek find | gen | bench``.

Exit codes: 0 on success (including "none"), 2 on usage errors, 3 on I/O or
input errors.
"""
from __future__ import annotations

import argparse
import json
import logging
import struct
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .bench import BenchConfig, random_bitstream, run_bench
from .core import Bitstream, Problem, RatioError, parse_ratio
from .solvers import ALGORITHMS, IncompatibleAlgorithm, solve

log = logging.getLogger("densityseek")

FORMATS = ("ascii", "packed", "fasta")
POLICIES = ("zero", "one", "error")
EXIT_OK, EXIT_USAGE, EXIT_IO = 0, 2, 3

_HEADER = struct.Struct("<Q")
_FASTA_WIDTH = 60

# byte classes for FASTA sequence lines
_ZERO, _ONE, _AMBIGUOUS, _SKIP = 0, 1, 2, 3
_FASTA_CLASS = np.full(256, _AMBIGUOUS, np.uint8)
for ch in b"GCgc":
    _FASTA_CLASS[ch] = _ONE
for ch in b"ATat":
    _FASTA_CLASS[ch] = _ZERO
for ch in b" \t\r\n\v\f":
    _FASTA_CLASS[ch] = _SKIP


class InputError(Exception):
    """Unreadable or malformed input (exit code 3)."""


@dataclass
class FindRequest:
    problem: Problem
    theta: str
    input: Path
    format: str = "ascii"
    algorithm: str = "auto"
    ambiguous: str = "zero"
    json: bool = False


# --- ingestion -------------------------------------------------------------


def _parse_ascii(data: bytes) -> np.ndarray:
    raw = np.frombuffer(data, np.uint8)
    raw = raw[_FASTA_CLASS[raw] != _SKIP]
    bad = (raw != ord("0")) & (raw != ord("1"))
    if bad.any():
        k = int(np.flatnonzero(bad)[0])
        raise InputError(f"invalid byte {bytes(raw[k:k + 1])!r} in ascii input")
    return raw - ord("0")


def _parse_packed(data: bytes) -> np.ndarray:
    if len(data) < _HEADER.size:
        raise InputError("packed input shorter than its 8-byte header")
    (n,) = _HEADER.unpack_from(data)
    payload = np.frombuffer(data, np.uint8, offset=_HEADER.size)
    if payload.size * 8 < n:
        raise InputError(f"packed header says {n} bits but only {payload.size * 8} present")
    return np.unpackbits(payload, count=n)


def _parse_fasta(data: bytes, policy: str) -> np.ndarray:
    lines = data.split(b"\n")
    seq = []
    seen_header = False
    for k, line in enumerate(lines):
        if line.startswith(b">"):
            if seen_header:
                rest = sum(1 for x in lines[k:] if x.startswith(b">"))
                log.warning("fasta: using the first record only, ignoring %d more", rest)
                break
            seen_header = True
            continue
        if line.startswith(b";"):
            continue
        seq.append(line)
    raw = np.frombuffer(b"".join(seq), np.uint8)
    cls = _FASTA_CLASS[raw]
    cls = cls[cls != _SKIP]
    ambiguous = cls == _AMBIGUOUS
    if ambiguous.any():
        count = int(ambiguous.sum())
        if policy == "error":
            k = int(np.flatnonzero(ambiguous)[0])
            raise InputError(f"fasta: ambiguous base at position {k + 1}")
        log.warning("fasta: %d ambiguous bases mapped to %s", count, 1 if policy == "one" else 0)
        cls = np.where(ambiguous, 1 if policy == "one" else 0, cls).astype(np.uint8)
    return cls


def ingest(path: str | Path, fmt: str = "ascii", policy: str = "zero") -> Bitstream:
    """Read a bitstream from ``path`` in one of the three formats."""
    if fmt not in FORMATS:
        raise ValueError(f"unknown format {fmt!r}")
    if policy not in POLICIES:
        raise ValueError(f"unknown ambiguous-base policy {policy!r}")
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from exc
    if fmt == "ascii":
        bits = _parse_ascii(data)
    elif fmt == "packed":
        bits = _parse_packed(data)
    else:
        bits = _parse_fasta(data, policy)
    if bits.size == 0:
        raise InputError(f"{path}: empty input")
    return Bitstream(bits)


def encode(s: Bitstream, fmt: str) -> bytes:
    """Serialize ``s``; ``ingest`` reads it back bit for bit."""
    if fmt == "ascii":
        return str(s).encode("ascii") + (b"\n" if s.n else b"")
    if fmt == "packed":
        return _HEADER.pack(s.n) + np.packbits(s.bits).tobytes()
    if fmt == "fasta":
        seq = np.where(s.bits == 1, ord("G"), ord("A")).astype(np.uint8).tobytes()
        body = b"\n".join(seq[k : k + _FASTA_WIDTH] for k in range(0, len(seq), _FASTA_WIDTH))
        return b">densityseek n=%d\n" % s.n + body + (b"\n" if body else b"")
    raise ValueError(f"unknown format {fmt!r}")


# --- commands --------------------------------------------------------------


def run_find(req: FindRequest) -> str:
    """Solve one request and return the output line (without newline)."""
    s = ingest(req.input, req.format, req.ambiguous)
    r = parse_ratio(req.theta, s.n)
    out = solve(s, r, req.problem, req.algorithm)
    if req.json:
        span = out.span
        return json.dumps({
            "start": span.start if span else None,
            "end": span.end if span else None,
            "length": out.length,
            "theta": str(r),
            "algorithm": out.algorithm,
            "n": s.n,
        })
    if out.span is None:
        return "none"
    return f"{out.span.start} {out.span.end} {out.length} {r}"


def run_gen(seed: int, n: int, rho_text: str, out_path: str | Path, fmt: str) -> None:
    s = random_bitstream(seed, n, parse_ratio(rho_text))
    try:
        Path(out_path).write_bytes(encode(s, fmt))
    except OSError as exc:
        raise InputError(f"cannot write {out_path}: {exc.strerror or exc}") from exc


def _csv_list(text: str) -> list[str]:
    return [x.strip() for x in text.split(",") if x.strip()]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="densityseek", description="Longest substring of a given density.")
    sub = p.add_subparsers(dest="command", required=True)

    f = sub.add_parser("find", help="find the longest substring of density exactly / at least theta")
    f.add_argument("--problem", choices=[x.value for x in Problem], required=True)
    f.add_argument("--theta", required=True, help="density as A/B, or 0 / 1")
    f.add_argument("--input", required=True, type=Path)
    f.add_argument("--format", choices=FORMATS, default="ascii")
    f.add_argument("--algorithm", choices=ALGORITHMS + ("auto",), default="auto")
    f.add_argument("--json", action="store_true")
    f.add_argument("--ambiguous", choices=POLICIES, default="zero",
                   help="mapping for FASTA bases other than ACGT")

    g = sub.add_parser("gen", help="write a deterministic pseudo-random bitstream")
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--length", type=int, required=True)
    g.add_argument("--density", default="1/2")
    g.add_argument("--out", type=Path, required=True)
    g.add_argument("--format", choices=FORMATS, default="ascii")

    b = sub.add_parser("bench", help="time algorithms on generated streams, CSV out")
    b.add_argument("--lengths", required=True, help="comma-separated stream lengths")
    b.add_argument("--thetas", required=True, help="comma-separated densities")
    b.add_argument("--algorithms", default="dist-map,dist-sort,dist-matrix")
    b.add_argument("--repeats", type=int, default=1)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--density", default="1/2", help="probability of a one bit")
    b.add_argument("--problem", choices=[x.value for x in Problem], default="fixed")
    b.add_argument("--csv", type=Path, help="output path (default stdout)")
    return p


def _bench(args, parser) -> int:
    try:
        lengths = [int(x) for x in _csv_list(args.lengths)]
    except ValueError:
        parser.error(f"bad --lengths {args.lengths!r}")
    if any(n < 0 for n in lengths) or args.repeats < 1:
        parser.error("lengths must be non-negative and repeats at least 1")
    algorithms = _csv_list(args.algorithms)
    for alg in algorithms:
        if alg not in ALGORITHMS + ("auto",):
            parser.error(f"unknown algorithm {alg!r}")
    cfg = BenchConfig(
        lengths=lengths,
        thetas=[parse_ratio(x) for x in _csv_list(args.thetas)],
        algorithms=algorithms,
        repeats=args.repeats,
        seed=args.seed,
        rho=parse_ratio(args.density),
        problem=Problem(args.problem),
    )
    text = run_bench(cfg).to_csv()
    if args.csv is None:
        sys.stdout.write(text)
    else:
        try:
            args.csv.write_text(text)
        except OSError as exc:
            raise InputError(f"cannot write {args.csv}: {exc.strerror or exc}") from exc
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(format="densityseek: %(levelname)s: %(message)s", level=logging.WARNING)
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "find":
            req = FindRequest(Problem(args.problem), args.theta, args.input, args.format,
                              args.algorithm, args.ambiguous, args.json)
            print(run_find(req))
        elif args.command == "gen":
            if args.length < 0:
                parser.error("--length must be non-negative")
            run_gen(args.seed, args.length, args.density, args.out, args.format)
        else:
            return _bench(args, parser)
    except InputError as exc:
        log.error("%s", exc)
        return EXIT_IO
    except (RatioError, IncompatibleAlgorithm, OverflowError) as exc:
        log.error("%s", exc)
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
