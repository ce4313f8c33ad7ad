"""Readers and writers for OR-Library ``bqp`` files and Palubeckis-style triplet files.

Both formats list each off-diagonal coefficient once, 1-indexed, and pose a
maximization. On load every coefficient is negated so the solver minimizes,
and the problem is flagged ``negated=True``.

OR-Library (several problems per file)::

    <problem count>
    <n> <nnz>
    <i> <j> <v>      (nnz lines)
    ...              (next problem)

Palubeckis (one problem per file)::

    <n> [<density> [<seed>]]
    <i> <j> <v>      (to end of file)
"""

from __future__ import annotations

import hashlib
import io
import os
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..problem import QuboProblem


class ParseError(ValueError):
    def __init__(self, message: str, line: int | None = None, source: str | None = None):
        self.line = line
        self.source = source
        where = ""
        if source:
            where += f"{source}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}" if where else message)


@dataclass
class InstanceFile:
    format: str
    problems: list[QuboProblem]
    path: str | None = None
    checksum: str | None = None
    meta: dict = field(default_factory=dict)


def _lines(text):
    """Yield (line number, tokens) for non-blank, non-comment lines."""
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.split("#", 1)[0].strip()
        if stripped:
            yield lineno, stripped.split()


def _ints(tokens, lineno, source, expect):
    if len(tokens) != expect:
        raise ParseError(f"expected {expect} integers, got {len(tokens)} tokens", lineno, source)
    try:
        return [int(t) for t in tokens]
    except ValueError:
        raise ParseError(f"non-integer token in {' '.join(tokens)!r}", lineno, source) from None


def _read(stream) -> str:
    if isinstance(stream, (str, bytes)):
        return stream.decode() if isinstance(stream, bytes) else stream
    return stream.read()


def _fill(Q, i, j, v, n, lineno, source):
    if not (1 <= i <= n and 1 <= j <= n):
        raise ParseError(f"index ({i}, {j}) outside [1, {n}]", lineno, source)
    Q[i - 1, j - 1] = -v
    Q[j - 1, i - 1] = -v


def parse_orlib(stream, name: str = "bqp", source: str | None = None) -> InstanceFile:
    """Parse an OR-Library ``bqp`` file. Problems are named ``<name>.<k>``, k from 1."""
    lines = _lines(_read(stream))
    try:
        lineno, tokens = next(lines)
    except StopIteration:
        raise ParseError("empty file", None, source) from None
    (count,) = _ints(tokens, lineno, source, 1)
    if count < 0:
        raise ParseError("negative problem count", lineno, source)
    problems = []
    last = lineno
    for k in range(1, count + 1):
        try:
            lineno, tokens = next(lines)
        except StopIteration:
            raise ParseError(f"truncated: header of problem {k} missing", last + 1, source) from None
        n, nnz = _ints(tokens, lineno, source, 2)
        if n < 1 or nnz < 0:
            raise ParseError(f"bad header n={n} nnz={nnz}", lineno, source)
        Q = np.zeros((n, n), dtype=np.int64)
        for _ in range(nnz):
            try:
                lineno, tokens = next(lines)
            except StopIteration:
                raise ParseError(f"truncated: problem {k} declares {nnz} entries", lineno + 1, source) from None
            if len(tokens) == 2:
                raise ParseError(f"problem {k} has fewer than {nnz} entries", lineno, source)
            i, j, v = _ints(tokens, lineno, source, 3)
            _fill(Q, i, j, v, n, lineno, source)
        last = lineno
        problems.append(QuboProblem(Q, name=f"{name}.{k}", negated=True))
    for lineno, tokens in lines:
        raise ParseError("unexpected data after last problem (entry count mismatch?)", lineno, source)
    return InstanceFile(format="orlib", problems=problems, path=source)


def parse_palubeckis(stream, name: str = "palubeckis", source: str | None = None) -> InstanceFile:
    """Parse a single-problem triplet file with an ``n [density [seed]]`` header."""
    lines = _lines(_read(stream))
    try:
        lineno, header = next(lines)
    except StopIteration:
        raise ParseError("empty file", None, source) from None
    if not 1 <= len(header) <= 3:
        raise ParseError("header must be 'n [density [seed]]'", lineno, source)
    try:
        n = int(header[0])
        density = float(header[1]) if len(header) > 1 else None
        seed = int(header[2]) if len(header) > 2 else None
    except ValueError:
        raise ParseError(f"malformed header {' '.join(header)!r}", lineno, source) from None
    if n < 1:
        raise ParseError(f"bad variable count {n}", lineno, source)
    Q = np.zeros((n, n), dtype=np.int64)
    count = 0
    for lineno, tokens in lines:
        i, j, v = _ints(tokens, lineno, source, 3)
        _fill(Q, i, j, v, n, lineno, source)
        count += 1
    if count == 0:
        warnings.warn(f"{source or name}: no entries, zero matrix", stacklevel=2)
    meta = {"header": header, "density": density, "seed": seed}
    problem = QuboProblem(Q, name=name, negated=True, meta=meta)
    return InstanceFile(format="palubeckis", problems=[problem], path=source, meta=meta)


def _triplets(problem: QuboProblem):
    sign = -1 if problem.negated else 1
    rows, cols = np.nonzero(np.triu(problem.Q))
    for i, j in zip(rows.tolist(), cols.tolist()):
        yield i + 1, j + 1, sign * int(problem.Q[i, j])


def write_palubeckis(problem: QuboProblem) -> str:
    """Canonical text: original header tokens if known, then upper-triangle triplets row-major."""
    header = problem.meta.get("header") or [str(problem.n)]
    out = io.StringIO()
    out.write(" ".join(header) + "\n")
    for i, j, v in _triplets(problem):
        out.write(f"{i} {j} {v}\n")
    return out.getvalue()


def write_orlib(problems: list[QuboProblem]) -> str:
    out = io.StringIO()
    out.write(f"{len(problems)}\n")
    for problem in problems:
        entries = list(_triplets(problem))
        out.write(f"{problem.n} {len(entries)}\n")
        for i, j, v in entries:
            out.write(f"{i} {j} {v}\n")
    return out.getvalue()


def detect_format(text: str) -> str:
    head = []
    for _, tokens in _lines(text):
        head.append(len(tokens))
        if len(head) == 2:
            break
    if head[:1] == [1] and (len(head) == 1 or head[1] == 2):
        return "orlib"
    return "palubeckis"


def load_instances(path, fmt: str = "auto") -> InstanceFile:
    """Read an instance file from disk, recording its path and sha256."""
    path = Path(path)
    text = path.read_text()
    fmt = detect_format(text) if fmt == "auto" else fmt
    stem = path.stem if path.suffix in (".txt", ".dat", ".qubo") else path.name
    if fmt == "orlib":
        inst = parse_orlib(text, name=stem, source=os.fspath(path))
    elif fmt == "palubeckis":
        inst = parse_palubeckis(text, name=stem, source=os.fspath(path))
    else:
        raise ValueError(f"unknown instance format {fmt!r}")
    inst.checksum = hashlib.sha256(text.encode()).hexdigest()
    return inst
