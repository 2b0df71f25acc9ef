"""Matrix file formats.

Two bit-exact text formats, UTF-8 with LF line endings:

dense::

    dense <m> <n>
    <m lines of n space-separated decimal literals>

sparse::

    sparse <m> <n> <nnz>
    <nnz lines of "<i> <j> <value>" with 0-based indices>

Values are written in their shortest round-trip representation, so
load(save(a)) reproduces `a` bitwise. Sparse files densify with zeros on
load. Parse failures name the offending line.
"""

from __future__ import annotations

import io
import math

import numpy as np

from .linalg import as_matrix

FORMATS = ("dense", "sparse")


class MatrixFormatError(ValueError):
    """Malformed matrix file; the message names the offending line."""


def format_matrix(a, fmt: str = "dense") -> str:
    a = as_matrix(a)
    if fmt not in FORMATS:
        raise ValueError(f"format must be one of {FORMATS}, got {fmt!r}")
    m, n = a.shape
    out = io.StringIO()
    if fmt == "dense":
        out.write(f"dense {m} {n}\n")
        for i in range(m):
            out.write(" ".join(repr(float(x)) for x in a[i]))
            out.write("\n")
    else:
        rows, cols = np.nonzero(a)
        out.write(f"sparse {m} {n} {rows.size}\n")
        for i, j in zip(rows, cols):
            out.write(f"{i} {j} {float(a[i, j])!r}\n")
    return out.getvalue()


def save_matrix(a, path, fmt: str = "dense") -> None:
    text = format_matrix(a, fmt)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _parse_float(token: str, lineno: int) -> float:
    try:
        value = float(token)
    except ValueError:
        raise MatrixFormatError(f"line {lineno}: invalid value {token!r}") from None
    if not math.isfinite(value):
        raise MatrixFormatError(f"line {lineno}: non-finite value {token!r}")
    return value


def _parse_count(token: str, lineno: int, what: str) -> int:
    try:
        value = int(token)
    except ValueError:
        raise MatrixFormatError(f"line {lineno}: invalid {what} {token!r}") from None
    return value


def parse_matrix(text: str) -> np.ndarray:
    lines = text.splitlines()
    if not lines or not lines[0].strip():
        raise MatrixFormatError("line 1: missing header")
    header = lines[0].split()
    kind = header[0]
    if kind == "dense":
        if len(header) != 3:
            raise MatrixFormatError("line 1: dense header must be 'dense <m> <n>'")
        m = _parse_count(header[1], 1, "row count")
        n = _parse_count(header[2], 1, "column count")
        if m < 1 or n < 1:
            raise MatrixFormatError(f"line 1: dimensions must be positive, got {m}x{n}")
        a = np.empty((m, n))
        row = 0
        for lineno, line in enumerate(lines[1:], start=2):
            if not line.strip():
                continue
            if row >= m:
                raise MatrixFormatError(f"line {lineno}: expected only {m} data rows")
            tokens = line.split()
            if len(tokens) != n:
                raise MatrixFormatError(
                    f"line {lineno}: expected {n} values, got {len(tokens)}"
                )
            a[row] = [_parse_float(t, lineno) for t in tokens]
            row += 1
        if row != m:
            raise MatrixFormatError(
                f"line {len(lines) + 1}: unexpected end of file, "
                f"got {row} of {m} data rows"
            )
        return a
    if kind == "sparse":
        if len(header) != 4:
            raise MatrixFormatError(
                "line 1: sparse header must be 'sparse <m> <n> <nnz>'"
            )
        m = _parse_count(header[1], 1, "row count")
        n = _parse_count(header[2], 1, "column count")
        nnz = _parse_count(header[3], 1, "entry count")
        if m < 1 or n < 1:
            raise MatrixFormatError(f"line 1: dimensions must be positive, got {m}x{n}")
        if nnz < 0:
            raise MatrixFormatError(f"line 1: entry count must be non-negative, got {nnz}")
        a = np.zeros((m, n))
        seen = 0
        for lineno, line in enumerate(lines[1:], start=2):
            if not line.strip():
                continue
            if seen >= nnz:
                raise MatrixFormatError(f"line {lineno}: expected only {nnz} entries")
            tokens = line.split()
            if len(tokens) != 3:
                raise MatrixFormatError(
                    f"line {lineno}: expected '<i> <j> <value>', got {len(tokens)} tokens"
                )
            i = _parse_count(tokens[0], lineno, "row index")
            j = _parse_count(tokens[1], lineno, "column index")
            if not (0 <= i < m and 0 <= j < n):
                raise MatrixFormatError(
                    f"line {lineno}: index ({i}, {j}) outside {m}x{n}"
                )
            a[i, j] = _parse_float(tokens[2], lineno)
            seen += 1
        if seen != nnz:
            raise MatrixFormatError(
                f"line {len(lines) + 1}: unexpected end of file, "
                f"got {seen} of {nnz} entries"
            )
        return a
    raise MatrixFormatError(f"line 1: unknown format {kind!r}")


def load_matrix(path) -> np.ndarray:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_matrix(fh.read())
