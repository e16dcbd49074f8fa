"""Plain-CSV matrix files.

A matrix file holds one row per line, comma separated, no header. A system
file holds three such blocks (``A``, ``B``, ``C``) separated by blank lines.
"""

import numpy as np

from .errors import ParseError, ShapeError
from .mor import LtiSystem

__all__ = ["parse_matrix", "load_matrix", "load_system", "format_matrix", "save_matrix"]


def _parse_block(lines, first_line):
    rows = []
    width = None
    for offset, text in enumerate(lines):
        lineno = first_line + offset
        fields = [f.strip() for f in text.split(",")]
        try:
            row = [float(f) for f in fields]
        except ValueError:
            raise ParseError(f"cannot parse {text.strip()!r} as numbers", lineno) from None
        if not all(np.isfinite(row)):
            raise ParseError("non-finite entry", lineno)
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise ShapeError(f"line {lineno}: expected {width} columns, found {len(row)}")
        rows.append(row)
    return np.array(rows, dtype=float)


def _blocks(text):
    """Split text into (first_line, lines) groups separated by blank lines."""
    blocks, current, start = [], [], None
    for i, line in enumerate(text.splitlines(), start=1):
        if line.strip():
            if not current:
                start = i
            current.append(line)
        elif current:
            blocks.append((start, current))
            current = []
    if current:
        blocks.append((start, current))
    return blocks


def parse_matrix(text):
    blocks = _blocks(text)
    if not blocks:
        raise ParseError("no matrix rows found", 1)
    if len(blocks) > 1:
        raise ParseError("blank line inside a matrix", blocks[1][0] - 1)
    start, lines = blocks[0]
    return _parse_block(lines, start)


def load_matrix(path):
    with open(path) as fh:
        return parse_matrix(fh.read())


def load_system(path):
    """Read an ``(A, B, C)`` triple written as three blank-line separated blocks."""
    with open(path) as fh:
        blocks = _blocks(fh.read())
    if len(blocks) != 3:
        line = blocks[3][0] if len(blocks) > 3 else None
        raise ParseError(f"expected 3 matrix blocks (A, B, C), found {len(blocks)}", line)
    A, B, C = (_parse_block(lines, start) for start, lines in blocks)
    return LtiSystem(A, B, C)


def format_matrix(M):
    M = np.atleast_2d(np.asarray(M, dtype=float))
    return "".join(",".join(repr(float(v)) for v in row) + "\n" for row in M)


def save_matrix(path, M):
    with open(path, "w") as fh:
        fh.write(format_matrix(M))
