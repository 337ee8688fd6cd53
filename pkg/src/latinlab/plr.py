"""Plain-text serialization of (partial) rectangles.

Layout: a header line "k n", then k rows of n whitespace-separated
tokens.  A token is a decimal symbol or "." for an empty cell.  Lines
starting with "#" are comments and blank lines are ignored.  Formatted
output always ends with a newline, and parse is a strict inverse of
format.
"""

from __future__ import annotations

import re
from typing import Iterator

from .core import LatinRectangle, PartialLatinRectangle
from .errors import PlrParseError

_TOKEN = re.compile(r"\S+")


def _significant_lines(text: str) -> Iterator[tuple[int, str]]:
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        yield lineno, line


def _parse_block(lines: list[tuple[int, str]]) -> PartialLatinRectangle:
    lineno, header = lines[0]
    toks = list(_TOKEN.finditer(header))
    if len(toks) != 2:
        raise PlrParseError("header must be exactly 'k n'", lineno, toks[0].start() + 1 if toks else 1)
    try:
        k, n = int(toks[0].group()), int(toks[1].group())
    except ValueError:
        raise PlrParseError("header values must be integers", lineno, toks[0].start() + 1) from None
    if k < 1 or n < 1:
        raise PlrParseError("header values must be positive", lineno, toks[0].start() + 1)
    if len(lines) - 1 < k:
        raise PlrParseError(f"expected {k} rows, found {len(lines) - 1}", lineno)
    if len(lines) - 1 > k:
        extra_lineno, _ = lines[k + 1]
        raise PlrParseError(f"unexpected content after {k} rows", extra_lineno)
    grid = []
    for r in range(k):
        row_lineno, row_line = lines[r + 1]
        toks = list(_TOKEN.finditer(row_line))
        if len(toks) != n:
            col = toks[n].start() + 1 if len(toks) > n else len(row_line) + 1
            raise PlrParseError(f"row {r + 1} has {len(toks)} cells, expected {n}", row_lineno, col)
        row = []
        for m in toks:
            tok = m.group()
            if tok == ".":
                row.append(0)
            elif tok.isdigit():
                row.append(int(tok))
            else:
                raise PlrParseError(f"bad cell token {tok!r}", row_lineno, m.start() + 1)
        grid.append(row)
    return PartialLatinRectangle.from_grid(grid)


def parse_plr(text: str) -> PartialLatinRectangle:
    """Parse a single block.  Grid-content violations raise core errors."""
    lines = list(_significant_lines(text))
    if not lines:
        raise PlrParseError("no content", 1)
    return _parse_block(lines)


def parse_plr_blocks(text: str) -> list[PartialLatinRectangle]:
    """Parse a stream of blocks separated by blank lines."""
    out = []
    block: list[tuple[int, str]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if stripped.startswith("#"):
            continue
        if not stripped:
            if block:
                out.append(_parse_block(block))
                block = []
            continue
        block.append((lineno, raw))
    if block:
        out.append(_parse_block(block))
    return out


def format_plr(obj: LatinRectangle | PartialLatinRectangle) -> str:
    """Render one block, trailing newline included."""
    if isinstance(obj, LatinRectangle):
        obj = obj.as_partial()
    lines = [f"{obj.k} {obj.n}"]
    for row in obj.cells:
        lines.append(" ".join(str(s) if s else "." for s in row))
    return "\n".join(lines) + "\n"
