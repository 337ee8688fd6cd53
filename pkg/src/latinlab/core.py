"""Grids, matching tuples, and the bijection between them.

A complete k x n Latin rectangle stores symbols 1..n; every row is a
permutation and no column repeats a symbol.  A partial grid additionally
allows empty cells, stored as 0.  All public indices (rows, columns,
symbols) are 1-based; only the internal tuple storage is 0-based.

The matching view represents row i as a perfect matching of symbols to
columns, encoded as a sorted tuple of (column, symbol) edges.  Distinct
rows never share an edge, which is exactly the column constraint.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import (
    ColumnRepeat,
    DimensionMismatch,
    DisjointnessViolated,
    EmptySelection,
    IncompleteTuple,
    IndexOutOfRange,
    OutOfRangeSymbol,
    RowNotPermutation,
    RowRepeat,
)

Grid = Sequence[Sequence[object]]


def _freeze_grid(grid: Grid, *, allow_empty: bool) -> tuple[tuple[int, ...], ...]:
    """Shape-check a nested sequence and return it as a tuple of int tuples.

    Empty cells may arrive as 0 or None and are stored as 0.  Raises
    DimensionMismatch for ragged or empty input and OutOfRangeSymbol for
    entries outside the symbol range.
    """
    rows = [list(r) for r in grid]
    if not rows or not rows[0]:
        raise DimensionMismatch("grid must have at least one row and one column")
    n = len(rows[0])
    if any(len(r) != n for r in rows):
        raise DimensionMismatch("all rows must have the same length")
    if len(rows) > n:
        raise DimensionMismatch(f"{len(rows)} rows but only {n} columns; need k <= n")
    lo = 0 if allow_empty else 1
    out = []
    for i, row in enumerate(rows):
        vals = []
        for j, v in enumerate(row):
            if v is None and allow_empty:
                v = 0
            if not isinstance(v, int) or not lo <= v <= n:
                raise OutOfRangeSymbol(i + 1, j + 1, v)
            vals.append(v)
        out.append(tuple(vals))
    return tuple(out)


def _check_columns(cells: tuple[tuple[int, ...], ...], n: int) -> None:
    for j in range(n):
        seen = 0
        for row in cells:
            s = row[j]
            if s and seen >> s & 1:
                raise ColumnRepeat(j + 1, s)
            seen |= 1 << s
    # bit 0 collects empties and is never reported


@dataclass(frozen=True)
class LatinRectangle:
    """A complete k x n Latin rectangle.  Validates eagerly on construction."""

    k: int
    n: int
    cells: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        cells = _freeze_grid(self.cells, allow_empty=False)
        object.__setattr__(self, "cells", cells)
        if self.k != len(cells) or self.n != len(cells[0]):
            raise DimensionMismatch("declared (k, n) disagrees with the grid")
        full = set(range(1, self.n + 1))
        for i, row in enumerate(cells):
            if set(row) != full:
                raise RowNotPermutation(i + 1)
        _check_columns(cells, self.n)

    @classmethod
    def from_grid(cls, grid: Grid) -> "LatinRectangle":
        cells = _freeze_grid(grid, allow_empty=False)
        return cls(len(cells), len(cells[0]), cells)

    def symbol_at(self, row: int, col: int) -> int:
        self._check_index(row, col)
        return self.cells[row - 1][col - 1]

    def row(self, row: int) -> tuple[int, ...]:
        self._check_index(row, 1)
        return self.cells[row - 1]

    def column(self, col: int) -> tuple[int, ...]:
        self._check_index(1, col)
        return tuple(r[col - 1] for r in self.cells)

    def _check_index(self, row: int, col: int) -> None:
        if not (1 <= row <= self.k and 1 <= col <= self.n):
            raise IndexOutOfRange(f"cell ({row}, {col}) outside {self.k} x {self.n}")

    def as_partial(self) -> "PartialLatinRectangle":
        return PartialLatinRectangle(self.k, self.n, self.cells, self.k * self.n)

    def to_grid(self) -> list[list[int]]:
        return [list(r) for r in self.cells]


@dataclass(frozen=True)
class PartialLatinRectangle:
    """A k x n grid with optional empty cells (stored as 0).

    The filled cells must already satisfy the row and column constraints.
    fill_count is stored rather than recomputed because sparsity checks
    and samplers consult it constantly.
    """

    k: int
    n: int
    cells: tuple[tuple[int, ...], ...]
    fill_count: int

    def __post_init__(self):
        cells = _freeze_grid(self.cells, allow_empty=True)
        object.__setattr__(self, "cells", cells)
        if self.k != len(cells) or self.n != len(cells[0]):
            raise DimensionMismatch("declared (k, n) disagrees with the grid")
        filled = sum(1 for row in cells for v in row if v)
        if self.fill_count != filled:
            raise DimensionMismatch(f"fill_count {self.fill_count} but {filled} cells are filled")
        for i, row in enumerate(cells):
            seen = 0
            for s in row:
                if s and seen >> s & 1:
                    raise RowRepeat(i + 1, s)
                seen |= 1 << s
        _check_columns(cells, self.n)

    @classmethod
    def from_grid(cls, grid: Grid) -> "PartialLatinRectangle":
        cells = _freeze_grid(grid, allow_empty=True)
        filled = sum(1 for row in cells for v in row if v)
        return cls(len(cells), len(cells[0]), cells, filled)

    @classmethod
    def empty(cls, k: int, n: int) -> "PartialLatinRectangle":
        return cls(k, n, tuple((0,) * n for _ in range(k)), 0)

    @classmethod
    def from_entries(cls, k: int, n: int, entries: Iterable[tuple[int, int, int]]) -> "PartialLatinRectangle":
        """Build from 1-based (row, col, symbol) triples."""
        grid = [[0] * n for _ in range(k)]
        for row, col, sym in entries:
            if not (1 <= row <= k and 1 <= col <= n):
                raise IndexOutOfRange(f"entry ({row}, {col}) outside {k} x {n}")
            grid[row - 1][col - 1] = sym
        return cls.from_grid(grid)

    def symbol_at(self, row: int, col: int) -> int:
        """Return the symbol at a 1-based cell, or 0 if the cell is empty."""
        if not (1 <= row <= self.k and 1 <= col <= self.n):
            raise IndexOutOfRange(f"cell ({row}, {col}) outside {self.k} x {self.n}")
        return self.cells[row - 1][col - 1]

    def entries(self) -> Iterator[tuple[int, int, int]]:
        """Yield filled cells as 1-based (row, col, symbol), row-major."""
        for i, row in enumerate(self.cells):
            for j, s in enumerate(row):
                if s:
                    yield (i + 1, j + 1, s)

    def with_entry(self, row: int, col: int, sym: int) -> "PartialLatinRectangle":
        """Return a copy with one more filled cell.  The cell must be empty."""
        if self.symbol_at(row, col):
            raise IndexOutOfRange(f"cell ({row}, {col}) is already filled")
        grid = self.to_grid()
        grid[row - 1][col - 1] = sym
        return PartialLatinRectangle(self.k, self.n, tuple(map(tuple, grid)), self.fill_count + 1)

    def issubpattern(self, other: "PartialLatinRectangle") -> bool:
        """True if every filled cell of self is filled identically in other."""
        if (self.k, self.n) != (other.k, other.n):
            raise DimensionMismatch("patterns have different shapes")
        return all(other.cells[i - 1][j - 1] == s for i, j, s in self.entries())

    def is_complete(self) -> bool:
        return self.fill_count == self.k * self.n

    def as_rectangle(self) -> LatinRectangle:
        if not self.is_complete():
            raise IncompleteTuple("grid has empty cells")
        return LatinRectangle(self.k, self.n, self.cells)

    def to_grid(self) -> list[list[int]]:
        return [list(r) for r in self.cells]


@dataclass(frozen=True)
class SparsityProfile:
    """Per-row, per-column and per-symbol fill loads of a partial grid."""

    row_loads: tuple[int, ...]
    col_loads: tuple[int, ...]
    symbol_loads: tuple[int, ...]
    max_load: int


@dataclass(frozen=True)
class MatchingTuple:
    """k pairwise edge-disjoint matchings of symbols to columns.

    matchings[i] is a tuple of (column, symbol) edges sorted by column.
    Matchings may be partial; a tuple is complete when every matching is
    perfect, and complete tuples correspond exactly to Latin rectangles.
    """

    k: int
    n: int
    matchings: tuple[tuple[tuple[int, int], ...], ...]

    def __post_init__(self):
        norm = tuple(tuple(sorted((int(c), int(s)) for c, s in m)) for m in self.matchings)
        object.__setattr__(self, "matchings", norm)
        if self.k != len(norm):
            raise DimensionMismatch("declared k disagrees with the number of matchings")
        if self.k > self.n:
            raise DimensionMismatch(f"{self.k} matchings but only {self.n} columns; need k <= n")
        seen: set[tuple[int, int]] = set()
        for i, m in enumerate(norm):
            cols = [c for c, _ in m]
            syms = [s for _, s in m]
            for c, s in m:
                if not (1 <= c <= self.n and 1 <= s <= self.n):
                    raise OutOfRangeSymbol(i + 1, c, s)
            if len(set(cols)) != len(cols):
                raise DimensionMismatch(f"matching {i + 1} uses a column twice")
            if len(set(syms)) != len(syms):
                raise RowRepeat(i + 1, next(s for s in syms if syms.count(s) > 1))
            for e in m:
                if e in seen:
                    raise DisjointnessViolated(e)
                seen.add(e)

    @classmethod
    def from_maps(cls, n: int, maps: Sequence[Mapping[int, int]]) -> "MatchingTuple":
        """Build from per-row {column: symbol} mappings."""
        return cls(len(maps), n, tuple(tuple(m.items()) for m in maps))

    def maps(self) -> tuple[dict[int, int], ...]:
        return tuple(dict(m) for m in self.matchings)

    def is_complete(self) -> bool:
        return all(len(m) == self.n for m in self.matchings)

    def edges(self) -> frozenset[tuple[int, int]]:
        return frozenset(e for m in self.matchings for e in m)

    def as_partial(self) -> PartialLatinRectangle:
        """View the tuple as a partial grid (row i holds matching i)."""
        grid = [[0] * self.n for _ in range(self.k)]
        for i, m in enumerate(self.matchings):
            for c, s in m:
                grid[i][c - 1] = s
        return PartialLatinRectangle.from_grid(grid)


def validate_rectangle(grid: Grid) -> LatinRectangle:
    """Validate a nested sequence as a complete Latin rectangle."""
    return LatinRectangle.from_grid(grid)


def validate_partial(grid: Grid) -> PartialLatinRectangle:
    """Validate a nested sequence (0 or None for empty cells) as a partial grid."""
    return PartialLatinRectangle.from_grid(grid)


def sparsity_profile(p: PartialLatinRectangle | LatinRectangle) -> SparsityProfile:
    """Count filled cells per row, per column, and per symbol."""
    if isinstance(p, LatinRectangle):
        p = p.as_partial()
    rows = [0] * p.k
    cols = [0] * p.n
    syms = [0] * p.n
    for i, j, s in p.entries():
        rows[i - 1] += 1
        cols[j - 1] += 1
        syms[s - 1] += 1
    loads = rows + cols + syms
    return SparsityProfile(tuple(rows), tuple(cols), tuple(syms), max(loads))


def is_c_sparse(p: PartialLatinRectangle, c: int) -> bool:
    """True if every row, column and symbol load is at most c."""
    return sparsity_profile(p).max_load <= c


def to_matchings(rect: LatinRectangle) -> MatchingTuple:
    """Encode row i as the perfect matching {(column j, symbol L[i][j])}."""
    ms = tuple(tuple((j + 1, s) for j, s in enumerate(row)) for row in rect.cells)
    return MatchingTuple(rect.k, rect.n, ms)


def from_matchings(tup: MatchingTuple) -> LatinRectangle:
    """Decode a complete matching tuple back into a rectangle."""
    if not tup.is_complete():
        raise IncompleteTuple("every matching must be perfect")
    grid = [[0] * tup.n for _ in range(tup.k)]
    for i, m in enumerate(tup.matchings):
        for c, s in m:
            grid[i][c - 1] = s
    return LatinRectangle.from_grid(grid)


def contains(rect: LatinRectangle, pattern: PartialLatinRectangle) -> bool:
    """True if rect agrees with every filled cell of pattern (same shape)."""
    if (rect.k, rect.n) != (pattern.k, pattern.n):
        raise DimensionMismatch("rectangle and pattern have different shapes")
    return all(rect.cells[i - 1][j - 1] == s for i, j, s in pattern.entries())


def restrict_rows(rect: LatinRectangle, rows: Iterable[int]) -> LatinRectangle:
    """Keep the given 1-based rows (in increasing order)."""
    picked = sorted(set(rows))
    if not picked:
        raise EmptySelection("row selection is empty")
    if picked[0] < 1 or picked[-1] > rect.k:
        raise IndexOutOfRange(f"row selection outside 1..{rect.k}")
    cells = tuple(rect.cells[i - 1] for i in picked)
    return LatinRectangle(len(picked), rect.n, cells)
