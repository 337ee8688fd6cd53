"""Exhaustive censuses over small rectangle spaces.

Everything here is exact: counts are Python integers and probabilities
are Fractions.  A size guard refuses exhaustive work beyond a default
envelope (n <= 4, or n <= 6 with at most 3 rows); every guarded entry
point accepts guard_override=True for callers who know what they are
asking for.

Enumeration order is part of the contract: rectangles are produced in
row-major lexicographic order of their symbol strings, so cached arrays
are sorted and stable across runs.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

import numpy as np

from .core import LatinRectangle, MatchingTuple, PartialLatinRectangle
from .errors import (
    ConditioningOnEmptyEvent,
    DegenerateB,
    DimensionMismatch,
    EdgeAlreadyUsed,
    EdgeMeetsMatching,
    IndexOutOfRange,
    NotAnExtension,
    SizeGuardExceeded,
)

GUARD_NOTE = "n <= 4, or n <= 6 with k <= 3"


def check_size_guard(k: int, n: int, *, override: bool = False) -> None:
    """Refuse exhaustive computations outside the default envelope."""
    if override:
        return
    if n <= 4 or (n <= 6 and k <= 3):
        return
    raise SizeGuardExceeded(
        f"exhaustive census at k={k}, n={n} exceeds the default envelope ({GUARD_NOTE}); "
        "pass guard_override=True (or --guard-override) to proceed anyway"
    )


def _check_shape(k: int, n: int) -> None:
    if not (1 <= k <= n):
        raise DimensionMismatch(f"need 1 <= k <= n, got k={k}, n={n}")


def _prepare(p: PartialLatinRectangle):
    """Mutable grid, row/column symbol bitmasks, and open cell list."""
    grid = [list(r) for r in p.cells]
    rowm = [0] * p.k
    colm = [0] * p.n
    empties = []
    for i in range(p.k):
        for j in range(p.n):
            s = grid[i][j]
            if s:
                rowm[i] |= 1 << s
                colm[j] |= 1 << s
            else:
                empties.append((i, j))
    return grid, rowm, colm, empties


def _iter_grids(n, grid, rowm, colm, empties) -> Iterator[list[list[int]]]:
    """Yield every completion, filling cells in row-major order with
    ascending symbols.  The yielded grid is a live buffer; copy to keep."""
    full = (1 << (n + 1)) - 2
    m = len(empties)

    def rec(t: int):
        if t == m:
            yield grid
            return
        i, j = empties[t]
        cand = full & ~rowm[i] & ~colm[j]
        while cand:
            b = cand & -cand
            cand ^= b
            grid[i][j] = b.bit_length() - 1
            rowm[i] |= b
            colm[j] |= b
            yield from rec(t + 1)
            rowm[i] ^= b
            colm[j] ^= b
        grid[i][j] = 0

    return rec(0)


def _matching_count(masks: list[int]) -> int:
    """Number of ways to pick one bit per mask, all distinct (a permanent)."""

    @functools.lru_cache(maxsize=None)
    def rec(t: int, used: int) -> int:
        if t == len(masks):
            return 1
        total = 0
        cand = masks[t] & ~used
        while cand:
            b = cand & -cand
            cand ^= b
            total += rec(t + 1, used | b)
        return total

    count = rec(0, 0)
    rec.cache_clear()
    return count


def _count_completions(n, rowm, colm, empties) -> int:
    """Count completions without materializing them.

    Branches on the most constrained open cell; once the open cells all
    lie in a single row the remainder is a matching count.
    """
    full = (1 << (n + 1)) - 2
    open_cells = list(empties)

    def rec() -> int:
        if not open_cells:
            return 1
        rows_left = {i for i, _ in open_cells}
        if len(rows_left) == 1:
            masks = [full & ~rowm[i] & ~colm[j] for i, j in open_cells]
            return _matching_count(masks)
        best_t, best_cand, best_width = -1, 0, n + 1
        for t, (i, j) in enumerate(open_cells):
            cand = full & ~rowm[i] & ~colm[j]
            width = cand.bit_count()
            if width == 0:
                return 0
            if width < best_width:
                best_t, best_cand, best_width = t, cand, width
                if width == 1:
                    break
        i, j = open_cells.pop(best_t)
        total = 0
        cand = best_cand
        while cand:
            b = cand & -cand
            cand ^= b
            rowm[i] |= b
            colm[j] |= b
            total += rec()
            rowm[i] ^= b
            colm[j] ^= b
        open_cells.insert(best_t, (i, j))
        return total

    return rec()


def enumerate_rectangles(k: int, n: int, *, guard_override: bool = False) -> Iterator[LatinRectangle]:
    """All k x n rectangles, row-major lexicographic by symbol string."""
    _check_shape(k, n)
    check_size_guard(k, n, override=guard_override)
    grid, rowm, colm, empties = _prepare(PartialLatinRectangle.empty(k, n))
    for g in _iter_grids(n, grid, rowm, colm, empties):
        yield LatinRectangle.from_grid(g)


def count_rectangles(k: int, n: int, *, guard_override: bool = False) -> int:
    """|L_{k,n}| by exhaustive count."""
    _check_shape(k, n)
    check_size_guard(k, n, override=guard_override)
    _, rowm, colm, empties = _prepare(PartialLatinRectangle.empty(k, n))
    return _count_completions(n, rowm, colm, empties)


def count_extensions(p: PartialLatinRectangle, *, guard_override: bool = False) -> int:
    """Number of complete rectangles containing the pattern."""
    check_size_guard(p.k, p.n, override=guard_override)
    _, rowm, colm, empties = _prepare(p)
    return _count_completions(p.n, rowm, colm, empties)


def exact_containment_probability(p: PartialLatinRectangle, *, guard_override: bool = False) -> Fraction:
    """P(L contains p) under the uniform distribution on k x n rectangles."""
    total = count_rectangles(p.k, p.n, guard_override=guard_override)
    return Fraction(count_extensions(p, guard_override=guard_override), total)


def exact_conditional_probability(
    event: PartialLatinRectangle,
    given: PartialLatinRectangle,
    *,
    guard_override: bool = False,
) -> Fraction:
    """P(L contains event | L contains given), with given a subpattern of event."""
    if (event.k, event.n) != (given.k, given.n):
        raise DimensionMismatch("event and conditioning patterns have different shapes")
    if not given.issubpattern(event):
        raise NotAnExtension("the event pattern must extend the conditioning pattern")
    denom = count_extensions(given, guard_override=guard_override)
    if denom == 0:
        raise ConditioningOnEmptyEvent("the conditioning pattern has no completions")
    return Fraction(count_extensions(event, guard_override=guard_override), denom)


def complete_partial(p: PartialLatinRectangle) -> LatinRectangle | None:
    """First completion in enumeration order, or None if there is none.

    Not guarded: finding a single completion is cheap at desk scale even
    where the full census is not.
    """
    grid, rowm, colm, empties = _prepare(p)
    for g in _iter_grids(p.n, grid, rowm, colm, empties):
        return LatinRectangle.from_grid(g)
    return None


@dataclass(frozen=True)
class CensusResult:
    """Total census size, and the count matching a pattern if one was given."""

    k: int
    n: int
    total: int
    constrained: int | None = None


def census(k: int, n: int, pattern: PartialLatinRectangle | None = None, *, guard_override: bool = False) -> CensusResult:
    if pattern is not None and (pattern.k, pattern.n) != (k, n):
        raise DimensionMismatch("pattern shape disagrees with (k, n)")
    total = count_rectangles(k, n, guard_override=guard_override)
    constrained = None if pattern is None else count_extensions(pattern, guard_override=guard_override)
    return CensusResult(k, n, total, constrained)


@dataclass(frozen=True)
class SwitchClassSizes:
    """Partition of the completions of a matching tuple by a probe edge.

    Among completions N of the tuple, a_sizes[j-1] counts those whose
    row j uses the probe edge, and b counts those where no row does.
    """

    edge: tuple[int, int]
    a_sizes: tuple[int, ...]
    b: int
    total: int

    def __post_init__(self):
        if self.b + sum(self.a_sizes) != self.total:
            raise DimensionMismatch("class sizes do not partition the completions")


def switch_classes(tup: MatchingTuple, edge: tuple[int, int], *, guard_override: bool = False) -> SwitchClassSizes:
    """Classify completions of tup by which row, if any, uses the probe edge."""
    c, s = edge
    if not (1 <= c <= tup.n and 1 <= s <= tup.n):
        raise IndexOutOfRange(f"edge {edge} outside 1..{tup.n}")
    if (c, s) in tup.edges():
        raise EdgeAlreadyUsed(f"edge {edge} already belongs to the tuple")
    check_size_guard(tup.k, tup.n, override=guard_override)
    p = tup.as_partial()
    grid, rowm, colm, empties = _prepare(p)
    a = [0] * tup.k
    b = 0
    total = 0
    for g in _iter_grids(tup.n, grid, rowm, colm, empties):
        total += 1
        for i in range(tup.k):
            if g[i][c - 1] == s:
                a[i] += 1
                break
        else:
            b += 1
    return SwitchClassSizes((c, s), tuple(a), b, total)


def switching_ratio(
    tup: MatchingTuple,
    edge: tuple[int, int],
    row: int,
    *,
    guard_override: bool = False,
    classes: SwitchClassSizes | None = None,
) -> Fraction:
    """(n - k) |A_row| / |B| for a probe edge vertex-disjoint from matching row.

    Pass a precomputed classes partition to amortize sweeps over rows.
    """
    if not (1 <= row <= tup.k):
        raise IndexOutOfRange(f"row {row} outside 1..{tup.k}")
    c, s = edge
    m = tup.matchings[row - 1]
    if any(mc == c or ms == s for mc, ms in m):
        raise EdgeMeetsMatching(f"edge {edge} shares a vertex with matching {row}")
    if classes is None:
        classes = switch_classes(tup, edge, guard_override=guard_override)
    if classes.b == 0:
        raise DegenerateB("no completion avoids the probe edge; the ratio is undefined")
    return Fraction((tup.n - tup.k) * classes.a_sizes[row - 1], classes.b)


_ARRAY_CACHE: dict[tuple[int, int], np.ndarray] = {}
_CODE_CACHE: dict[tuple[int, int], np.ndarray] = {}


def enumeration_array(k: int, n: int, *, guard_override: bool = False) -> np.ndarray:
    """All rectangles as a read-only uint8 array of shape (count, k, n).

    Rows follow enumeration order, so the base-n codes of the rows are
    strictly increasing.  Cached per (k, n).
    """
    key = (k, n)
    if key not in _ARRAY_CACHE:
        _check_shape(k, n)
        check_size_guard(k, n, override=guard_override)
        grid, rowm, colm, empties = _prepare(PartialLatinRectangle.empty(k, n))
        flat = [bytes(v for row in g for v in row) for g in _iter_grids(n, grid, rowm, colm, empties)]
        arr = np.frombuffer(b"".join(flat), dtype=np.uint8).reshape(len(flat), k, n).copy()
        arr.setflags(write=False)
        _ARRAY_CACHE[key] = arr
    return _ARRAY_CACHE[key]


def encode_grids(batch: np.ndarray) -> np.ndarray:
    """Base-n codes (int64) of a (m, k, n) batch, row-major most significant first.

    Only valid while n**(k*n) fits in int64; guarded sizes all do.
    """
    m, k, n = batch.shape
    if k * n * np.log2(max(n, 2)) >= 63:
        raise SizeGuardExceeded(f"base-{n} codes for {k}x{n} grids overflow int64")
    powers = n ** np.arange(k * n - 1, -1, -1, dtype=np.int64)
    return (batch.reshape(m, k * n).astype(np.int64) - 1) @ powers


def enumeration_codes(k: int, n: int, *, guard_override: bool = False) -> np.ndarray:
    """Sorted base-n codes of the full enumeration; used to bin samples."""
    key = (k, n)
    if key not in _CODE_CACHE:
        codes = encode_grids(enumeration_array(k, n, guard_override=guard_override))
        codes.setflags(write=False)
        _CODE_CACHE[key] = codes
    return _CODE_CACHE[key]


def clear_caches() -> None:
    _ARRAY_CACHE.clear()
    _CODE_CACHE.clear()
