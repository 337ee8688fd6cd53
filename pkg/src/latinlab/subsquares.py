"""Subsquare censuses and the expectation formulas attached to them.

An order-r Latin subsquare of L is an r x r subarray, induced by r rows
and r columns, that is itself a Latin square on some r symbols.  SS_r
counts them; SS_{r,m} relaxes "Latin on r symbols" to "symbol support
of size at most m".

On a valid rectangle every induced subarray already has repetition-free
rows and columns (rows of L are permutations, columns never repeat), so
an r-column set with symbol support exactly r is automatically Latin.
The census exploits that: it extends column sets one at a time and
prunes as soon as the support exceeds the cap.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

from .core import LatinRectangle
from .errors import CapBelowOrder, DomainError, OrderOutOfRange, UnknownSquareCount

# Number of Latin squares by order.  Orders up to 3 are classical
# one-liners; 4 and 5 are re-derived by the census suite before use.
LATIN_SQUARE_COUNTS = {1: 1, 2: 2, 3: 12, 4: 576, 5: 161280}


def _support_masks(rect: LatinRectangle, rows: tuple[int, ...]) -> list[int]:
    """Per-column symbol masks restricted to the given 0-based rows."""
    masks = []
    for c in range(rect.n):
        m = 0
        for i in rows:
            m |= 1 << rect.cells[i][c]
        masks.append(m)
    return masks


def _scan_column_sets(rect: LatinRectangle, rows: tuple[int, ...], r: int, cap: int, sink) -> bool:
    """Extend column sets over the given rows, keeping support <= cap.

    Calls sink(cols, support_mask) on every completed set; a truthy
    return from sink stops the scan early.  Returns True if stopped.
    """
    n = rect.n
    col_masks = _support_masks(rect, rows)
    chosen: list[int] = []

    def rec(start: int, support: int) -> bool:
        if len(chosen) == r:
            return bool(sink(tuple(chosen), support))
        for c in range(start, n - (r - len(chosen)) + 1):
            sup = support | col_masks[c]
            if sup.bit_count() <= cap:
                chosen.append(c)
                if rec(c + 1, sup):
                    return True
                chosen.pop()
        return False

    return rec(0, 0)


def _count_order2(rect: LatinRectangle) -> int:
    """Intercalate count via the closure test on cell pairs."""
    inv = []  # inv[i][s] = 0-based column of symbol s in row i
    for row in rect.cells:
        pos = [0] * (rect.n + 1)
        for j, s in enumerate(row):
            pos[s] = j
        inv.append(pos)
    count = 0
    for i1, i2 in itertools.combinations(range(rect.k), 2):
        r1, r2 = rect.cells[i1], rect.cells[i2]
        for c1 in range(rect.n):
            c2 = inv[i1][r2[c1]]
            if c2 > c1 and r2[c2] == r1[c1]:
                count += 1
    return count


def count_subsquares(rect: LatinRectangle, r: int) -> int:
    """SS_r: the number of order-r Latin subsquares."""
    if not 1 <= r <= min(rect.k, rect.n):
        raise OrderOutOfRange(f"order {r} outside 1..{min(rect.k, rect.n)}")
    if r == 1:
        return rect.k * rect.n
    if r == 2:
        return _count_order2(rect)
    total = 0
    for rows in itertools.combinations(range(rect.k), r):
        hits = 0

        def sink(cols, support):
            nonlocal hits
            hits += 1

        _scan_column_sets(rect, rows, r, r, sink)
        total += hits
    return total


def _subarray_repetition_free(rect: LatinRectangle, rows, cols) -> bool:
    for i in rows:
        seen = {rect.cells[i][c] for c in cols}
        if len(seen) != len(cols):
            return False
    for c in cols:
        seen = {rect.cells[i][c] for i in rows}
        if len(seen) != len(rows):
            return False
    return True


def count_subsquares_limited(rect: LatinRectangle, r: int, m: int, *, repetition_free: bool = True) -> int:
    """SS_{r,m}: order-r subarrays whose symbol support has size <= m.

    repetition_free additionally requires every row and column of the
    subarray to avoid repeats.  On a valid rectangle that always holds,
    so both readings agree; the flag matters only as documentation of
    which convention the count uses.
    """
    if not 1 <= r <= min(rect.k, rect.n):
        raise OrderOutOfRange(f"order {r} outside 1..{min(rect.k, rect.n)}")
    if m < r:
        raise CapBelowOrder(f"cap {m} below order {r}; no subarray can comply")
    if m > rect.n:
        raise OrderOutOfRange(f"cap {m} exceeds the symbol count {rect.n}")
    total = 0
    for rows in itertools.combinations(range(rect.k), r):
        hits = 0

        def sink(cols, support):
            nonlocal hits
            if not repetition_free or _subarray_repetition_free(rect, rows, cols):
                hits += 1

        _scan_column_sets(rect, rows, r, m, sink)
        total += hits
    return total


@dataclass(frozen=True)
class SubsquareCensus:
    """A census result; witnesses are 1-based (rows, cols, symbols) triples."""

    order: int
    cap: int
    count: int
    witnesses: tuple[tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...]], ...] | None = None

    def __post_init__(self):
        if self.count < 0:
            raise OrderOutOfRange("census count cannot be negative")
        if self.witnesses is not None and len(self.witnesses) != self.count:
            raise OrderOutOfRange("witness list disagrees with the count")


def subsquare_census(
    rect: LatinRectangle,
    r: int,
    m: int | None = None,
    *,
    with_witnesses: bool = False,
) -> SubsquareCensus:
    """Full census at order r with optional witnesses; cap defaults to r."""
    cap = r if m is None else m
    if not with_witnesses:
        if cap == r:
            return SubsquareCensus(r, cap, count_subsquares(rect, r))
        return SubsquareCensus(r, cap, count_subsquares_limited(rect, r, cap))
    if not 1 <= r <= min(rect.k, rect.n):
        raise OrderOutOfRange(f"order {r} outside 1..{min(rect.k, rect.n)}")
    if cap < r:
        raise CapBelowOrder(f"cap {cap} below order {r}; no subarray can comply")
    if cap > rect.n:
        raise OrderOutOfRange(f"cap {cap} exceeds the symbol count {rect.n}")
    witnesses = []
    for rows in itertools.combinations(range(rect.k), r):

        def sink(cols, support):
            syms = tuple(s for s in range(1, rect.n + 1) if support >> s & 1)
            witnesses.append((tuple(i + 1 for i in rows), tuple(c + 1 for c in cols), syms))

        _scan_column_sets(rect, rows, r, cap, sink)
    return SubsquareCensus(r, cap, len(witnesses), tuple(witnesses))


def expectation_window(n: int, k: int, m: int, eps: float, *, square_count: int | None = None) -> tuple[float, float]:
    """Reference window C(n,m)^2 C(k,m) |L_m| ((1 +- eps)/n)^(m^2).

    The window is an asymptotic prediction for the expected SS_m of a
    uniform k x n rectangle; at desk scale it is reported, never
    asserted.  Binomials and |L_m| are exact; only the final values are
    floats.
    """
    if not 1 <= m <= min(k, n):
        raise OrderOutOfRange(f"order {m} outside 1..{min(k, n)}")
    if eps < 0:
        raise DomainError(f"eps must be nonnegative, got {eps}")
    if square_count is None:
        if m not in LATIN_SQUARE_COUNTS:
            raise UnknownSquareCount(f"no Latin-square count on record for order {m}; pass square_count")
        square_count = LATIN_SQUARE_COUNTS[m]
    base = Fraction(math.comb(n, m) ** 2 * math.comb(k, m) * square_count)
    e = Fraction(eps)
    low = base * ((1 - e) / n) ** (m * m)
    high = base * ((1 + e) / n) ** (m * m)
    return float(low), float(high)


def log_subsquare_bound(n: int, m: int) -> float:
    """Natural log of 3^(m^2) * (m/n)^(m^2 - 3m)."""
    if m < 2:
        raise DomainError(f"the bound needs m >= 2, got {m}")
    if n < 1:
        raise DomainError(f"n must be positive, got {n}")
    return m * m * math.log(3) + (m * m - 3 * m) * (math.log(m) - math.log(n))


def subsquare_bound(n: int, m: int) -> float:
    """3^(m^2) * (m/n)^(m^2 - 3m), evaluated in log-space.

    The m = 3 value is exactly 3^9 for every n (the second exponent
    vanishes), so that case skips the exponential round trip.
    """
    if m < 2:
        raise DomainError(f"the bound needs m >= 2, got {m}")
    if m * m == 3 * m:
        return float(3 ** (m * m))
    return math.exp(log_subsquare_bound(n, m))


def subsquare_bound_is_decreasing(n: int, m_lo: int = 2, m_hi: int | None = None) -> bool:
    """True iff the bound strictly decreases on integer m in [m_lo, m_hi].

    m_hi defaults to floor(n^(3/4)), the range on which the bound is
    claimed monotone.  Comparison happens in log-space.
    """
    if m_hi is None:
        m_hi = math.floor(n ** 0.75)
    prev = log_subsquare_bound(n, m_lo)
    for m in range(m_lo + 1, m_hi + 1):
        cur = log_subsquare_bound(n, m)
        if cur >= prev:
            return False
        prev = cur
    return True


def _has_subsquare(rect: LatinRectangle, r: int) -> bool:
    for rows in itertools.combinations(range(rect.k), r):
        if _scan_column_sets(rect, rows, r, r, lambda cols, support: True):
            return True
    return False


def max_proper_subsquare_order(rect: LatinRectangle) -> int:
    """Largest order of a proper Latin subsquare, 0 for the 1x1 square.

    Proper excludes the array itself, which only bites when k = n; for a
    strict rectangle even an order-k subsquare is proper.
    """
    top = min(rect.k, rect.n)
    if rect.k == rect.n:
        top -= 1
    for r in range(top, 1, -1):
        if _has_subsquare(rect, r):
            return r
    return 1 if top >= 1 else 0
