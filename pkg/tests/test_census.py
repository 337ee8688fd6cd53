import itertools
import math
from fractions import Fraction

import pytest

from latinlab import (
    LatinRectangle,
    MatchingTuple,
    PartialLatinRectangle,
    contains,
)
from latinlab import census
from latinlab.errors import (
    ConditioningOnEmptyEvent,
    DegenerateB,
    EdgeAlreadyUsed,
    EdgeMeetsMatching,
    IndexOutOfRange,
    NotAnExtension,
    SizeGuardExceeded,
)

# Derangement counts D_n, the row-2 oracle for k = 2.
DERANGEMENTS = {1: 0, 2: 1, 3: 2, 4: 9, 5: 44, 6: 265}


def brute_rectangles(k, n, pattern=None):
    """Independent enumerator: permutation products filtered by columns."""
    out = []
    for rows in itertools.product(itertools.permutations(range(1, n + 1)), repeat=k):
        if any(len({rows[i][j] for i in range(k)}) < k for j in range(n)):
            continue
        rect = LatinRectangle.from_grid([list(r) for r in rows])
        if pattern is None or contains(rect, pattern):
            out.append(rect)
    return out


@pytest.mark.parametrize("k,n", [(1, 3), (2, 3), (3, 3), (2, 4), (3, 4)])
def test_count_matches_brute_force(k, n):
    assert census.count_rectangles(k, n) == len(brute_rectangles(k, n))


def test_known_counts():
    assert census.count_rectangles(3, 3) == 12
    assert census.count_rectangles(2, 4) == 216
    assert census.count_rectangles(4, 4) == 576
    assert census.count_rectangles(2, 5) == 5280
    for n in range(1, 6):
        assert census.count_rectangles(1, n) == math.factorial(n)
    for n in range(2, 6):
        assert census.count_rectangles(2, n) == math.factorial(n) * DERANGEMENTS[n]


def test_enumeration_agrees_with_count():
    for k, n in [(2, 4), (3, 3), (1, 4)]:
        rects = list(census.enumerate_rectangles(k, n))
        assert len(rects) == census.count_rectangles(k, n)
        assert len(set(rects)) == len(rects)


def test_enumeration_order_is_lexicographic():
    seen = [tuple(v for row in r.cells for v in row) for r in census.enumerate_rectangles(2, 4)]
    assert seen == sorted(seen)
    codes = census.enumeration_codes(2, 4)
    assert all(int(a) < int(b) for a, b in zip(codes, codes[1:]))


def test_enumeration_array_matches_iterator():
    arr = census.enumeration_array(2, 4)
    rects = list(census.enumerate_rectangles(2, 4))
    assert arr.shape == (216, 2, 4)
    assert not arr.flags.writeable
    for i in [0, 17, 215]:
        assert [list(row) for row in arr[i]] == rects[i].to_grid()


def test_count_extensions_matches_filtered_enumeration():
    pat = PartialLatinRectangle.from_entries(2, 4, [(1, 1, 1), (2, 2, 1)])
    expected = len(brute_rectangles(2, 4, pat))
    assert census.count_extensions(pat) == expected
    empty = PartialLatinRectangle.empty(2, 4)
    assert census.count_extensions(empty) == 216
    full = brute_rectangles(2, 4)[0].as_partial()
    assert census.count_extensions(full) == 1


def test_containment_probability_single_entry():
    for col in range(1, 5):
        for sym in range(1, 5):
            p = PartialLatinRectangle.from_entries(2, 4, [(2, col, sym)])
            assert census.exact_containment_probability(p) == Fraction(1, 4)


def test_containment_probability_single_row_prefix():
    # l cells pinned in one row leave a (n-l)!/n! chance, any k
    for l in (1, 2, 3):
        p = PartialLatinRectangle.from_entries(
            2, 4, [(1, j, ((j + 1) % 4) + 1) for j in range(1, l + 1)]
        )
        got = census.exact_containment_probability(p)
        assert got == Fraction(math.factorial(4 - l), math.factorial(4))
        # dual route: filtered enumeration
        assert got == Fraction(len(brute_rectangles(2, 4, p)), 216)


def test_conditional_probability():
    given = PartialLatinRectangle.from_entries(2, 4, [(1, 1, 1)])
    event = given.with_entry(2, 1, 2)
    got = census.exact_conditional_probability(event, given)
    support = brute_rectangles(2, 4, given)
    hits = [r for r in support if contains(r, event)]
    assert got == Fraction(len(hits), len(support))
    with pytest.raises(NotAnExtension):
        census.exact_conditional_probability(given, event)
    # row 2 is left needing symbol 3 in column 3, which column 3 already has
    impossible = PartialLatinRectangle.from_entries(
        2, 3, [(1, 1, 1), (1, 2, 2), (1, 3, 3), (2, 1, 2), (2, 2, 1)]
    )
    assert census.count_extensions(impossible) == 0
    with pytest.raises(ConditioningOnEmptyEvent):
        census.exact_conditional_probability(impossible, impossible)


def test_complete_partial_is_first_in_order():
    first = census.complete_partial(PartialLatinRectangle.empty(2, 4))
    assert first == next(iter(census.enumerate_rectangles(2, 4)))
    seeded = PartialLatinRectangle.from_entries(2, 4, [(1, 1, 2)])
    done = census.complete_partial(seeded)
    assert contains(done, seeded)


def test_census_with_pattern(pattern24):
    res = census.census(2, 4, pattern24)
    assert res.total == 216
    assert res.constrained == census.count_extensions(pattern24)
    assert census.census(3, 3).constrained is None


def test_size_guard():
    with pytest.raises(SizeGuardExceeded):
        census.count_rectangles(2, 7)
    with pytest.raises(SizeGuardExceeded):
        census.count_rectangles(5, 5)
    with pytest.raises(SizeGuardExceeded):
        census.count_rectangles(1, 7)
    assert census.count_rectangles(1, 7, guard_override=True) == 5040
    assert census.check_size_guard(3, 6) is None
    assert census.check_size_guard(4, 4) is None


def test_switch_classes_partition_against_brute_force():
    tup = MatchingTuple(2, 4, ((), ()))
    all_rects = brute_rectangles(2, 4)
    for c in range(1, 5):
        for s in range(1, 5):
            cls = census.switch_classes(tup, (c, s))
            assert cls.total == 216
            # oracle: classify by scanning rows of every rectangle
            a = [0, 0]
            b = 0
            for r in all_rects:
                for i in (1, 2):
                    if r.symbol_at(i, c) == s:
                        a[i - 1] += 1
                        break
                else:
                    b += 1
            assert cls.a_sizes == tuple(a)
            assert cls.b == b


def test_switch_classes_on_partial_tuple():
    # seed one edge; the probe edge conflicts inside row 1 for rectangles
    tup = MatchingTuple(2, 4, (((1, 1),), ()))
    cls = census.switch_classes(tup, (2, 3))
    pat = PartialLatinRectangle.from_entries(2, 4, [(1, 1, 1)])
    support = brute_rectangles(2, 4, pat)
    assert cls.total == len(support)
    with pytest.raises(EdgeAlreadyUsed):
        census.switch_classes(tup, (1, 1))
    with pytest.raises(IndexOutOfRange):
        census.switch_classes(tup, (0, 2))


def test_switching_ratio_unit_on_empty_tuple():
    # with nothing pinned, symmetry forces the ratio to be exactly 1
    for k, n in [(1, 3), (2, 4)]:
        tup = MatchingTuple(k, n, ((),) * k)
        for c in range(1, n + 1):
            for s in range(1, n + 1):
                cls = census.switch_classes(tup, (c, s))
                for row in range(1, k + 1):
                    assert census.switching_ratio(tup, (c, s), row, classes=cls) == 1


def test_switching_ratio_guards():
    tup = MatchingTuple(2, 4, (((1, 1),), ()))
    with pytest.raises(EdgeMeetsMatching):
        census.switching_ratio(tup, (1, 2), 1)  # same column as (1,1)
    with pytest.raises(EdgeMeetsMatching):
        census.switching_ratio(tup, (2, 1), 1)  # same symbol as (1,1)
    # row 2 has no edges, so the same probe is fine there
    assert census.switching_ratio(tup, (2, 1), 2) >= 0


def test_degenerate_b():
    # at k = n every completion uses every edge somewhere, so B is empty
    tup = MatchingTuple(3, 3, ((), (), ()))
    cls = census.switch_classes(tup, (1, 1))
    assert cls.b == 0
    with pytest.raises(DegenerateB):
        census.switching_ratio(tup, (1, 1), 1, classes=cls)


def test_encode_grids_roundtrip():
    arr = census.enumeration_array(2, 3)
    codes = census.encode_grids(arr)
    # base-n digit code of the flattened grid, most significant first
    first = arr[0].reshape(-1)
    expect = 0
    for v in first:
        expect = expect * 3 + (int(v) - 1)
    assert int(codes[0]) == expect
    assert list(codes) == sorted(set(int(c) for c in codes))
