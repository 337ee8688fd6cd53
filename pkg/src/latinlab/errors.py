"""Exception types shared across the package.

Every rejection that a caller might reasonably want to catch has its own
class.  Plain ValueError is reserved for argument mistakes that no sane
program would want to recover from (negative counts, unknown mode strings).
"""


class LatinLabError(Exception):
    """Base class for all package-specific errors."""


class ValidationError(LatinLabError):
    """A grid or matching tuple failed structural validation."""


class OutOfRangeSymbol(ValidationError):
    """An entry is outside 1..n (or 0 for an empty cell in a partial grid)."""

    def __init__(self, row: int, col: int, value: object):
        self.row, self.col, self.value = row, col, value
        super().__init__(f"entry at row {row}, column {col} is {value!r}, not a symbol in 1..n")


class RowNotPermutation(ValidationError):
    """A row of a complete rectangle does not use every symbol exactly once."""

    def __init__(self, row: int):
        self.row = row
        super().__init__(f"row {row} is not a permutation of the symbols")


class RowRepeat(ValidationError):
    """A symbol occurs twice in one row of a partial grid."""

    def __init__(self, row: int, symbol: int):
        self.row, self.symbol = row, symbol
        super().__init__(f"symbol {symbol} occurs twice in row {row}")


class ColumnRepeat(ValidationError):
    """A symbol occurs twice in one column."""

    def __init__(self, col: int, symbol: int):
        self.col, self.symbol = col, symbol
        super().__init__(f"symbol {symbol} occurs twice in column {col}")


class DimensionMismatch(ValidationError):
    """Grid shape is inconsistent, or two objects have incompatible shapes."""


class EmptySelection(LatinLabError):
    """A row selection was empty."""


class IndexOutOfRange(LatinLabError):
    """A 1-based row or column index falls outside the object."""


class IncompleteTuple(LatinLabError):
    """A matching tuple with partial matchings cannot become a rectangle."""


class DisjointnessViolated(ValidationError):
    """Two matchings in a tuple share an edge."""

    def __init__(self, edge: tuple):
        self.edge = edge
        super().__init__(f"edge (column={edge[0]}, symbol={edge[1]}) appears in two matchings")


class PlrParseError(LatinLabError):
    """Text in the .plr format could not be parsed."""

    def __init__(self, message: str, line: int, column: int = 0):
        self.line, self.column = line, column
        where = f"line {line}" + (f", column {column}" if column else "")
        super().__init__(f"{where}: {message}")


class SizeGuardExceeded(LatinLabError):
    """An exhaustive computation was refused because (k, n) is too large."""


class EdgeAlreadyUsed(LatinLabError):
    """The probe edge already belongs to one of the matchings."""


class EdgeMeetsMatching(LatinLabError):
    """The probe edge shares a vertex with the matching it is compared against."""


class NotAnExtension(LatinLabError):
    """The conditioning pattern is not contained in the event pattern."""


class ConditioningOnEmptyEvent(LatinLabError):
    """The conditioning pattern has no completions at all."""


class DegenerateB(LatinLabError):
    """The switch class B is empty, so the class ratio is undefined."""


class OrderOutOfRange(LatinLabError):
    """A subsquare order is outside the meaningful range for the input."""


class DomainError(LatinLabError):
    """An argument is outside a formula's domain of validity."""


class CapBelowOrder(LatinLabError):
    """A symbol cap smaller than the subsquare order admits no witnesses."""


class UnknownSquareCount(LatinLabError):
    """No Latin-square count is on record for the requested order."""


class RowOutOfRange(LatinLabError):
    """A 1-based matching-row index falls outside the tuple."""


class NotASubMatching(LatinLabError):
    """The excluded edge set is not a subset of the designated matching."""


class TooLargeForExact(LatinLabError):
    """Exhaustive subset checking was refused; use sampled mode."""


class SinkVertex(LatinLabError):
    """A walk cannot leave a vertex with no out-arcs."""


class NonPositiveTransitions(LatinLabError):
    """The sub-sampled chain has zero entries, so the envelope does not apply."""


class EmptyMoveSet(LatinLabError):
    """The switch chain has no moves (k = n leaves no free symbols)."""


class InvalidConfig(LatinLabError):
    """A sampler configuration field is out of range or unknown."""
