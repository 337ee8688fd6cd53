import numpy as np
import pytest

from latinlab import LatinRectangle, PartialLatinRectangle

# Cayley table of Z4 (cyclic): has intercalates from the order-2 subgroup.
CYCLIC4 = [
    [1, 2, 3, 4],
    [2, 3, 4, 1],
    [3, 4, 1, 2],
    [4, 1, 2, 3],
]

# Cayley table of Z2 x Z2: every pair of rows and columns closes up, 12 intercalates.
KLEIN4 = [
    [1, 2, 3, 4],
    [2, 1, 4, 3],
    [3, 4, 1, 2],
    [4, 3, 2, 1],
]

# Z3: no intercalates at all.
CYCLIC3 = [
    [1, 2, 3],
    [2, 3, 1],
    [3, 1, 2],
]


@pytest.fixture
def cyclic4():
    return LatinRectangle.from_grid(CYCLIC4)


@pytest.fixture
def klein4():
    return LatinRectangle.from_grid(KLEIN4)


@pytest.fixture
def cyclic3():
    return LatinRectangle.from_grid(CYCLIC3)


@pytest.fixture
def rect24():
    return LatinRectangle.from_grid([[1, 2, 3, 4], [2, 1, 4, 3]])


@pytest.fixture
def pattern24():
    return PartialLatinRectangle.from_entries(2, 4, [(1, 1, 1)])


@pytest.fixture
def rng():
    return np.random.default_rng(20260815)
