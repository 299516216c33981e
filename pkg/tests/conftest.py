import pytest

from ftra.model import Instance


@pytest.fixture
def forced():
    """1 site (f=5, R=3), 1 client (r=3), c=2: the only solution opens all three."""
    return Instance([5], [[2]], [3], [3])


@pytest.fixture
def two_forced():
    return Instance([1, 10], [[0], [0]], [2], [1, 1])
