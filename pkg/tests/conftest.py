import pytest

from cks_toolkit.services.growth import make_catalog
from cks_toolkit.services.sequences import bell_numbers, ks_power_sequence, user_sequence


@pytest.fixture
def ks0():
    return make_catalog("ks", {"beta": 0.0})


@pytest.fixture
def ks_half():
    return make_catalog("ks", {"beta": 0.5})


@pytest.fixture
def ones():
    """alpha(n) = 1."""
    return bell_numbers(1, 30)


@pytest.fixture
def factorial_squared():
    """alpha(n) = (n!)^2: log-convex, with a growing n-th root."""
    return user_sequence(ks_power_sequence(1.0, 20).as_array() * 2.0, descriptor="factorial_squared")
