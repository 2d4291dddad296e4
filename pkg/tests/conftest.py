import pytest

from helpers import TOY_VALUES, TOY_VALUES_X7_4, make_toy


@pytest.fixture(scope="session")
def toy():
    """Shared example joint range, categorical X."""
    return make_toy()


@pytest.fixture(scope="session")
def toy_v():
    """Same joint range with the standard numeric X values."""
    return make_toy(TOY_VALUES)


@pytest.fixture(scope="session")
def toy_v4():
    """Numeric variant with x7 moved out to 4.0 (distortion examples)."""
    return make_toy(TOY_VALUES_X7_4)
