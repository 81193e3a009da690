import sys

import numpy as np
import pytest

from vbgk.grid import SpeciesParams, uniform_grid


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "ACCEPTANCE_LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture
def unit_species():
    return SpeciesParams(mass=1.0, charge_number=0)


@pytest.fixture
def heavy_species():
    return SpeciesParams(mass=1.5, charge_number=0)


@pytest.fixture
def small_grid():
    """Coarse 5^3 grid used by finite-difference and oracle tests."""
    return uniform_grid(np.zeros(3), 3.0, 5)


@pytest.fixture
def medium_grid():
    return uniform_grid(np.zeros(3), 6.0, 16)
