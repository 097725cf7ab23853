import numpy as np
import pytest

from phasekit import (
    PhysicalConstants,
    StateSpec,
    build_state,
    make_position_grid,
)


@pytest.fixture(scope="session")
def constants():
    return PhysicalConstants()


@pytest.fixture(scope="session")
def grid():
    return make_position_grid(-8.0, 8.0, 256)


@pytest.fixture(scope="session")
def ground(grid, constants):
    return build_state(StateSpec.from_string("ho:n=0,omega=1", constants), grid)


@pytest.fixture(scope="session")
def first_excited(grid, constants):
    return build_state(StateSpec.from_string("ho:n=1,omega=1", constants), grid)


def linf(a, b):
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b))))
