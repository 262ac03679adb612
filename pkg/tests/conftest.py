import numpy as np
import pytest

from enstab import parse_nonlinearity, solve_1d, solve_radial


@pytest.fixture(scope="session")
def torsion_1d():
    return solve_1d(parse_nonlinearity("torsion"))


@pytest.fixture(scope="session")
def torsion_cone3():
    return solve_radial(parse_nonlinearity("torsion"), 3)


@pytest.fixture(scope="session")
def torsion_cone4():
    return solve_radial(parse_nonlinearity("torsion"), 4)


@pytest.fixture(scope="session")
def le2_1d():
    return solve_1d(parse_nonlinearity("lane-emden:2"))


@pytest.fixture(scope="session")
def le3_1d():
    return solve_1d(parse_nonlinearity("lane-emden:3"))


@pytest.fixture(scope="session")
def le2_cone3():
    return solve_radial(parse_nonlinearity("lane-emden:2"), 3)


@pytest.fixture(scope="session")
def le3_cone3():
    return solve_radial(parse_nonlinearity("lane-emden:3"), 3)


@pytest.fixture()
def rng():
    return np.random.default_rng(20260815)
