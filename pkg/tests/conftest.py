import pytest

from cpt_sense import NOMINAL_PARAMS, fixtures


@pytest.fixture(scope="session")
def nominal():
    return NOMINAL_PARAMS


@pytest.fixture(scope="session")
def scenarios():
    return fixtures()


@pytest.fixture(scope="session")
def s1(scenarios):
    return scenarios[0]


@pytest.fixture(scope="session")
def s2(scenarios):
    return scenarios[1]


@pytest.fixture(scope="session")
def s3(scenarios):
    return scenarios[2]


@pytest.fixture(scope="session")
def s4(scenarios):
    return scenarios[3]


@pytest.fixture(scope="session")
def s5(scenarios):
    return scenarios[4]
