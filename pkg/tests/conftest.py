import numpy as np
import pytest

from flexgate.flexspace import flex_space
from flexgate.oracle import gen_example

_ACCEPTANCE = []


@pytest.fixture(scope="session")
def tetra():
    return gen_example("tetra-regular")


@pytest.fixture(scope="session")
def octa():
    return gen_example("octa-regular")


@pytest.fixture(scope="session")
def q():
    return gen_example("bipyramid-q")


@pytest.fixture(scope="session")
def bricard():
    return gen_example("bricard1")


@pytest.fixture(scope="session")
def bricard_tangent(bricard):
    return flex_space(bricard).nontrivial_basis[0]


@pytest.fixture
def v5():
    v = np.zeros((5, 3))
    v[4] = [0.0, 0.0, 1.0]
    return v


@pytest.fixture
def rng():
    return np.random.default_rng(20191102)


@pytest.fixture(scope="session")
def acceptance_log():
    return _ACCEPTANCE


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE:
            terminalreporter.write_line(line)
