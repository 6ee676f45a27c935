import numpy as np
import pytest

from subfn import MatrixSemigroup, StateVector, dirichlet_laplacian


@pytest.fixture
def matrix_testbed():
    A = dirichlet_laplacian(8)
    return A, MatrixSemigroup(A)


@pytest.fixture
def unit_vector():
    rng = np.random.default_rng(7)
    v = rng.standard_normal(8)
    return StateVector.finite(v / np.linalg.norm(v))


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import ACCEPTANCE_LINES
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
