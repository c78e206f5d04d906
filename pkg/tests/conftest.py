import numpy as np
import pytest

import momentmap as mm

K = np.array([[-0.22, -1.23, 2.22, 0.0],
              [-1.11, -0.96, 1.14, 2.49]])
C0 = np.array([[-1.08, -0.57, 2.45, 0.0],
               [0.84, -0.08, 1.01, 0.78]])
C1 = np.array([[0.63, 0.67, 1.45, 0.0],
               [1.68, -0.61, 1.04, 2.0]])

CI_DELTA_THETA = 1e-3


def random_factor(rng, m=2, n=4):
    """Random C whose determinantal roots stay well inside the unit disc."""
    while True:
        C = rng.standard_normal((m, n))
        report = mm.determinantal_roots(C, m=m, p=n // m - 1)
        if report.schur and report.moduli.max() < 0.9:
            return C


def random_symmetric(rng, n=4):
    X = rng.standard_normal((n, n))
    return X + X.T


@pytest.fixture(scope="session")
def filt():
    return mm.shift_filter(2, 1)


@pytest.fixture(scope="session")
def basis():
    return mm.build_basis(2, 1)


@pytest.fixture(scope="session")
def grid():
    return mm.make_grid(CI_DELTA_THETA)


@pytest.fixture(scope="session")
def scenario_problem(filt, basis, grid):
    return mm.MomentProblem(filt, mm.PriorFactor(K), basis, grid)


@pytest.fixture(scope="session")
def identity_problem(filt, basis, grid):
    return mm.MomentProblem(filt, mm.PriorFactor.identity(), basis, grid)


@pytest.fixture(scope="session")
def lam0(basis):
    return mm.lambda_from_factor(C0, basis)


@pytest.fixture(scope="session")
def lam1(basis):
    return mm.lambda_from_factor(C1, basis)


@pytest.fixture(scope="session")
def scenario_path(lam0, lam1):
    return mm.SegmentPath(lam0, lam1)


@pytest.fixture(scope="session")
def scenario_critical(scenario_problem, scenario_path):
    return mm.bisect_critical(scenario_path, (0.0, 0.1), scenario_problem)


@pytest.fixture(scope="session")
def scenario_bifurcation(scenario_problem, scenario_path, scenario_critical):
    return mm.analyze_critical_point(scenario_critical, scenario_path, scenario_problem)
