import math

import pytest

from meanvalue import Domain1D, InitialData, Potential, ProblemSpec, SolveConfig, solve, unit_grid


@pytest.fixture(scope="session")
def grid200():
    return unit_grid(200)


@pytest.fixture(scope="session")
def chafee_traj():
    spec = ProblemSpec(Domain1D(0.0, 1.0), 1.0, Potential.chafee_infante(math.pi**2),
                       InitialData.preset("amp_sin", 0.5), "dirichlet")
    return solve(spec, SolveConfig(t_end=0.2, n=100))


@pytest.fixture(scope="session")
def heat_traj():
    spec = ProblemSpec(Domain1D(0.0, 1.0), 1.0, Potential.constant(0.0),
                       InitialData.preset("amp_sin", 1.0), "dirichlet")
    return solve(spec, SolveConfig(t_end=0.1, n=200))


@pytest.fixture(scope="session")
def semilinear_blowup_traj():
    spec = ProblemSpec(Domain1D(0.0, 1.0), 1.0, Potential.polynomial([0, 0, 0, 0, -2.0]),
                       InitialData.preset("amp_sin", 2.5), "dirichlet")
    return solve(spec, SolveConfig(t_end=0.05, n=200))


@pytest.fixture(scope="session")
def degenerate_traj():
    spec = ProblemSpec(Domain1D(0.0, 1.0), 1.0, None, InitialData.preset("amp_ramp", 5.0),
                       "weighted_mixed", degenerate=(2.0, 2.0))
    return solve(spec, SolveConfig(t_end=1.0, n=200))
