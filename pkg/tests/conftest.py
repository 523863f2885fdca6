import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from tumor_phasefield.grid import Grid  # noqa: E402
from tumor_phasefield.potentials import PotentialSpec, ProliferationSpec  # noqa: E402
from tumor_phasefield.stepper import SolverConfig, State  # noqa: E402

STANDARD_CONFIG = """\
# standard scenario: quartic relaxation of a planar interface
alpha = 0.1
gamma = 1
dt = 0.001
tol_newton = 1e-10
tol_lin = 1e-11
potential.kind = quartic
potential.eps = 0.01
proliferation.kind = sqrt_w
proliferation.p0 = 1
grid.n = 64
grid.length = 1
init.kind = tanh
init.x0 = 0.5
init.width = 0.1
init.mu0 = 0
init.sigma0 = 0.5
t_end = 1
"""


@pytest.fixture
def standard_text():
    return STANDARD_CONFIG


@pytest.fixture
def standard_cfg():
    return SolverConfig(
        alpha=0.1, gamma=1.0, potential=PotentialSpec("quartic", 0.01),
        proliferation=ProliferationSpec("sqrt_w", p0=1.0), dt=1e-3, tol_lin=1e-11, tol_newton=1e-10,
    )


@pytest.fixture
def standard_state():
    grid = Grid((64,), (1.0,))
    x = grid.coordinates()[0]
    return State(grid, 0.0, grid.zeros(), np.tanh((x - 0.5) / 0.1), grid.full(0.5))


def pytest_terminal_summary(terminalreporter):
    from acceptance_report import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
