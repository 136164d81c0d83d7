import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from nsbf import (
    BoundaryCondition,
    SpectralProblem,
    assemble,
    parse,
)

PI = np.pi


@pytest.fixture(scope="session")
def paine1():
    """q = exp(x) on [0, pi], default grid and 40 coefficients."""
    problem = SpectralProblem(parse("exp(x)"), PI, BoundaryCondition.dirichlet(),
                              grid_n=20001, n_coeffs=40)
    return assemble(problem)


@pytest.fixture(scope="session")
def paine2():
    """q = 1/(x+0.1)^2 on [0, pi], 100 coefficients."""
    problem = SpectralProblem(parse("1/(x+0.1)^2"), PI, BoundaryCondition.dirichlet(),
                              grid_n=20001, n_coeffs=100)
    return assemble(problem)


@pytest.fixture(scope="session")
def zero_pot():
    """q = 0 with the default particular solution f = 1 + i x."""
    problem = SpectralProblem(parse("0"), PI, BoundaryCondition.dirichlet(),
                              grid_n=2001, n_coeffs=16)
    return assemble(problem)


@pytest.fixture(scope="session")
def zero_pot_unit_f():
    """q = 0 with the forced override f = 1 (all coefficients vanish)."""
    problem = SpectralProblem(parse("0"), PI, BoundaryCondition.dirichlet(),
                              grid_n=2001, n_coeffs=16,
                              override_f_expr=parse("1"), override_h=0.0)
    return assemble(problem)
