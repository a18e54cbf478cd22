import numpy as np
import pytest

from defkrylov import (BoundarySpec, Grid, assemble_pressure, diagonal_scale,
                       make_layered_field)


def sandwich_problem(sigma=1e6, nx=7, ny=7, nz=3):
    """Diagonally scaled high-low-high layered problem with a corner
    injector/producer pair."""
    grid = Grid(nx, ny, nz)
    field = make_layered_field(grid, [((0, 1), sigma), ((1, 2), 1.0),
                                      ((2, 3), sigma)])
    q = np.zeros(grid.n_cells)
    q[0] = 1.0
    q[-1] = -1.0
    problem = diagonal_scale(assemble_pressure(field, BoundarySpec(), q))
    return problem, field


@pytest.fixture(scope="session")
def sandwich_1e6():
    return sandwich_problem(1e6)


@pytest.fixture(scope="session")
def sandwich_1e8():
    return sandwich_problem(1e8)
