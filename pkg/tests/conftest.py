import numpy as np
import pytest
import scipy.sparse as sp

from swlab.geometry import assemble_sum_of_squares, build_grid, make_fields
from swlab.spectral import MatrixOperator, eigendecomposition


def dirichlet_tridiagonal(n: int, length: float = 1.0) -> MatrixOperator:
    """Textbook Dirichlet Laplacian -u'' on n interior nodes of (0, length)."""
    h = length / (n + 1)
    mat = sp.diags([-1.0, 2.0, -1.0], [-1, 0, 1], shape=(n, n)).tocsr() / h**2
    return MatrixOperator(matrix=mat, weight=h)


def interior_bump(coords: np.ndarray, center, radius: float) -> np.ndarray:
    rel = (coords - np.asarray(center, dtype=float)) / radius
    rho2 = np.sum(rel * rel, axis=1)
    out = np.zeros(coords.shape[0])
    inside = rho2 < 1.0
    out[inside] = (1.0 - rho2[inside]) ** 4
    return out


@pytest.fixture(scope="session")
def grid_1d():
    return build_grid([(0.0, 1.0)], 101)


@pytest.fixture(scope="session")
def euclid_1d(grid_1d):
    fields = make_fields("euclidean", 1)
    return fields, assemble_sum_of_squares(fields, grid_1d)


@pytest.fixture(scope="session")
def heisenberg_small():
    grid = build_grid([(-1.0, 1.0)] * 3, 13)
    fields = make_fields("heisenberg")
    return grid, fields, assemble_sum_of_squares(fields, grid)


@pytest.fixture(scope="session")
def grushin_small():
    grid = build_grid([(-1.0, 1.0)] * 2, 33)
    fields = make_fields("grushin")
    return grid, fields, assemble_sum_of_squares(fields, grid)


@pytest.fixture(scope="session")
def tridiag_spec_128():
    op = dirichlet_tridiagonal(128)
    return op, eigendecomposition(op, 128)
