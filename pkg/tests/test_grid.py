import numpy as np

from questeig.grid import build_grid, build_grid_with_jacobian, grid_jacobian
from questeig.support import Support


def support_one(lo, hi, count):
    return Support(endpoints=np.array([lo, hi]), counts=np.array([count]))


def test_unit_interval_two_points():
    grid = build_grid(support_one(0.0, 1.0, 2), 0)
    np.testing.assert_allclose(grid.xi, [0.0, 0.25, 0.75, 1.0], atol=1e-15)


def test_unit_interval_one_point():
    grid = build_grid(support_one(0.0, 1.0, 1), 0)
    np.testing.assert_allclose(grid.xi, [0.0, 0.5, 1.0], atol=1e-15)


def test_affine_image():
    grid = build_grid(support_one(2.0, 4.0, 2), 0)
    np.testing.assert_allclose(grid.xi, [2.0, 2.5, 3.5, 4.0], atol=1e-14)


def test_symmetric_spacing():
    grid = build_grid(support_one(0.3, 1.9, 17), 0)
    xi = grid.xi
    left = xi - xi[0]
    right = xi[-1] - xi[::-1]
    np.testing.assert_allclose(left, right, atol=1e-12)
    assert np.all(np.diff(xi) > 0)


def test_edge_densification():
    count = 9
    grid = build_grid(support_one(0.0, 1.0, count), 0)
    uniform = 1.0 / (count + 1)
    assert grid.xi[1] - grid.xi[0] < uniform


def test_jacobian_endpoint_rows():
    supp = support_one(1.0, 3.0, 4)
    sj = np.array([[0.1, 0.2, 0.3], [0.4, 0.5, 0.6]])
    J = grid_jacobian(supp, 0, sj)
    np.testing.assert_array_equal(J[0], sj[0])
    np.testing.assert_array_equal(J[-1], sj[1])


def test_jacobian_rows_are_convex_combinations():
    supp = support_one(1.0, 3.0, 6)
    sj = np.array([[1.0, -1.0, 2.0], [3.0, 1.0, 0.0]])
    grid = build_grid_with_jacobian(supp, 0, sj)
    lo, hi = grid.xi[0], grid.xi[-1]
    s = (grid.xi - lo) / (hi - lo)
    assert np.all((s >= 0) & (s <= 1))
    expected = (1 - s)[:, None] * sj[0] + s[:, None] * sj[1]
    np.testing.assert_allclose(grid.jacobian, expected, atol=1e-14)
    # weights increase monotonically in the grid coordinate
    assert np.all(np.diff(s) > 0)
