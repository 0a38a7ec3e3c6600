import numpy as np
import pytest
from conftest import central_fd, mp_density, mp_edges

from questeig.density import (
    _solve_mp_batch,
    density_curve,
    map_to_density,
    solve_mp_at,
)
from questeig.errors import NumericalError
from questeig.grid import build_grid, build_grid_with_jacobian
from questeig.spectrum import PopulationSpectrum, group_spectrum
from questeig.support import find_support, support_jacobian

C_THIRD = 1 / 3


def pipeline_to_density(tau, n, with_jacobian=True):
    spec = PopulationSpectrum.from_values(tau, n)
    g = group_spectrum(spec)
    supp = find_support(g, spec.c)
    curves = []
    sj = support_jacobian(supp, spec) if with_jacobian else None
    for i in range(supp.nu):
        grid = (
            build_grid_with_jacobian(supp, i, sj) if with_jacobian else build_grid(supp, i)
        )
        curves.append(density_curve(grid, g, spec, spec.c, with_jacobian=with_jacobian))
    return spec, supp, curves


class TestSolveMp:
    def test_single_cluster_closed_form(self):
        g = group_spectrum(PopulationSpectrum(np.ones(12), 36))
        y = solve_mp_at(1.0, g, C_THIRD)
        assert y == pytest.approx(1 / np.sqrt(3), rel=1e-12)

    def test_vanishes_at_interval_edges(self):
        g = group_spectrum(PopulationSpectrum(np.ones(12), 36))
        supp = find_support(g, C_THIRD)
        lo, hi = supp.interval(0)
        span = hi - lo
        for off in (1e-6, 1e-8):
            y = solve_mp_at(hi - off * span, g, C_THIRD)
            assert 0 < y < 5e-2
        y6 = solve_mp_at(hi - 1e-6 * span, g, C_THIRD)
        y8 = solve_mp_at(hi - 1e-8 * span, g, C_THIRD)
        assert y8 < y6

    def test_residuals_below_tolerance(self):
        spec = PopulationSpectrum.from_values([1.0] * 5 + [2.0] * 5, 100)
        g = group_spectrum(spec)
        supp = find_support(g, spec.c)
        for i in range(supp.nu):
            xi = build_grid(supp, i).xi
            for x in xi[1:-1]:
                y = solve_mp_at(float(x), g, spec.c)
                resid = np.sum(g.w * g.t**2 / ((g.t - x) ** 2 + y**2)) - 1 / spec.c
                assert abs(resid) <= 1e-10

    def test_batch_matches_scalar(self):
        spec = PopulationSpectrum.from_values([0.5, 1.0, 1.5, 2.0, 4.0], 25)
        g = group_spectrum(spec)
        supp = find_support(g, spec.c)
        xi = build_grid(supp, 0).xi[1:-1]
        batch = _solve_mp_batch(xi, g, spec.c)
        scalar = np.array([solve_mp_at(float(x), g, spec.c) for x in xi])
        np.testing.assert_allclose(batch, scalar, rtol=1e-12, atol=1e-14)

    def test_gamma_strictly_decreasing_in_y(self):
        g = group_spectrum(PopulationSpectrum(np.array([1.0, 2.0, 3.0]), 9))
        xi = 1.7
        ys = np.linspace(0.01, 5.0, 200)
        vals = [np.sum(g.w * g.t**2 / ((g.t - xi) ** 2 + y**2)) for y in ys]
        assert np.all(np.diff(vals) < 0)


class TestDensityMapping:
    def test_interior_point_closed_form(self):
        spec = PopulationSpectrum(np.ones(12), 36)
        z = 1.0 + 1j / np.sqrt(3)
        x, f = map_to_density(z, spec)
        assert x == pytest.approx(4 / 3, rel=1e-12)
        assert f == pytest.approx(float(mp_density(4 / 3, 1.0, C_THIRD)), rel=1e-10)

    def test_edges_map_to_closed_form(self):
        spec = PopulationSpectrum(np.ones(12), 36)
        a, b = mp_edges(1.0, C_THIRD)
        x_lo, f_lo = map_to_density(complex(1 - np.sqrt(C_THIRD)), spec)
        x_hi, f_hi = map_to_density(complex(1 + np.sqrt(C_THIRD)), spec)
        assert x_lo == pytest.approx(a, abs=1e-10)
        assert x_hi == pytest.approx(b, abs=1e-10)
        assert f_lo == 0.0 and f_hi == 0.0

    def test_off_manifold_rejected(self):
        spec = PopulationSpectrum(np.ones(12), 36)
        with pytest.raises(NumericalError):
            map_to_density(1.0 + 0.9j, spec)

    def test_density_positive_and_x_increasing(self):
        _, supp, curves = pipeline_to_density([1.0] * 5 + [2.0] * 5, 100, with_jacobian=False)
        for curve in curves:
            assert np.all(curve.f[1:-1] > 0)
            assert curve.f[0] == 0.0 and curve.f[-1] == 0.0
            assert np.all(np.diff(curve.x) > 0)

    def test_full_curve_matches_closed_form_density(self):
        _, supp, curves = pipeline_to_density(np.ones(60), 180, with_jacobian=False)
        curve = curves[0]
        expected = mp_density(curve.x[1:-1], 1.0, C_THIRD)
        np.testing.assert_allclose(curve.f[1:-1], expected, rtol=1e-9)

    def test_interval_mass_near_count_share(self):
        tau = [1.0] * 25 + [3.0] * 15
        spec, supp, curves = pipeline_to_density(tau, 400, with_jacobian=False)
        assert supp.nu == 2
        for i, curve in enumerate(curves):
            mass = np.trapezoid(curve.f, curve.x)
            share = supp.counts[i] / spec.p
            assert abs(mass - share) <= 0.02 * share


class TestDensityJacobians:
    def test_euler_identities(self):
        # x is degree-1 homogeneous in tau, f is degree -1
        tau = np.array([0.7, 1.1, 1.35, 2.2, 2.9])
        spec, supp, curves = pipeline_to_density(tau, 15)
        for curve in curves:
            np.testing.assert_allclose(curve.dx @ tau, curve.x, atol=1e-6)
            np.testing.assert_allclose(curve.df @ tau, -curve.f, atol=1e-6)

    def test_against_finite_differences(self):
        rng = np.random.default_rng(5)
        tau = np.sort(rng.uniform(1.0, 2.0, size=5))
        spec, supp, curves = pipeline_to_density(tau, 15)
        assert supp.nu == 1
        curve = curves[0]

        def x_of(t):
            _, _, cs = pipeline_to_density(t, 15, with_jacobian=False)
            return cs[0].x

        def f_of(t):
            _, _, cs = pipeline_to_density(t, 15, with_jacobian=False)
            return cs[0].f

        fd_x = central_fd(x_of, tau, 1e-6)
        fd_f = central_fd(f_of, tau, 1e-6)
        assert np.abs(curve.dx - fd_x).max() <= 1e-4
        assert np.abs(curve.df - fd_f).max() <= 1e-4

    def test_endpoint_rows(self):
        tau = np.array([1.0, 1.5, 2.0])
        spec, supp, curves = pipeline_to_density(tau, 9)
        curve = curves[0]
        assert np.all(curve.dy[0] == 0.0) and np.all(curve.dy[-1] == 0.0)
        assert np.all(curve.df[0] == 0.0) and np.all(curve.df[-1] == 0.0)
        sj = support_jacobian(supp, spec)
        # endpoint x-rows follow the support endpoints through the mapping
        fd = central_fd(
            lambda t: np.array(
                [pipeline_to_density(t, 9, with_jacobian=False)[2][0].x[0],
                 pipeline_to_density(t, 9, with_jacobian=False)[2][0].x[-1]]
            ),
            tau,
            1e-7,
        )
        np.testing.assert_allclose(curve.dx[[0, -1]], fd, atol=1e-5)
