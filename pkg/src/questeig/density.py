"""Marčenko–Pastur solutions on the grid and the limiting density.

At every interior grid point xi the equation

    Gamma(y) = (1/p) sum_k tau_k^2 / ((tau_k - xi)^2 + y^2) - 1/c = 0

has a unique root y > 0 (Gamma is strictly decreasing in y); support
endpoints carry y = 0.  The complex solution z = xi + i y is then mapped
back to the real axis:

    x = Re[z - c z m(z)],   m(z) = (1/p) sum_k tau_k / (tau_k - z),
    f = Im[-1/z] / (c pi),

giving density points (x, f) of the limiting sample spectral
distribution.  Gamma is evaluated over the grouped clusters for speed;
all tau-derivatives are taken per raw eigenvalue.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericalError
from .grid import IntervalGrid
from .rootfind import Bracket, find_zero
from .spectrum import GroupedSpectrum, PopulationSpectrum

# Absolute residual allowed in Gamma at a solved point.  Gamma is scale
# invariant in tau, so an absolute tolerance is stable across spectra.
GAMMA_RESIDUAL_TOL = 1e-10


@dataclass(frozen=True)
class DensityCurve:
    """Everything the CDF stage needs about one support interval."""

    xi: np.ndarray
    y: np.ndarray
    x: np.ndarray
    f: np.ndarray
    dy: np.ndarray | None = None
    dx: np.ndarray | None = None
    df: np.ndarray | None = None


def _mp_bounds(xi: float | np.ndarray, g: GroupedSpectrum, c: float):
    """Proven root bounds: y in [sqrt(max(0, c S_min - d))/2, sqrt(c S - d) + 1].

    d is the squared distance to the nearest cluster and S_min the weight
    mass tied at that distance.
    """
    xi = np.atleast_1d(np.asarray(xi, dtype=np.float64))
    W = g.w * g.t**2
    d2 = (g.t[None, :] - xi[:, None]) ** 2
    delta = d2.min(axis=1)
    s_min = np.where(d2 == delta[:, None], W[None, :], 0.0).sum(axis=1)
    lo = 0.5 * np.sqrt(np.maximum(0.0, c * s_min - delta))
    hi = np.sqrt(np.maximum(0.0, c * float(W.sum()) - delta)) + 1.0
    return lo, hi


def solve_mp_at(xi: float, g: GroupedSpectrum, c: float) -> float:
    """Root y > 0 of Gamma at one interior grid point, via the zero finder."""
    W = g.w * g.t**2
    d2 = (g.t - xi) ** 2
    one_c = 1.0 / c

    def gamma(y: float) -> float:
        return float(np.sum(W / (d2 + y * y)) - one_c)

    lo_a, hi_a = _mp_bounds(xi, g, c)
    lo, hi = float(lo_a[0]), float(hi_a[0])
    with np.errstate(divide="ignore"):
        f_lo = gamma(lo)
    if f_lo <= 0:
        raise NumericalError(
            f"Gamma lower bound violated at xi={xi!r}: the point is not interior"
        )
    f_hi = gamma(hi)
    return float(find_zero(gamma, Bracket(lo, hi, f_lo, f_hi)))


def _solve_mp_batch(xis: np.ndarray, g: GroupedSpectrum, c: float) -> np.ndarray:
    """Roots at all interior points of one interval at once.

    Substituting v = y^2 makes Gamma convex and strictly decreasing in v,
    so Newton from the proven upper bound converges monotonically after
    the first step; iterates are clamped at the proven lower bound.
    Residuals are verified against the shared tolerance, with a per-point
    zero-finder fallback.
    """
    if xis.size == 0:
        return np.zeros(0)
    W = g.w * g.t**2
    one_c = 1.0 / c
    d2 = (g.t[None, :] - xis[:, None]) ** 2
    lo, hi = _mp_bounds(xis, g, c)
    v_lo = lo**2
    v = hi**2
    for _ in range(200):
        A = d2 + v[:, None]
        G = (W / A).sum(axis=1) - one_c
        Gp = -(W / A**2).sum(axis=1)
        v_new = np.maximum(v - G / Gp, v_lo)
        done = np.abs(v_new - v) <= 1e-15 * np.maximum(v_new, 1e-300)
        v = v_new
        if done.all():
            break
    y = np.sqrt(v)
    resid = np.abs((W[None, :] / (d2 + v[:, None])).sum(axis=1) - one_c)
    bad = resid > GAMMA_RESIDUAL_TOL
    if np.any(bad):
        for idx in np.flatnonzero(bad):
            y[idx] = solve_mp_at(float(xis[idx]), g, c)
        resid = np.abs((W[None, :] / (d2 + (y**2)[:, None])).sum(axis=1) - one_c)
        if np.any(resid > GAMMA_RESIDUAL_TOL):
            raise NumericalError("Marchenko-Pastur residual above tolerance")
    return y


def _map_batch(z: np.ndarray, tau: np.ndarray, c: float):
    """Map u-space solutions to density points (x, f); returns m(z) too."""
    p = tau.size
    positive = tau[tau > 0]
    resolvent = positive[None, :] - z[:, None]
    mlh = (positive[None, :] / resolvent).sum(axis=1) / p
    val = z - c * z * mlh
    tol = 1e-8 * max(1.0, float(tau[-1]))
    if np.max(np.abs(val.imag)) > tol:
        raise NumericalError(
            f"density mapping off the MP solution manifold "
            f"(|Im| = {np.max(np.abs(val.imag))!r})"
        )
    x = val.real
    xi, y = z.real, z.imag
    with np.errstate(invalid="ignore", divide="ignore"):
        f = np.where(y > 0, y / (xi**2 + y**2), 0.0) / (c * np.pi)
    return x, f, mlh


def map_to_density(z: complex, spec: PopulationSpectrum, c: float | None = None) -> tuple[float, float]:
    """Single-point version of the u-space to (x, f) mapping."""
    c = spec.c if c is None else c
    x, f, _ = _map_batch(np.atleast_1d(np.asarray(z, dtype=np.complex128)), spec.tau, c)
    return float(x[0]), float(f[0])


def density_curve(
    grid: IntervalGrid,
    g: GroupedSpectrum,
    spec: PopulationSpectrum,
    c: float,
    with_jacobian: bool = True,
) -> DensityCurve:
    """Solve the MP equation on one interval grid and map to (x, f).

    With ``with_jacobian`` the full chain of partial derivatives with
    respect to the raw eigenvalues is assembled: dy by implicit
    differentiation of Gamma (plus the moving-grid term), then dz, dm,
    dx and df.  Endpoint rows are governed by the support Jacobian
    (y = 0, dy = 0 there) and carry df = 0 since the density is pinned
    at zero on the boundary.
    """
    xi = grid.xi
    m = xi.size
    tau = spec.tau
    p = tau.size

    y = np.zeros(m)
    y[1:-1] = _solve_mp_batch(xi[1:-1], g, c)
    z = xi + 1j * y
    x, f, mlh = _map_batch(z, tau, c)
    f[0] = 0.0
    f[-1] = 0.0
    if np.any(np.diff(x) <= 0):
        raise NumericalError(
            "density abscissae are not strictly increasing along the interval"
        )
    if not with_jacobian:
        return DensityCurve(xi=xi, y=y, x=x, f=f)

    if grid.jacobian is None:
        raise NumericalError("grid Jacobian required to differentiate the density")
    dxi = grid.jacobian
    diff = tau[None, :] - xi[:, None]
    D = diff**2 + (y**2)[:, None]
    with np.errstate(invalid="ignore", divide="ignore"):
        s_y = ((tau**2)[None, :] * y[:, None] / D**2).sum(axis=1)
        dy_fixed_grid = (tau[None, :] / D - (tau**2)[None, :] * diff / D**2) / s_y[:, None]
        dy_dxi = ((tau**2)[None, :] * diff / D**2).sum(axis=1) / s_y
        dy = dy_fixed_grid + dy_dxi[:, None] * dxi
    dy[0] = 0.0
    dy[-1] = 0.0
    dz = dxi + 1j * dy

    res = tau[None, :] - z[:, None]
    with np.errstate(invalid="ignore", divide="ignore"):
        dm_dz = (tau[None, :] / res**2).sum(axis=1) / p
        dm = -z[:, None] / (p * res**2) + dm_dz[:, None] * dz
        dx = (dz * (1.0 - c * mlh[:, None]) - c * z[:, None] * dm).real
        df = (dz / (z**2)[:, None]).imag / (c * np.pi)
    df[0] = 0.0
    df[-1] = 0.0
    if not (np.all(np.isfinite(dy)) and np.all(np.isfinite(dx)) and np.all(np.isfinite(df))):
        raise NumericalError("non-finite density derivatives")
    return DensityCurve(xi=xi, y=y, x=x, f=f, dy=dy, dx=dx, df=df)
