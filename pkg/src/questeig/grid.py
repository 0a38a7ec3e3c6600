"""Arcsine grids covering the support intervals.

Each support interval [u_lo, u_hi] carrying ``count`` eigenvalues gets
count interior points plus the two endpoints, placed at quantiles of the
arcsine (Beta(1/2, 1/2)) distribution.  The density of the limiting
spectrum has square-root behavior at the edges, so coverage is densified
there.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .support import Support


@dataclass(frozen=True)
class IntervalGrid:
    """Grid points over one support interval, with optional sensitivities."""

    xi: np.ndarray
    jacobian: np.ndarray | None = None


def _arcsine_weights(count: int) -> np.ndarray:
    """sin^2(pi j / (2 (count+1))) for j = 0 .. count+1.

    Shared by the grid points and their Jacobian so both use bit-identical
    interpolation weights.
    """
    j = np.arange(count + 2)
    return np.sin(np.pi * j / (2.0 * (count + 1))) ** 2


def build_grid(supp: Support, i: int) -> IntervalGrid:
    """Arcsine grid over support interval ``i`` (0-based)."""
    lo, hi = supp.interval(i)
    s = _arcsine_weights(int(supp.counts[i]))
    return IntervalGrid(xi=lo + (hi - lo) * s)


def grid_jacobian(supp: Support, i: int, support_jac: np.ndarray) -> np.ndarray:
    """Rows interpolate the two endpoint-sensitivity rows with weight s_j."""
    s = _arcsine_weights(int(supp.counts[i]))[:, None]
    row_lo = support_jac[2 * i]
    row_hi = support_jac[2 * i + 1]
    return (1.0 - s) * row_lo[None, :] + s * row_hi[None, :]


def build_grid_with_jacobian(supp: Support, i: int, support_jac: np.ndarray) -> IntervalGrid:
    grid = build_grid(supp, i)
    return IntervalGrid(xi=grid.xi, jacobian=grid_jacobian(supp, i, support_jac))
