"""The QuEST function: population eigenvalues to limiting sample eigenvalues.

Composes the six stages (grouping, support, grid, MP solutions, CDF,
quantization) into a single deterministic map and assembles the full
p x p analytic Jacobian alongside.  A central finite-difference Jacobian
is provided as a test oracle; it flags columns whose perturbations change
the support topology, where one-sided derivatives are unreliable.
"""
from __future__ import annotations

from contextlib import contextmanager
from dataclasses import dataclass, replace

import numpy as np

from .cdf import cdf_jacobian, integrate_cdf, quantize, quantize_jacobian, zero_atom
from .density import DensityCurve, density_curve
from .errors import QuestError
from .grid import build_grid, build_grid_with_jacobian
from .spectrum import DEFAULT_GROUP_TOL, GroupedSpectrum, PopulationSpectrum, group_spectrum
from .support import Support, find_support, support_jacobian


@dataclass(frozen=True)
class QuestOutput:
    """Quantized sample eigenvalues with diagnostics.

    ``lam`` is ascending with exactly max(p - n, #zero tau) leading
    zeros.  ``jacobian`` (when requested) is d lambda_kappa / d tau_k
    with tau in ascending order.  ``x_intervals`` gives the support of
    the limiting distribution on the real axis, one (lo, hi) row per
    u-space interval.
    """

    lam: np.ndarray
    jacobian: np.ndarray | None
    support: Support
    x_intervals: np.ndarray
    grouped: GroupedSpectrum
    zero_atom: int
    joint_atom: bool


@contextmanager
def _stage(name: str):
    try:
        yield
    except QuestError as err:
        if err.stage is None:
            err.stage = name
        raise


def quest(
    spec: PopulationSpectrum,
    with_jacobian: bool = True,
    group_tol: float = DEFAULT_GROUP_TOL,
) -> QuestOutput:
    """Evaluate the QuEST function (and optionally its Jacobian) at ``spec``.

    Deterministic: no randomness anywhere in the pipeline, so equal
    inputs give bit-identical outputs.
    """
    p, n, c = spec.p, spec.n, spec.c
    with _stage("grouping"):
        g = group_spectrum(spec, rel_tol=group_tol)
    with _stage("support"):
        supp = find_support(g, c)
        supp_jac = support_jacobian(supp, spec) if with_jacobian else None
    curves: list[DensityCurve] = []
    for i in range(supp.nu):
        with _stage("grid"):
            grid = (
                build_grid_with_jacobian(supp, i, supp_jac)
                if with_jacobian
                else build_grid(supp, i)
            )
        with _stage("density"):
            curves.append(density_curve(grid, g, spec, c, with_jacobian=with_jacobian))
    with _stage("cdf"):
        cdfs = integrate_cdf(curves, supp, p, n, g.zero_count)
        if with_jacobian:
            cdfs = [
                replace(cdf, dF=cdf_jacobian(curve, cdf))
                for curve, cdf in zip(curves, cdfs)
            ]
    with _stage("quantize"):
        lam = quantize(curves, cdfs, supp, p)
        jac = quantize_jacobian(curves, cdfs, supp, p) if with_jacobian else None
    x_intervals = np.array([[c_.x[0], c_.x[-1]] for c_ in curves])
    atom = zero_atom(p, n, g.zero_count)
    return QuestOutput(
        lam=lam,
        jacobian=jac,
        support=supp,
        x_intervals=x_intervals,
        grouped=g,
        zero_atom=atom,
        joint_atom=(p > n and g.zero_count > 0),
    )


@dataclass(frozen=True)
class FdJacobian:
    """Central-difference Jacobian with support-change flags per column."""

    jacobian: np.ndarray
    flagged: np.ndarray  # True where the perturbations changed nu


def quest_fd_jacobian(
    spec: PopulationSpectrum, h: float, relative: bool = False
) -> FdJacobian:
    """Finite-difference oracle for the analytic Jacobian.

    Column k perturbs tau_k by +/- h (or +/- h * tau_k with ``relative``);
    a one-sided difference is used when tau_k - h would be negative.
    Columns whose perturbations change the number of support intervals
    are flagged: the Jacobian jumps at support splits, so differences
    across one are meaningless.
    """
    tau = spec.tau
    p = spec.p
    base = quest(spec, with_jacobian=False)
    J = np.zeros((p, p))
    flagged = np.zeros(p, dtype=bool)
    for k in range(p):
        hk = h * tau[k] if relative else h
        if hk <= 0:
            hk = h if h > 0 else 1e-8
        plus = tau.copy()
        plus[k] += hk
        out_plus = quest(PopulationSpectrum.from_values(plus, spec.n), with_jacobian=False)
        if tau[k] - hk >= 0:
            minus = tau.copy()
            minus[k] -= hk
            out_minus = quest(
                PopulationSpectrum.from_values(minus, spec.n), with_jacobian=False
            )
            J[:, k] = (out_plus.lam - out_minus.lam) / (2.0 * hk)
            flagged[k] = out_plus.support.nu != out_minus.support.nu
        else:
            J[:, k] = (out_plus.lam - base.lam) / hk
            flagged[k] = out_plus.support.nu != base.support.nu
    return FdJacobian(jacobian=J, flagged=flagged)
