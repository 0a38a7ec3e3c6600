"""CDF assembly and quantization into sample eigenvalues.

The density over each support interval is integrated by the trapezoid
rule and then renormalized affinely so the interval carries exactly its
share counts_i / p of probability mass (the share each interval holds is
an exact-separation fact, not a numerical outcome).  The resulting
piecewise-linear CDF is inverted analytically and averaged over the
quantile slices ((kappa-1)/p, kappa/p] to produce the p quantized sample
eigenvalues; the same chain is differentiated term by term so the
Jacobian matches the value computation exactly.

The atom at zero absorbs max(p - n, #zero eigenvalues) of the smallest
sample eigenvalues; the corresponding Jacobian rows vanish.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .density import DensityCurve
from .errors import NumericalError
from .support import Support


@dataclass(frozen=True)
class CdfCurve:
    """Renormalized CDF values over one support interval.

    ``base`` and ``top`` are the exact rational masses below and up to
    the interval; they are constants in tau, so the endpoint rows of the
    Jacobian are identically zero.
    """

    F: np.ndarray
    F_raw: np.ndarray
    base: float
    top: float
    dF: np.ndarray | None = None


def zero_atom(p: int, n: int, zero_count: int) -> int:
    """Number of sample eigenvalues pinned at zero."""
    return max(0, p - n, zero_count)


def integrate_cdf(
    curves: list[DensityCurve], supp: Support, p: int, n: int, zero_count: int
) -> list[CdfCurve]:
    """Trapezoid CDF per interval, renormalized to the exact interval mass."""
    atom = zero_atom(p, n, zero_count)
    cum = np.cumsum(supp.counts)
    if supp.counts[0] < atom:
        raise NumericalError(
            "first support interval carries fewer eigenvalues than the zero atom"
        )
    out = []
    for i, curve in enumerate(curves):
        base = (atom if i == 0 else int(cum[i - 1])) / p
        top = int(cum[i]) / p
        seg = 0.5 * np.diff(curve.x) * (curve.f[:-1] + curve.f[1:])
        F_raw = base + np.concatenate([[0.0], np.cumsum(seg)])
        raw_mass = F_raw[-1] - base
        if raw_mass <= 0:
            raise NumericalError(f"degenerate interval {i}: zero raw CDF mass")
        F = base + (F_raw - base) * ((top - base) / raw_mass)
        F[0] = base
        F[-1] = top
        out.append(CdfCurve(F=F, F_raw=F_raw, base=base, top=top))
    return out


def cdf_jacobian(curve: DensityCurve, cdf: CdfCurve) -> np.ndarray:
    """Differentiate the trapezoid sums and the affine renormalization.

    The interval masses base/top are constants, so the quotient rule
    applies only through the raw trapezoid values; endpoint rows are
    exactly zero.
    """
    if curve.dx is None or curve.df is None:
        raise NumericalError("density Jacobians required for the CDF Jacobian")
    x, f, dx, df = curve.x, curve.f, curve.dx, curve.df
    seg = 0.5 * (
        (dx[1:] - dx[:-1]) * (f[:-1] + f[1:])[:, None]
        + np.diff(x)[:, None] * (df[:-1] + df[1:])
    )
    dF_raw = np.concatenate([np.zeros((1, dx.shape[1])), np.cumsum(seg, axis=0)])
    raw_mass = cdf.F_raw[-1] - cdf.base
    mass = cdf.top - cdf.base
    dF = (mass / raw_mass) * dF_raw - (mass / raw_mass**2) * (
        (cdf.F_raw - cdf.base)[:, None] * dF_raw[-1][None, :]
    )
    dF[0] = 0.0
    dF[-1] = 0.0
    return dF


def _segment_index(F: np.ndarray, vs: np.ndarray) -> np.ndarray:
    """Largest j with F[j] <= v, clipped so segment j has positive width."""
    return np.clip(np.searchsorted(F, vs, side="right") - 1, 0, F.size - 2)


def _quantile_integral(F: np.ndarray, x: np.ndarray, vs: np.ndarray) -> np.ndarray:
    """Integral of the piecewise-linear inverse CDF from F[0] up to each v."""
    cum = np.concatenate([[0.0], np.cumsum(np.diff(F) * (x[:-1] + x[1:]) / 2.0)])
    j = _segment_index(F, vs)
    a = vs - F[j]
    width = F[j + 1] - F[j]
    return cum[j] + a * x[j] + a * a / (2.0 * width) * (x[j + 1] - x[j])


def _quantile_integral_jacobian(
    F: np.ndarray, x: np.ndarray, dF: np.ndarray, dx: np.ndarray, vs: np.ndarray
) -> np.ndarray:
    """tau-derivative of :func:`_quantile_integral` at each v (v held fixed)."""
    seg = 0.5 * (
        (dF[1:] - dF[:-1]) * (x[:-1] + x[1:])[:, None]
        + np.diff(F)[:, None] * (dx[:-1] + dx[1:])
    )
    dcum = np.concatenate([np.zeros((1, dx.shape[1])), np.cumsum(seg, axis=0)])
    j = _segment_index(F, vs)
    a = (vs - F[j])[:, None]
    width = (F[j + 1] - F[j])[:, None]
    step = (x[j + 1] - x[j])[:, None]
    return (
        dcum[j]
        + a * dx[j]
        - x[j][:, None] * dF[j]
        - (a / width) * step * dF[j]
        + (a * a / (2.0 * width)) * (dx[j + 1] - dx[j])
        - (a * a / (2.0 * width**2)) * step * (dF[j + 1] - dF[j])
    )


def _kappa_range(cdfs: list[CdfCurve], i: int, p: int) -> tuple[int, int]:
    """Quantization indices served by interval i: kappa in (k0, k1]."""
    k0 = int(round(p * cdfs[i].base))
    k1 = int(round(p * cdfs[i].top))
    return k0, k1


def quantize(
    curves: list[DensityCurve], cdfs: list[CdfCurve], supp: Support, p: int
) -> np.ndarray:
    """All p sample eigenvalues, ascending; atom entries are exact zeros.

    lambda_kappa = p * [X(kappa/p) - X((kappa-1)/p)] with X the
    antiderivative of the piecewise-linear inverse CDF, i.e. each
    eigenvalue is the average of the inverse CDF over its quantile slice.
    """
    lam = np.zeros(p)
    prev_hi = -np.inf
    for i, (curve, cdf) in enumerate(zip(curves, cdfs)):
        if curve.x[0] <= prev_hi:
            raise NumericalError("density intervals out of order in x")
        prev_hi = curve.x[-1]
        k0, k1 = _kappa_range(cdfs, i, p)
        if k1 <= k0:
            continue
        vs = np.arange(k0, k1 + 1) / p
        X = _quantile_integral(cdf.F, curve.x, vs)
        lam[k0:k1] = p * np.diff(X)
    if np.any(np.diff(lam) < 0):
        raise NumericalError("quantized eigenvalues are not ascending")
    return lam


def quantize_jacobian(
    curves: list[DensityCurve], cdfs: list[CdfCurve], supp: Support, p: int
) -> np.ndarray:
    """The p x p matrix d lambda_kappa / d tau_k; zero rows for the atom."""
    J = np.zeros((p, p))
    for i, (curve, cdf) in enumerate(zip(curves, cdfs)):
        if cdf.dF is None:
            raise NumericalError("CDF Jacobian required for quantization Jacobian")
        k0, k1 = _kappa_range(cdfs, i, p)
        if k1 <= k0:
            continue
        vs = np.arange(k0, k1 + 1) / p
        dX = _quantile_integral_jacobian(cdf.F, curve.x, cdf.dF, curve.dx, vs)
        J[k0:k1] = p * np.diff(dX, axis=0)
    return J
