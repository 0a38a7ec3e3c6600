"""Support of the limiting sample spectral distribution, in u-space.

The limiting distribution is analyzed in the coordinate
``u = -1/m(z)`` where ``m`` is the Stieltjes transform of the companion
distribution.  In that coordinate the support is delimited by the level
set ``phi(u) = 1/c`` of

    phi(u) = sum_k w_k t_k^2 / (t_k - u)^2,

where (t_k, w_k) are the grouped nonzero population eigenvalues: the
spectrum splits between adjacent clusters t_k < t_{k+1} exactly when phi
dips below 1/c somewhere in the gap.  All root brackets used here are
proven, so a bracket failure is an internal error rather than a
recoverable condition.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import NumericalError, PoleError
from .rootfind import Bracket, find_zero
from .spectrum import GroupedSpectrum, PopulationSpectrum


@dataclass(frozen=True)
class Support:
    """Support intervals in u-space.

    ``endpoints`` holds u_1 < ... < u_{2*nu}; interval i is
    [endpoints[2i], endpoints[2i+1]].  ``counts`` gives the number of
    population eigenvalues carried by each interval (zeros are folded
    into the first interval) and sums to p.  ``endpoint_jacobian`` is the
    (2*nu, p) matrix of endpoint sensitivities to the raw eigenvalues,
    filled in by :func:`support_jacobian`.
    """

    endpoints: np.ndarray
    counts: np.ndarray
    endpoint_jacobian: np.ndarray | None = None

    def __post_init__(self):
        endpoints = np.ascontiguousarray(self.endpoints, dtype=np.float64)
        counts = np.ascontiguousarray(self.counts, dtype=np.int64)
        object.__setattr__(self, "endpoints", endpoints)
        object.__setattr__(self, "counts", counts)
        if endpoints.size != 2 * counts.size or counts.size < 1:
            raise NumericalError("support endpoints and counts are inconsistent")
        if np.any(np.diff(endpoints) <= 0):
            raise NumericalError("support endpoints must be strictly increasing")
        if np.any(counts <= 0):
            raise NumericalError("every support interval must carry eigenvalues")

    @property
    def nu(self) -> int:
        return self.counts.size

    def interval(self, i: int) -> tuple[float, float]:
        return float(self.endpoints[2 * i]), float(self.endpoints[2 * i + 1])


def phi(u: float, g: GroupedSpectrum) -> float:
    """sum_k w_k t_k^2 / (t_k - u)^2; strictly positive away from poles."""
    d = g.t - u
    if np.any(d == 0):
        raise PoleError(f"phi evaluated at a pole: u={u!r}")
    return float(np.sum(g.w * g.t**2 / d**2))


def phi_prime(u: float, g: GroupedSpectrum) -> float:
    """Derivative 2 * sum_k w_k t_k^2 / (t_k - u)^3."""
    d = g.t - u
    if np.any(d == 0):
        raise PoleError(f"phi_prime evaluated at a pole: u={u!r}")
    return float(2.0 * np.sum(g.w * g.t**2 / d**3))


def theta_minimizer(k: int, g: GroupedSpectrum) -> float:
    """Minimizer in (t_k, t_{k+1}) of the two adjacent pole terms of phi.

    ``k`` is the 0-based gap index between clusters k and k+1.  The
    closed form comes from balancing the cubes of the two pole distances.
    """
    if not 0 <= k < g.K - 1:
        raise IndexError(f"gap index {k} out of range for K={g.K}")
    tk, tk1 = g.t[k], g.t[k + 1]
    wk, wk1 = g.w[k], g.w[k + 1]
    num = wk ** (1 / 3) * tk1 ** (1 / 3) + wk1 ** (1 / 3) * tk ** (1 / 3)
    den = wk ** (1 / 3) * tk ** (2 / 3) + wk1 ** (1 / 3) * tk1 ** (2 / 3)
    return float((tk * tk1) ** (2 / 3) * num / den)


def _necessary_bound(k: int, g: GroupedSpectrum, xhat: float) -> float:
    """Lower bound for phi on the gap (t_k, t_{k+1}).

    Adjacent pole terms are evaluated at their joint minimizer, terms left
    of the gap at t_{k+1} (where they are smallest), terms right of the
    gap at t_k.
    """
    t, w = g.t, g.w
    W = w * t**2
    lhs = W[k] / (t[k] - xhat) ** 2 + W[k + 1] / (t[k + 1] - xhat) ** 2
    if k > 0:
        lhs += float(np.sum(W[:k] / (t[:k] - t[k + 1]) ** 2))
    if k + 2 < g.K:
        lhs += float(np.sum(W[k + 2 :] / (t[k + 2 :] - t[k]) ** 2))
    return float(lhs)


def spectral_separation(k: int, g: GroupedSpectrum, c: float) -> float | None:
    """Test whether the support splits between clusters k and k+1.

    Returns the minimizer x*_k of phi over the gap when phi(x*_k) < 1/c,
    and None otherwise.  A cheap necessary condition screens out most
    gaps before the minimizer is located.
    """
    one_c = 1.0 / c
    xhat = theta_minimizer(k, g)
    if _necessary_bound(k, g, xhat) >= one_c:
        return None

    t, w = g.t, g.w
    W = w * t**2
    dphi = phi_prime(xhat, g)
    gap = t[k + 1] - t[k]
    nudge = 1e-12 * gap
    if dphi == 0.0:
        xstar = xhat
    else:
        if dphi < 0:
            # minimizer right of xhat; offset bound keeps clear of the pole
            denom = -2.0 * W[k] / (t[k] - xhat) ** 3 - dphi
            lo = xhat
            hi = t[k + 1] - (2.0 * W[k + 1] / denom) ** (1 / 3)
        else:
            denom = 2.0 * W[k + 1] / (t[k + 1] - xhat) ** 3 + dphi
            lo = t[k] + (2.0 * W[k] / denom) ** (1 / 3)
            hi = xhat
        lo = max(lo, t[k] + nudge)
        hi = min(hi, t[k + 1] - nudge)
        if not lo < hi:
            xstar = xhat
        else:
            f_lo = phi_prime(lo, g)
            f_hi = phi_prime(hi, g)
            if f_lo >= 0:
                xstar = lo
            elif f_hi <= 0:
                xstar = hi
            else:
                xstar = find_zero(lambda u: phi_prime(u, g), Bracket(lo, hi, f_lo, f_hi))
    return xstar if phi(xstar, g) < one_c else None


def _phi_crossing(g: GroupedSpectrum, one_c: float, lo: float, hi: float) -> float:
    """Zero of phi - 1/c on a proven sign-changing interval."""
    f = lambda u: phi(u, g) - one_c
    f_lo, f_hi = f(lo), f(hi)
    if not (f_lo > 0) != (f_hi > 0):
        raise NumericalError(
            f"support bracket lost its sign change on [{lo!r}, {hi!r}] "
            f"(f={f_lo!r}, {f_hi!r}); this should be impossible"
        )
    return find_zero(f, Bracket(lo, hi, f_lo, f_hi))


def find_support(g: GroupedSpectrum, c: float) -> Support:
    """Locate all u-space support intervals and their eigenvalue counts."""
    t, w = g.t, g.w
    W = w * t**2
    one_c = 1.0 / c
    S = float(W.sum())

    separations: list[tuple[int, float]] = []
    for k in range(g.K - 1):
        xstar = spectral_separation(k, g, c)
        if xstar is not None:
            separations.append((k, xstar))

    # global minimum of the support, below t_1
    lo = t[0] - np.sqrt(c * S) - 1.0
    hi = t[0] - np.sqrt(c * W[0]) / 2.0
    u_first = _phi_crossing(g, one_c, lo, hi)
    # global maximum, above t_K
    lo = t[-1] + np.sqrt(c * W[-1]) / 2.0
    hi = t[-1] + np.sqrt(c * S) + 1.0
    u_last = _phi_crossing(g, one_c, lo, hi)

    endpoints = [u_first]
    for k, xs in separations:
        phix = phi(xs, g)
        gap_lo, gap_hi = t[k], t[k + 1]
        nudge = 1e-12 * (gap_hi - gap_lo)
        # close of the current interval, in (t_k, x*)
        d_lo = (
            W[k] / (gap_lo - xs) ** 2
            + (one_c - phix)
            + float(np.sum(W[k + 1 :] / (t[k + 1 :] - xs) ** 2))
            - float(np.sum(W[k + 1 :] / (t[k + 1 :] - gap_lo) ** 2))
        )
        x_lo = max(gap_lo + np.sqrt(W[k] / d_lo), gap_lo + nudge)
        endpoints.append(_phi_crossing(g, one_c, x_lo, xs))
        # open of the next interval, in (x*, t_{k+1})
        d_hi = (
            W[k + 1] / (gap_hi - xs) ** 2
            + (one_c - phix)
            + float(np.sum(W[: k + 1] / (t[: k + 1] - xs) ** 2))
            - float(np.sum(W[: k + 1] / (t[: k + 1] - gap_hi) ** 2))
        )
        x_hi = min(gap_hi - np.sqrt(W[k + 1] / d_hi), gap_hi - nudge)
        endpoints.append(_phi_crossing(g, one_c, xs, x_hi))
    endpoints.append(u_last)

    # eigenvalue counts per interval; the zero atom rides with interval 1
    bounds = [k for k, _ in separations]
    starts = [0] + [k + 1 for k in bounds]
    stops = bounds + [g.K - 1]
    counts = np.array(
        [int(g.counts[a : b + 1].sum()) for a, b in zip(starts, stops)], dtype=np.int64
    )
    counts[0] += g.zero_count
    return Support(endpoints=np.array(endpoints), counts=counts)


def support_jacobian(supp: Support, spec: PopulationSpectrum) -> np.ndarray:
    """Sensitivities (2*nu, p) of the endpoints to the raw eigenvalues.

    Implicit differentiation of phi(u) = 1/c written over the raw
    spectrum gives row i, column k as
    [tau_k u_i / (tau_k - u_i)^3] / [sum_j tau_j^2 / (tau_j - u_i)^3];
    columns for zero eigenvalues vanish identically.
    """
    tau = spec.tau
    u = supp.endpoints
    diff = tau[None, :] - u[:, None]
    if np.any(diff == 0):
        raise PoleError("a support endpoint coincides with a population eigenvalue")
    cube = diff**3
    denom = (tau**2 / cube).sum(axis=1)
    if np.any(denom == 0) or not np.all(np.isfinite(denom)):
        raise NumericalError("degenerate support: endpoint sensitivity undefined")
    return (tau[None, :] * u[:, None] / cube) / denom[:, None]


def with_jacobian(supp: Support, spec: PopulationSpectrum) -> Support:
    """Return a copy of ``supp`` carrying its endpoint Jacobian."""
    return replace(supp, endpoint_jacobian=support_jacobian(supp, spec))
