"""Shared oracles for the test suite.

These deliberately avoid the library's own code paths: closed forms for
the single-cluster (Marchenko-Pastur) case, a brute-force sign scan for
support endpoints, and plain central finite differences for Jacobians.
"""
from __future__ import annotations

import numpy as np


def mp_edges(t: float, c: float) -> tuple[float, float]:
    """Support edges of the limiting density for tau = t * ones, on the x axis."""
    return t * (1 - np.sqrt(c)) ** 2, t * (1 + np.sqrt(c)) ** 2


def mp_density(x, t: float, c: float):
    """Closed-form limiting density for tau = t * ones (c < 1)."""
    x = np.asarray(x, dtype=np.float64)
    a, b = mp_edges(t, c)
    inside = (x > a) & (x < b)
    out = np.zeros_like(x)
    xi = x[inside]
    out[inside] = np.sqrt((b - xi) * (xi - a)) / (2 * np.pi * c * xi * t)
    return out


def phi_direct(u, t, w):
    """Independent evaluation of the gap function sum w t^2/(t-u)^2."""
    u = np.asarray(u, dtype=np.float64)
    t = np.asarray(t, dtype=np.float64)
    w = np.asarray(w, dtype=np.float64)
    d = t[None, :] - u[..., None]
    with np.errstate(divide="ignore"):
        return (w * t**2 / d**2).sum(axis=-1)


def scan_support(t, w, c, n_points=400_001) -> np.ndarray:
    """Brute-force support endpoints: sign scan of phi - 1/c plus bisection."""
    t = np.asarray(t, dtype=np.float64)
    w = np.asarray(w, dtype=np.float64)
    big = np.sqrt(c * np.sum(w * t**2))
    lo, hi = t[0] - big - 2.0, t[-1] + big + 2.0
    us = np.linspace(lo, hi, n_points)
    vals = phi_direct(us, t, w) - 1.0 / c
    # grid points that happen to be exact roots count as crossings too
    roots = [float(us[i]) for i in np.flatnonzero(vals == 0.0)]
    idx = np.flatnonzero(vals[:-1] * vals[1:] < 0)
    for i in idx:
        a, b = us[i], us[i + 1]
        fa = phi_direct(a, t, w) - 1.0 / c
        for _ in range(200):
            m = 0.5 * (a + b)
            fm = phi_direct(m, t, w) - 1.0 / c
            if fa * fm <= 0:
                b = m
            else:
                a, fa = m, fm
            if b - a < 1e-13 * max(1.0, abs(m)):
                break
        roots.append(0.5 * (a + b))
    return np.array(sorted(roots))


def central_fd(func, x0, h):
    """Column-wise central differences of a vector-valued function."""
    x0 = np.asarray(x0, dtype=np.float64)
    cols = []
    for k in range(x0.size):
        hk = h[k] if np.ndim(h) else h
        xp = x0.copy()
        xp[k] += hk
        xm = x0.copy()
        xm[k] -= hk
        cols.append((func(xp) - func(xm)) / (2 * hk))
    return np.stack(cols, axis=-1)
