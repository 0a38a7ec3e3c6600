"""Population spectrum shapes for the convergence study.

Four distributions on [0, 1] built from the Kumaraswamy(3, 1/3) family,
whose CDF and quantile function are both closed form:

  h1  left-skewed (the base shape),
  h2  right-skewed (mirror image; its CDF is the inverse of h1's),
  h3  symmetric bimodal (h2 behavior on [0, 1/2] glued to h1 on [1/2, 1]),
  h4  symmetric unimodal (the opposite gluing).

All four densities diverge at an edge, which makes them demanding test
cases.  Population eigenvalues are deterministic quantiles of
1 + (kappa - 1) X where kappa is the condition number.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

SHAPE_KINDS = ("h1", "h2", "h3", "h4")


@dataclass(frozen=True)
class ShapeSpec:
    kind: str
    condition_number: float

    def __post_init__(self):
        kind = self.kind.lower()
        if kind not in SHAPE_KINDS:
            raise ValueError(f"unknown shape kind {self.kind!r}; expected one of {SHAPE_KINDS}")
        object.__setattr__(self, "kind", kind)
        if not self.condition_number >= 1:
            raise ValueError("condition number must be >= 1")


def _check_unit(x: np.ndarray, what: str):
    if np.any(x < 0) or np.any(x > 1):
        raise ValueError(f"{what} outside [0, 1]")


def shape_cdf(kind: str, x) -> np.ndarray:
    """CDF of shape ``kind`` evaluated on [0, 1] (vectorized)."""
    x = np.asarray(x, dtype=np.float64)
    _check_unit(x, "cdf argument")
    if kind == "h1":
        return 1.0 - np.cbrt(1.0 - x**3)
    if kind == "h2":
        return np.cbrt(1.0 - (1.0 - x) ** 3)
    if kind == "h3":
        lower = 0.5 * np.cbrt(1.0 - (1.0 - 2.0 * x) ** 3)
        upper = 1.0 - 0.5 * np.cbrt(1.0 - (2.0 * x - 1.0) ** 3)
        return np.where(x <= 0.5, lower, upper)
    if kind == "h4":
        lower = 0.5 * (1.0 - np.cbrt(1.0 - (2.0 * x) ** 3))
        upper = 0.5 * (1.0 + np.cbrt(1.0 - (2.0 - 2.0 * x) ** 3))
        return np.where(x <= 0.5, lower, upper)
    raise ValueError(f"unknown shape kind {kind!r}")


def shape_quantile(kind: str, q) -> np.ndarray:
    """Exact inverse of :func:`shape_cdf` (closed form, vectorized)."""
    q = np.asarray(q, dtype=np.float64)
    _check_unit(q, "quantile argument")
    if kind == "h1":
        return np.cbrt(1.0 - (1.0 - q) ** 3)
    if kind == "h2":
        return 1.0 - np.cbrt(1.0 - q**3)
    if kind == "h3":
        lower = 0.5 * (1.0 - np.cbrt(1.0 - 8.0 * q**3))
        upper = 0.5 * (1.0 + np.cbrt(1.0 - 8.0 * (1.0 - q) ** 3))
        return np.where(q <= 0.5, lower, upper)
    if kind == "h4":
        lower = 0.5 * np.cbrt(1.0 - (1.0 - 2.0 * q) ** 3)
        upper = 1.0 - 0.5 * np.cbrt(1.0 - (2.0 * q - 1.0) ** 3)
        return np.where(q <= 0.5, lower, upper)
    raise ValueError(f"unknown shape kind {kind!r}")


def population_from_shape(shape: ShapeSpec, p: int) -> np.ndarray:
    """Deterministic spectrum: tau_i = 1 + (kappa - 1) H^{-1}((i - 1/2)/p)."""
    if p < 1:
        raise ValueError("p must be positive")
    q = (np.arange(1, p + 1) - 0.5) / p
    return 1.0 + (shape.condition_number - 1.0) * shape_quantile(shape.kind, q)
