"""Population spectrum containers and eigenvalue grouping.

Every downstream stage consumes either the raw sorted eigenvalues
(:class:`PopulationSpectrum`) or their grouped form
(:class:`GroupedSpectrum`), where equal eigenvalues are merged into
clusters with weights and zeros are split off into a separate atom.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SpectrumError

# Inversion iterates produce near-duplicate eigenvalues that must merge
# stably, hence a relative tolerance rather than exact equality.
DEFAULT_GROUP_TOL = 1e-9


@dataclass(frozen=True)
class PopulationSpectrum:
    """Sorted nonnegative population eigenvalues with the sample size.

    ``tau`` has length ``p`` (the matrix dimension); ``n`` is the sample
    size; ``c = p/n`` is the concentration ratio held fixed by the
    large-dimensional asymptotics.
    """

    tau: np.ndarray
    n: int

    def __post_init__(self):
        tau = np.ascontiguousarray(self.tau, dtype=np.float64)
        object.__setattr__(self, "tau", tau)
        if tau.ndim != 1 or tau.size == 0:
            raise SpectrumError("tau must be a nonempty 1-D array")
        if not np.all(np.isfinite(tau)):
            raise SpectrumError("tau contains non-finite entries")
        if np.any(tau < 0):
            raise SpectrumError("tau contains negative eigenvalues")
        if np.any(np.diff(tau) < 0):
            raise SpectrumError("tau must be sorted ascending")
        if not (isinstance(self.n, (int, np.integer)) and self.n >= 1):
            raise SpectrumError("n must be a positive integer")
        object.__setattr__(self, "n", int(self.n))

    @classmethod
    def from_values(cls, values, n: int) -> "PopulationSpectrum":
        """Build a spectrum from unsorted values (sorts ascending)."""
        arr = np.sort(np.asarray(values, dtype=np.float64).ravel())
        return cls(arr, n)

    @property
    def p(self) -> int:
        return self.tau.size

    @property
    def c(self) -> float:
        return self.p / self.n


@dataclass(frozen=True)
class GroupedSpectrum:
    """Distinct positive eigenvalue clusters with multiplicities.

    ``t`` holds the K strictly increasing cluster values, ``counts`` the
    integer multiplicities, and ``zero_count`` the number of eigenvalues
    collapsed into the atom at zero.  Weights are exact rationals
    ``counts/p`` so that cluster bookkeeping never drifts.
    """

    t: np.ndarray
    counts: np.ndarray
    zero_count: int
    p: int

    def __post_init__(self):
        t = np.ascontiguousarray(self.t, dtype=np.float64)
        counts = np.ascontiguousarray(self.counts, dtype=np.int64)
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "counts", counts)
        if t.size == 0:
            raise SpectrumError("grouped spectrum needs at least one positive cluster")
        if np.any(t <= 0) or np.any(np.diff(t) <= 0):
            raise SpectrumError("cluster values must be strictly increasing and positive")
        if int(counts.sum()) + self.zero_count != self.p:
            raise SpectrumError("cluster counts plus zeros must equal p")

    @property
    def K(self) -> int:
        return self.t.size

    @property
    def w(self) -> np.ndarray:
        return self.counts / self.p

    @property
    def zero_weight(self) -> float:
        return self.zero_count / self.p

    def expand(self) -> np.ndarray:
        """Sorted eigenvalue vector that regroups to this object exactly."""
        return np.concatenate([np.zeros(self.zero_count), np.repeat(self.t, self.counts)])


def group_spectrum(spec: PopulationSpectrum, rel_tol: float = DEFAULT_GROUP_TOL) -> GroupedSpectrum:
    """Merge eigenvalues that agree within ``rel_tol * max(tau)``.

    Eigenvalues at or below the threshold are collected into the zero
    atom.  An all-zero spectrum is rejected: every downstream formula
    divides by the cluster values.
    """
    if rel_tol < 0:
        raise SpectrumError("rel_tol must be nonnegative")
    tau = spec.tau
    tmax = float(tau[-1])
    if tmax <= 0:
        raise SpectrumError("degenerate spectrum: all population eigenvalues are zero")
    thr = rel_tol * tmax
    nonzero = tau[tau > thr]
    zero_count = spec.p - nonzero.size
    # Split where consecutive gaps exceed the threshold.  The cluster
    # representative is the midpoint of its range: unlike the mean, it is
    # bit-stable under regrouping (identical values reproduce exactly).
    cuts = np.flatnonzero(np.diff(nonzero) > thr) + 1
    segments = np.split(nonzero, cuts)
    t = np.array([0.5 * (seg[0] + seg[-1]) for seg in segments])
    counts = np.array([seg.size for seg in segments], dtype=np.int64)
    return GroupedSpectrum(t=t, counts=counts, zero_count=int(zero_count), p=spec.p)
