"""Monte Carlo harness for the convergence study.

For each (dimension, repetition) pair: build the deterministic population
spectrum, draw a sample covariance matrix, recover the population
eigenvalues by inversion, and record the normalized mean squared error

    NMSE = mean((tau_hat - tau)^2) / mean(tau)^2,

which is exactly scale invariant.  Every repetition owns a counter-based
random stream derived from the master seed and its (p, rep) coordinates,
so results do not depend on execution order or thread count.
"""
from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .invert import InversionResult, InvertOptions, invert
from .shapes import ShapeSpec, population_from_shape

DISTRIBUTIONS = ("gaussian", "student5", "coin", "exponential")


def sample_eigenvalues(tau, n: int, distribution: str, seed) -> np.ndarray:
    """Eigenvalues (ascending) of one simulated sample covariance matrix.

    Variates are i.i.d. standardized (mean 0, variance 1); the covariance
    square root is diagonal, diag(sqrt(tau)) -- rotation equivariance of
    everything downstream makes a random basis statistically irrelevant.
    The divisor is n, matching the c = p/n asymptotics.
    """
    tau = np.asarray(tau, dtype=np.float64)
    p = tau.size
    rng = np.random.Generator(np.random.Philox(seed))
    if distribution == "gaussian":
        draws = rng.standard_normal((n, p))
    elif distribution == "student5":
        draws = rng.standard_t(5, size=(n, p)) * np.sqrt(3.0 / 5.0)
    elif distribution == "coin":
        draws = rng.integers(0, 2, size=(n, p)).astype(np.float64) * 2.0 - 1.0
    elif distribution == "exponential":
        draws = rng.standard_exponential((n, p)) - 1.0
    else:
        raise ValueError(f"unknown distribution {distribution!r}; expected one of {DISTRIBUTIONS}")
    Y = draws * np.sqrt(tau)[None, :]
    sample = Y.T @ Y / n
    vals = np.linalg.eigvalsh(sample)
    return np.maximum(vals, 0.0)


def nmse(tau_hat, tau) -> float:
    """Normalized mean squared error between spectra of equal length."""
    tau_hat = np.asarray(tau_hat, dtype=np.float64)
    tau = np.asarray(tau, dtype=np.float64)
    return float(np.mean((tau_hat - tau) ** 2) / np.mean(tau) ** 2)


@dataclass(frozen=True)
class SimulationRecord:
    shape: str
    distribution: str
    p: int
    n: int
    rep: int
    seed: int
    nmse: float
    seconds: float
    converged: bool


@dataclass(frozen=True)
class SimulationConfig:
    shape: ShapeSpec
    distribution: str
    dims: tuple[int, ...]
    reps: int
    concentration: float
    seed: int
    threads: int = 1
    invert_options: InvertOptions = field(default_factory=InvertOptions)

    def n_for(self, p: int) -> int:
        return max(1, round(p / self.concentration))


@dataclass(frozen=True)
class SimulationSummary:
    """Mean NMSE per dimension and the fitted log-log slope."""

    dims: tuple[int, ...]
    mean_nmse: tuple[float, ...]
    reps_used: tuple[int, ...]
    slope: float


def _run_one(config: SimulationConfig, p: int, rep: int) -> SimulationRecord:
    n = config.n_for(p)
    tau = population_from_shape(config.shape, p)
    stream = np.random.SeedSequence(entropy=config.seed, spawn_key=(p, rep))
    lam = sample_eigenvalues(tau, n, config.distribution, stream)
    start = time.perf_counter()
    result: InversionResult = invert(lam, n, config.invert_options)
    elapsed = time.perf_counter() - start
    return SimulationRecord(
        shape=config.shape.kind,
        distribution=config.distribution,
        p=p,
        n=n,
        rep=rep,
        seed=config.seed,
        nmse=nmse(result.tau_hat, tau),
        seconds=elapsed,
        converged=result.converged,
    )


def run_convergence(config: SimulationConfig):
    """All (p, rep) records plus the per-dimension summary."""
    tasks = [(p, rep) for p in config.dims for rep in range(config.reps)]
    if config.threads > 1:
        with ThreadPoolExecutor(max_workers=config.threads) as pool:
            records = list(pool.map(lambda t: _run_one(config, *t), tasks))
    else:
        records = [_run_one(config, *t) for t in tasks]
    records.sort(key=lambda r: (r.p, r.rep))

    means, used = [], []
    for p in config.dims:
        vals = [r.nmse for r in records if r.p == p and np.isfinite(r.nmse)]
        used.append(len(vals))
        means.append(float(np.mean(vals)) if vals else float("nan"))
    if len(config.dims) >= 2 and all(np.isfinite(means)) and all(m > 0 for m in means):
        slope = float(np.polyfit(np.log(config.dims), np.log(means), 1)[0])
    else:
        slope = float("nan")
    summary = SimulationSummary(
        dims=tuple(config.dims),
        mean_nmse=tuple(means),
        reps_used=tuple(used),
        slope=slope,
    )
    return records, summary
