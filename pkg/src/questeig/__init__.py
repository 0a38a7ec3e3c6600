"""QuEST: the deterministic map from population to sample eigenvalue spectra
under large-dimensional asymptotics, its analytic Jacobian, and the
population-eigenvalue estimator obtained by inverting it numerically.
"""

from .errors import (
    BracketError,
    ConvergenceError,
    NumericalError,
    PoleError,
    QuestError,
    SpectrumError,
)
from .invert import InversionResult, InvertOptions, invert
from .pipeline import FdJacobian, QuestOutput, quest, quest_fd_jacobian
from .shapes import ShapeSpec, population_from_shape, shape_cdf, shape_quantile
from .simulate import (
    SimulationConfig,
    SimulationRecord,
    SimulationSummary,
    nmse,
    run_convergence,
    sample_eigenvalues,
)
from .spectrum import GroupedSpectrum, PopulationSpectrum, group_spectrum
from .support import Support, find_support, support_jacobian

__version__ = "0.1.0"

__all__ = [
    "BracketError",
    "ConvergenceError",
    "FdJacobian",
    "GroupedSpectrum",
    "InversionResult",
    "InvertOptions",
    "NumericalError",
    "PoleError",
    "PopulationSpectrum",
    "QuestError",
    "QuestOutput",
    "ShapeSpec",
    "SimulationConfig",
    "SimulationRecord",
    "SimulationSummary",
    "SpectrumError",
    "Support",
    "find_support",
    "group_spectrum",
    "invert",
    "nmse",
    "population_from_shape",
    "quest",
    "quest_fd_jacobian",
    "run_convergence",
    "sample_eigenvalues",
    "shape_cdf",
    "shape_quantile",
    "support_jacobian",
]
