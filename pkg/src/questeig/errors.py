"""Exception types shared by the numerical pipeline."""


class QuestError(Exception):
    """Base class for all numerical failures in this package.

    Once an error has propagated through the top-level driver, its
    ``stage`` attribute names the pipeline stage that raised it.
    """

    stage: str | None = None


class SpectrumError(QuestError):
    """Invalid or degenerate population spectrum."""


class BracketError(QuestError):
    """A root bracket without a sign change."""


class ConvergenceError(QuestError):
    """Iteration budget exhausted; ``best`` carries the best iterate seen."""

    def __init__(self, message: str, best: float | None = None):
        super().__init__(message)
        self.best = best


class PoleError(QuestError):
    """Evaluation requested exactly at a pole of the spectral function."""


class NumericalError(QuestError):
    """An internal numerical guarantee was violated."""
