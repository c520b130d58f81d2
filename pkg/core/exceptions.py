"""Exception hierarchy for the detector.

Instance errors derive from ``Exception`` rather than ``ValueError`` so they
pass through pydantic validators unchanged.
"""

from typing import Optional


class EntrywiseError(Exception):
    """Base class for all library errors."""


class InstanceError(EntrywiseError):
    """An observation set or ground truth breaks a data invariant."""


class DimensionMismatchError(InstanceError):
    """Shapes of related objects disagree."""


class IndexOutOfRangeError(InstanceError):
    """A row or column index lies outside the matrix."""


class DuplicateEntryError(InstanceError):
    """The same (row, column) pair was observed twice."""


class NegativeCountError(InstanceError):
    """A count is negative or not an integer."""


class EmptyObservationsError(InstanceError):
    """An operation needs at least one observed entry."""


class ParameterError(EntrywiseError):
    """A numerical parameter lies outside its admissible range."""


class ConfigError(EntrywiseError):
    """A configuration file, identifier or path is unusable."""


class ConvergenceError(EntrywiseError):
    """An iterative kernel stopped at its cap without meeting tolerance."""

    def __init__(self, message: str, iterations: int, residual: Optional[float] = None):
        super().__init__(f"{message} (iterations={iterations}, residual={residual:.3e})"
                         if residual is not None else f"{message} (iterations={iterations})")
        self.iterations = iterations
        self.residual = residual
