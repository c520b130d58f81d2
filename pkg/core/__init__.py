"""Core domain types, validation and instance files."""

from .exceptions import (
    ConfigError,
    ConvergenceError,
    DimensionMismatchError,
    DuplicateEntryError,
    EmptyObservationsError,
    EntrywiseError,
    IndexOutOfRangeError,
    InstanceError,
    NegativeCountError,
    ParameterError,
)
from .types import (
    AnomalyMask,
    DetectorConfig,
    GenerationSpec,
    ModelParams,
    SparseObservations,
    TheoreticalConstants,
    ThetaDomain,
    as_dense_matrix,
    as_rate_matrix,
)
from .instance import GroundTruth, Instance, validate_instance
from .instance_store import read_instance, write_instance

__all__ = [
    "AnomalyMask",
    "ConfigError",
    "ConvergenceError",
    "DetectorConfig",
    "DimensionMismatchError",
    "DuplicateEntryError",
    "EmptyObservationsError",
    "EntrywiseError",
    "GenerationSpec",
    "GroundTruth",
    "IndexOutOfRangeError",
    "Instance",
    "InstanceError",
    "ModelParams",
    "NegativeCountError",
    "ParameterError",
    "SparseObservations",
    "TheoreticalConstants",
    "ThetaDomain",
    "as_dense_matrix",
    "as_rate_matrix",
    "read_instance",
    "validate_instance",
    "write_instance",
]
