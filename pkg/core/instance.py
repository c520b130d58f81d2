"""Problem instances: observations plus optional ground truth."""

from typing import Optional, Tuple, Union

import numpy as np

from .exceptions import DimensionMismatchError, InstanceError
from .types import (
    AnomalyMask,
    ArrayModel,
    GenerationSpec,
    ModelParams,
    RateMatrix,
    SparseObservations,
    as_rate_matrix,
)


class GroundTruth(ArrayModel):
    """Rates M*, anomaly positions B, θ* and the generating anomaly model."""

    rates: np.ndarray
    mask: AnomalyMask
    params: ModelParams
    anomaly_model: str = "exp-onset"


class Instance(ArrayModel):
    """A validated detection instance."""

    observations: SparseObservations
    truth: Optional[GroundTruth] = None
    spec: Optional[GenerationSpec] = None
    name: str = "instance"

    @property
    def shape(self) -> Tuple[int, int]:
        return self.observations.shape

    def require_truth(self) -> GroundTruth:
        """Get the ground truth or fail if the instance has none."""
        if self.truth is None:
            raise InstanceError(f"instance '{self.name}' carries no ground truth")
        return self.truth


TruthInput = Union[GroundTruth, Tuple[RateMatrix, AnomalyMask, ModelParams]]


def validate_instance(
    obs: SparseObservations,
    truth: Optional[TruthInput] = None,
    spec: Optional[GenerationSpec] = None,
    name: str = "instance",
) -> Instance:
    """Check every data invariant and return the instance.

    Raises the matching InstanceError subclass on dimension mismatch,
    out-of-range index, duplicate entry or negative count.
    """
    # Re-running the canonicalizer re-checks indices, duplicates and counts.
    checked = SparseObservations(n=obs.n, m=obs.m, rows=obs.rows, cols=obs.cols, counts=obs.counts)

    checked_truth: Optional[GroundTruth] = None
    if truth is not None:
        if isinstance(truth, GroundTruth):
            rates, mask, params, model_id = truth.rates, truth.mask, truth.params, truth.anomaly_model
        else:
            rates, mask, params = truth
            model_id = spec.anomaly_model if spec is not None else "exp-onset"
        rates = as_rate_matrix(rates)
        if rates.shape != checked.shape:
            raise DimensionMismatchError(f"rate matrix is {rates.shape}, observations are {checked.shape}")
        if (mask.n, mask.m) != checked.shape:
            raise DimensionMismatchError(f"mask is {mask.n}×{mask.m}, observations are {checked.n}×{checked.m}")
        rates.flags.writeable = False
        checked_truth = GroundTruth(rates=rates, mask=mask, params=params, anomaly_model=model_id)

    return Instance(observations=checked, truth=checked_truth, spec=spec, name=name)
