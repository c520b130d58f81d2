"""Posterior probability that an observed entry is not anomalous."""

from typing import Union

import numpy as np

from core.types import ArrayModel, ModelParams
from .base import AnomalyModel
from .poisson import ArrayLike, check_counts, check_rates, poisson_pmf
from .registry import get_anomaly_model


class PosteriorComponents(ArrayModel):
    """Mixture masses x (anomaly), y (normal) and f = y/(x+y)."""

    x: np.ndarray
    y: np.ndarray
    f: np.ndarray


def posterior_nonanomaly(
    k: ArrayLike,
    rate: ArrayLike,
    theta: ModelParams,
    model: Union[str, AnomalyModel],
) -> PosteriorComponents:
    """Get f = P(B = 0 | X = k) under rate M and parameters θ.

    Where x + y = 0 the posterior is set to 0.
    """
    model = get_anomaly_model(model)
    k, rate = np.broadcast_arrays(check_counts(k), check_rates(rate))
    x = theta.p_a * model.pmf(k, theta.alpha, rate)
    y = (1.0 - theta.p_a) * poisson_pmf(k, rate)
    total = x + y
    with np.errstate(invalid="ignore", divide="ignore"):
        f = np.where(total > 0, y / np.where(total > 0, total, 1.0), 0.0)
    return PosteriorComponents(x=np.asarray(x, dtype=np.float64),
                               y=np.asarray(y, dtype=np.float64),
                               f=np.asarray(f, dtype=np.float64))
