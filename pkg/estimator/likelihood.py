"""Integer-count maximum-likelihood fit of θ over the observed entries."""

from typing import Optional, Union

import numpy as np
import structlog

from core.exceptions import EmptyObservationsError
from core.types import DetectorConfig, ModelParams, RateMatrix, SparseObservations
from models import AnomalyModel, get_anomaly_model, posterior_nonanomaly
from .moments import MomentFit, canonical_theta, scale_e, search_box, subsample_entries

logger = structlog.get_logger()

LOG_FLOOR = 1e-300


def negative_log_likelihood(theta: ModelParams, counts: np.ndarray, m_hat_observed: np.ndarray,
                            model: Union[str, AnomalyModel]) -> float:
    """Get −mean log(p_A·P_Anom(X | α, M̂/e) + (1 − p_A)·P_Pois(X | M̂/e)) over the given entries."""
    rates = m_hat_observed / scale_e(theta, model)
    parts = posterior_nonanomaly(counts, rates, theta, model)
    return float(-np.mean(np.log(np.maximum(parts.x + parts.y, LOG_FLOOR))))


def fit_theta_mle(obs: SparseObservations, m_hat: RateMatrix, config: DetectorConfig,
                  model: Union[str, AnomalyModel, None] = None, threads: Optional[int] = None) -> MomentFit:
    """Maximize the mixture likelihood of the observed counts over Θ.

    Same grid and Nelder–Mead search as the moment fit; the reported
    objective is the negative mean log-likelihood.
    """
    if obs.size == 0:
        raise EmptyObservationsError("likelihood fit needs at least one observed entry")
    model = get_anomaly_model(model or config.anomaly_model)
    order = subsample_entries(np.arange(obs.size), config.seed).astype(np.int64)
    counts = obs.counts[order]
    rates = obs.values_at(np.asarray(m_hat, dtype=np.float64))[order]
    bounds = config.theta_domain.bounds(model.gamma_box)

    def objective(vector: np.ndarray) -> float:
        return negative_log_likelihood(ModelParams.from_vector(vector), counts, rates, model)

    logger.info(f"Fitting {model.name} parameters by maximum likelihood", entries=int(counts.size))
    x, value, trace, converged = search_box(objective, bounds, config.grid_points, threads)
    theta = ModelParams.from_vector(x)
    canonical = canonical_theta(theta, model, config.theta_domain.p_a)
    if canonical != theta:
        theta, value = canonical, objective(np.array([0.0, *canonical.alpha]))
    logger.info("Likelihood fit done", p_a=theta.p_a, alpha=list(theta.alpha), objective=value)
    return MomentFit(theta_hat=theta, objective_value=value, trace=tuple(trace),
                     converged=converged, method="mle")
