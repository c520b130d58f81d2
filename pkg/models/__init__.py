"""Probability kernels: Poisson, anomaly models and the entry posterior."""

from .base import AnomalyModel
from .anomaly import ExponentialOnset, PointMassZero, PoissonThinned
from .poisson import poisson_cdf_table, poisson_log_pmf, poisson_pmf, poisson_probability
from .posterior import PosteriorComponents, posterior_nonanomaly
from .registry import available_models, get_anomaly_model


def anomaly_eval(model, alpha, rate, k):
    """Get (pmf, cdf) of Anom(α, M) at k."""
    return get_anomaly_model(model).evaluate(k, alpha, rate)


def anomaly_sample(model, alpha, rate, rng):
    """Draw Anom(α, M) counts, one per rate entry."""
    return get_anomaly_model(model).sample(alpha, rate, rng)


def mean_factor(model, alpha=()) -> float:
    """Get g(α) for the named model."""
    return get_anomaly_model(model).mean_factor(alpha)


__all__ = [
    "AnomalyModel",
    "ExponentialOnset",
    "PointMassZero",
    "PoissonThinned",
    "PosteriorComponents",
    "anomaly_eval",
    "anomaly_sample",
    "available_models",
    "get_anomaly_model",
    "mean_factor",
    "poisson_cdf_table",
    "poisson_log_pmf",
    "poisson_pmf",
    "poisson_probability",
    "posterior_nonanomaly",
]
