"""Estimation of the anomaly parameters θ = (p_A, α)."""

from .likelihood import fit_theta_mle, negative_log_likelihood
from .moments import (
    MomentFit,
    canonical_theta,
    empirical_cdf_fraction,
    empirical_cdf_fractions,
    fit_theta,
    model_cdf_fraction,
    model_cdf_fractions,
    moment_objective,
    scale_e,
    search_box,
)

__all__ = [
    "MomentFit",
    "canonical_theta",
    "empirical_cdf_fraction",
    "empirical_cdf_fractions",
    "fit_theta",
    "fit_theta_mle",
    "model_cdf_fraction",
    "model_cdf_fractions",
    "moment_objective",
    "negative_log_likelihood",
    "scale_e",
    "search_box",
]
