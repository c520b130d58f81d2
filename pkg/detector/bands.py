"""Confidence bands for the per-entry non-anomaly posterior f*."""

from typing import Optional, Union

import numpy as np
import structlog

from core.exceptions import ConfigError, ParameterError
from core.types import ArrayModel, BandMode, RateMatrix, SparseObservations, TheoreticalConstants
from estimator import MomentFit, scale_e
from models import AnomalyModel, get_anomaly_model, posterior_nonanomaly

logger = structlog.get_logger()


class ConfidenceBand(ArrayModel):
    """Per observed entry, in observation order: f_L ≤ f_point ≤ f_R and the plug-in masses."""

    f_l: np.ndarray
    f_point: np.ndarray
    f_r: np.ndarray
    x_hat: np.ndarray
    y_hat: np.ndarray
    half_width: float = 0.0

    @property
    def size(self) -> int:
        return int(self.f_point.size)


def band_half_width(obs: SparseObservations, mode: BandMode, consts: Optional[TheoreticalConstants] = None,
                    delta: Optional[float] = None, rank: int = 1, p_o: Optional[float] = None) -> float:
    """Get C₁δ for the band mode; zero in point mode."""
    if mode == "point":
        return 0.0
    if mode == "fixed":
        if delta is None or delta < 0:
            raise ConfigError("fixed band mode needs a nonnegative delta")
        return (consts or TheoreticalConstants()).c1 * delta
    if mode == "theoretical":
        if consts is None:
            raise ConfigError("theoretical band mode needs theoretical constants")
        p_o = obs.observed_fraction if p_o is None else p_o
        return consts.half_width(rank, obs.n, obs.m, p_o)
    raise ConfigError(f"unknown band mode {mode!r}")


def confidence_band(obs: SparseObservations, m_hat: RateMatrix, fit: MomentFit,
                    consts: Optional[TheoreticalConstants] = None, mode: BandMode = "point",
                    model: Union[str, AnomalyModel] = "poisson-thinned", delta: Optional[float] = None,
                    rank: int = 1, p_o: Optional[float] = None) -> ConfidenceBand:
    """Plug θ̂ and M̂/e(θ̂) into the posterior and widen it by ±C₁δ.

    f_L = [(ŷ − C₁δ)/(x̂ + ŷ)] and f_R = [(ŷ + C₁δ)/(x̂ + ŷ)], truncated to
    [0, 1]. Entries with x̂ + ŷ = 0 get f_L = f_point = 0 and f_R = 1.
    """
    model = get_anomaly_model(model)
    theta = fit.theta_hat
    m_observed = obs.values_at(np.asarray(m_hat, dtype=np.float64))
    if np.any(m_observed < 0):
        raise ParameterError("band needs a nonnegative rate estimate; pass the clipped M̂")
    half = band_half_width(obs, mode, consts, delta, rank, p_o)

    parts = posterior_nonanomaly(obs.counts, m_observed / scale_e(theta, model), theta, model)
    total = parts.x + parts.y
    degenerate = total <= 0
    safe_total = np.where(degenerate, 1.0, total)
    f_l = np.where(degenerate, 0.0, np.clip((parts.y - half) / safe_total, 0.0, 1.0))
    f_r = np.where(degenerate, 1.0, np.clip((parts.y + half) / safe_total, 0.0, 1.0))
    f_point = np.clip(parts.f, f_l, f_r)

    if degenerate.any():
        logger.debug("entries with zero mixture mass", count=int(degenerate.sum()))
    logger.info(f"Built {mode} confidence band", entries=obs.size, half_width=half)
    return ConfidenceBand(f_l=f_l, f_point=f_point, f_r=f_r, x_hat=parts.x, y_hat=parts.y,
                          half_width=half)
