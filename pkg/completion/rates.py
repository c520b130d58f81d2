"""Rate estimation from partially observed counts (Step 1 of the EW detector)."""

from typing import Tuple

import numpy as np
import structlog

from config.settings import settings
from core.exceptions import DimensionMismatchError, EmptyObservationsError, ParameterError
from core.types import DenseMatrix, RateMatrix, SparseObservations, as_dense_matrix
from linalg import rank_r_approximation, singular_values

logger = structlog.get_logger()


def _require_observations(obs: SparseObservations) -> None:
    if obs.size == 0:
        raise EmptyObservationsError("rate estimation needs at least one observed entry")


def estimate_rates(obs: SparseObservations, r: int, seed: int = 0) -> Tuple[DenseMatrix, RateMatrix]:
    """Get M̂ = (nm/|Ω|)·SVD_r(X') and its clipped copy.

    X' zero-fills Ω⊥. The raw estimate targets e(θ*)·M*; the clipped copy
    floors it at ``rate_floor`` so Poisson log-likelihoods stay finite.
    """
    _require_observations(obs)
    scale = (obs.n * obs.m) / float(obs.size)
    raw = scale * rank_r_approximation(obs.zero_filled(), r, seed=seed)
    clipped = np.maximum(raw, settings.numerics.rate_floor)
    logger.info(
        f"Estimated rates {obs.n}×{obs.m} at rank {r}",
        observed=obs.size,
        negative_entries=int(np.sum(raw < 0)),
    )
    return raw, clipped


def estimate_rates_soft_impute(obs: SparseObservations, r: int) -> Tuple[DenseMatrix, RateMatrix]:
    """Get M̂ from soft-impute with λ tuned until the solution has rank r."""
    from baselines import tune_rank_solution

    _require_observations(obs)
    raw = tune_rank_solution(obs, r, solver="soft-impute")[1].m_hat
    return raw, np.maximum(raw, settings.numerics.rate_floor)


def estimate_rank(obs: SparseObservations, rel_threshold: float = 0.05) -> int:
    """Count singular values of X' at least rel_threshold·σ₁.

    Exploratory only; the detector takes the rank as an input.
    """
    _require_observations(obs)
    s = singular_values(obs.zero_filled())
    if s[0] <= 0:
        return 0
    return int(np.sum(s >= rel_threshold * s[0]))


def recovery_errors(est: DenseMatrix, truth: RateMatrix, scale: float = 1.0) -> Tuple[float, float]:
    """Get (‖est/scale − truth‖_F, ‖est/scale − truth‖_max)."""
    est = as_dense_matrix(est)
    truth = as_dense_matrix(truth)
    if est.shape != truth.shape:
        raise DimensionMismatchError(f"estimate is {est.shape}, truth is {truth.shape}")
    if scale <= 0:
        raise ParameterError(f"scale must be positive, got {scale}")
    diff = est / scale - truth
    return float(np.linalg.norm(diff)), float(np.max(np.abs(diff)))
