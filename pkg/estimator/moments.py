"""Generalized-moment (CDF) matching estimator of θ = (p_A, α)."""

import itertools
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np
import structlog
from pydantic import BaseModel, ConfigDict
from scipy import optimize

from config.settings import settings
from core.exceptions import EmptyObservationsError, ParameterError
from core.types import DetectorConfig, ModelParams, RateMatrix, SparseObservations
from models import AnomalyModel, get_anomaly_model, poisson_cdf_table
from utils.parallel import ordered_map

logger = structlog.get_logger()

Objective = Callable[[np.ndarray], float]
TraceEntry = Tuple[Tuple[float, ...], float]


class MomentFit(BaseModel):
    """Fitted θ̂ with the objective value and every evaluation made."""

    model_config = ConfigDict(frozen=True)

    theta_hat: ModelParams
    objective_value: float
    trace: Tuple[TraceEntry, ...] = ()
    converged: bool = True
    method: str = "moments"


def scale_e(theta: ModelParams, model: Union[str, AnomalyModel]) -> float:
    """Get e(θ) = p_A·g(α) + 1 − p_A, the mean shrinkage caused by anomalies."""
    model = get_anomaly_model(model)
    return theta.p_a * model.mean_factor(theta.alpha) + 1.0 - theta.p_a


def canonical_theta(theta: ModelParams, model: AnomalyModel, p_a_box: Tuple[float, float]) -> ModelParams:
    """Move a fit with g(α) = 1 onto p_A = 0.

    Such an anomaly law leaves counts Poisson(M), so every p_A ties; the
    no-anomaly point is reported whenever the p_A range holds it.
    """
    if theta.p_a > 0.0 and model.dim > 0 and p_a_box[0] <= 0.0 and model.mean_factor(theta.alpha) >= 1.0:
        logger.info("Fit leaves counts unchanged; reporting p_A = 0", alpha=list(theta.alpha))
        return ModelParams(p_a=0.0, alpha=theta.alpha)
    return theta


def model_cdf_fractions(theta: ModelParams, rates: RateMatrix, n_moments: int,
                        model: Union[str, AnomalyModel]) -> np.ndarray:
    """Get g_t(θ, M) for t = 0..n_moments−1, averaged over all entries of M."""
    model = get_anomaly_model(model)
    rates = np.asarray(rates, dtype=np.float64).reshape(-1)
    t_max = n_moments - 1
    normal = poisson_cdf_table(rates, t_max).mean(axis=0)
    if theta.p_a == 0.0:
        return np.minimum(normal, 1.0)
    anomalous = model.cdf_table(theta.alpha, rates, t_max).mean(axis=0)
    return np.clip(theta.p_a * anomalous + (1.0 - theta.p_a) * normal, 0.0, 1.0)


def model_cdf_fraction(theta: ModelParams, rates: RateMatrix, t: int,
                       model: Union[str, AnomalyModel]) -> float:
    """Get g_t(θ, M) = (1/nm)Σ [p_A·P_Anom(X ≤ t) + (1 − p_A)·P_Pois(X ≤ t)]."""
    if t < 0:
        raise ParameterError(f"t must be nonnegative, got {t}")
    return float(model_cdf_fractions(theta, rates, t + 1, model)[t])


def empirical_cdf_fractions(obs: SparseObservations, n_moments: int) -> np.ndarray:
    """Get |{X ≤ t on Ω}|/|Ω| for t = 0..n_moments−1."""
    if obs.size == 0:
        raise EmptyObservationsError("empirical moments need at least one observed entry")
    counts = np.sort(obs.counts)
    return np.searchsorted(counts, np.arange(n_moments), side="right") / float(obs.size)


def empirical_cdf_fraction(obs: SparseObservations, t: int) -> float:
    if t < 0:
        raise ParameterError(f"t must be nonnegative, got {t}")
    return float(empirical_cdf_fractions(obs, t + 1)[t])


def moment_objective(theta: ModelParams, m_hat: RateMatrix, targets: Sequence[float],
                     model: Union[str, AnomalyModel]) -> float:
    """Get Σ_t (g_t(θ, M̂/e(θ)) − target_t)² over t < len(targets)."""
    targets = np.asarray(targets, dtype=np.float64)
    fractions = model_cdf_fractions(theta, np.asarray(m_hat) / scale_e(theta, model), targets.size, model)
    return float(np.sum((fractions - targets) ** 2))


def subsample_entries(values: np.ndarray, seed: int, limit: Optional[int] = None) -> np.ndarray:
    """Get a seeded uniform subsample of at most ``limit`` flattened entries."""
    limit = limit or settings.numerics.cdf_subsample
    flat = np.asarray(values, dtype=np.float64).reshape(-1)
    if flat.size <= limit:
        return flat
    rng = np.random.default_rng(seed)
    logger.info("Subsampling entries for moment evaluation", total=flat.size, kept=limit)
    return flat[np.sort(rng.choice(flat.size, size=limit, replace=False))]


def _grid_axes(bounds: Sequence[Tuple[float, float]], points: int) -> List[np.ndarray]:
    return [np.array([lo]) if hi <= lo else np.linspace(lo, hi, points) for lo, hi in bounds]


def search_box(objective: Objective, bounds: Sequence[Tuple[float, float]], grid_points: int,
               threads: Optional[int] = None) -> Tuple[np.ndarray, float, List[TraceEntry], bool]:
    """Minimize over a box: exhaustive grid, then bounded Nelder–Mead from the best point.

    Grid evaluations run in parallel but are reduced in grid order; the
    first minimal evaluation wins ties, so the result is the best point of
    the whole trace. Returns (x, f(x), trace, converged).
    """
    lows = np.array([lo for lo, _ in bounds])
    highs = np.array([hi for _, hi in bounds])
    candidates = [np.array(point) for point in itertools.product(*_grid_axes(bounds, grid_points))]
    values = ordered_map(objective, candidates, threads)
    trace: List[TraceEntry] = [(tuple(map(float, c)), float(v)) for c, v in zip(candidates, values)]
    best = int(np.argmin(values))
    x_best, f_best = candidates[best], float(values[best])

    free = highs > lows
    if not free.any():
        return x_best, f_best, trace, True

    def clipped(x: np.ndarray) -> float:
        point = np.clip(x, lows, highs)
        value = objective(point)
        trace.append((tuple(map(float, point)), float(value)))
        return value

    result = optimize.minimize(
        clipped, x_best, method="Nelder-Mead",
        bounds=list(zip(lows, highs)),
        options={
            "xatol": settings.numerics.refine_tol,
            "fatol": settings.numerics.refine_tol,
            "maxfev": settings.numerics.refine_max_evals,
        },
    )
    if not result.success:
        logger.warning("Nelder-Mead refinement did not converge", message=str(result.message),
                       evaluations=int(result.nfev))
    best = min(range(len(trace)), key=lambda i: trace[i][1])
    return np.array(trace[best][0]), trace[best][1], trace, bool(result.success)


def fit_theta(obs: SparseObservations, m_hat: RateMatrix, config: DetectorConfig,
              model: Union[str, AnomalyModel, None] = None, threads: Optional[int] = None) -> MomentFit:
    """Get θ̂ = argmin_Θ Σ_{t<T} (g_t(θ, M̂/e(θ)) − empirical_t)².

    M̂ is rescaled by 1/e(θ) inside every candidate evaluation. For n·m
    above ``cdf_subsample`` the average over entries uses a seeded subsample.
    """
    model = get_anomaly_model(model or config.anomaly_model)
    n_moments = config.resolved_moments(model.dim)
    targets = empirical_cdf_fractions(obs, n_moments)
    rates = subsample_entries(m_hat, config.seed)
    bounds = config.theta_domain.bounds(model.gamma_box)

    def objective(vector: np.ndarray) -> float:
        return moment_objective(ModelParams.from_vector(vector), rates, targets, model)

    logger.info(f"Fitting {model.name} parameters by moment matching",
                moments=n_moments, grid_points=config.grid_points)
    x, value, trace, converged = search_box(objective, bounds, config.grid_points, threads)
    theta = ModelParams.from_vector(x)
    canonical = canonical_theta(theta, model, config.theta_domain.p_a)
    if canonical != theta:
        theta, value = canonical, objective(np.array([0.0, *canonical.alpha]))
    logger.info("Moment fit done", p_a=theta.p_a, alpha=list(theta.alpha), objective=value)
    return MomentFit(theta_hat=theta, objective_value=value, trace=tuple(trace),
                     converged=converged, method="moments")
