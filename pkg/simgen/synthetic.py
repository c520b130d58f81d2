"""Synthetic low-rank Poisson instances with planted anomalies."""

from typing import Optional, Sequence, Tuple, Union

import numpy as np
import structlog

from config.ranges import REAL_STYLE_SETTING, REPRESENTATIVE_SETTING
from core.exceptions import ParameterError
from core.instance import GroundTruth, Instance, validate_instance
from core.types import AnomalyMask, GenerationSpec, ModelParams, RateMatrix, SparseObservations
from models import AnomalyModel, get_anomaly_model

logger = structlog.get_logger()


def _check_probability(name: str, value: float) -> None:
    if not 0.0 <= value <= 1.0:
        raise ParameterError(f"{name} must lie in [0, 1], got {value}")


def gen_rate_matrix(n: int, m: int, r: int, mean_level: float, rng: np.random.Generator) -> RateMatrix:
    """Draw M* = k·UVᵀ with Gamma(1, 2) factors, k setting the grand mean to mean_level."""
    if not 1 <= r <= min(n, m):
        raise ParameterError(f"rank {r} outside [1, {min(n, m)}]")
    if mean_level <= 0:
        raise ParameterError(f"mean level must be positive, got {mean_level}")
    u = rng.gamma(1.0, 2.0, size=(n, r))
    v = rng.gamma(1.0, 2.0, size=(m, r))
    rates = u @ v.T
    return rates * (mean_level / rates.mean())


def gen_observation(rates: RateMatrix, p_o: float, p_a: float, alpha: Sequence[float],
                    model: Union[str, AnomalyModel], rng: np.random.Generator) -> Tuple[SparseObservations, AnomalyMask]:
    """Observe each entry w.p. p_O and make each observed entry anomalous w.p. p_A.

    Normal entries draw Poisson(M_ij); anomalous ones draw Anom(α, M_ij).
    """
    _check_probability("p_o", p_o)
    _check_probability("p_a", p_a)
    model = get_anomaly_model(model)
    alpha = tuple(alpha)[:model.dim]
    rates = np.asarray(rates, dtype=np.float64)

    observed = rng.random(rates.shape) < p_o
    anomalous = observed & (rng.random(rates.shape) < p_a)
    counts = rng.poisson(rates)
    if anomalous.any():
        counts[anomalous] = model.sample(alpha, rates[anomalous], rng)

    obs = SparseObservations.from_dense(counts, observed)
    return obs, AnomalyMask.from_dense(anomalous)


def gen_instance(spec: GenerationSpec, rng: Optional[np.random.Generator] = None, name: str = "instance") -> Instance:
    """Generate one full instance from its parameters (seeded by ``spec.seed`` by default)."""
    rng = rng or np.random.default_rng(spec.seed)
    model = get_anomaly_model(spec.anomaly_model)
    rates = gen_rate_matrix(spec.n, spec.m, spec.rank, spec.mean_level, rng)
    obs, mask = gen_observation(rates, spec.p_o, spec.p_a, spec.alpha, model, rng)
    truth = GroundTruth(rates=rates, mask=mask, params=spec.params(model.dim), anomaly_model=model.name)
    logger.debug(f"Generated {spec.n}×{spec.m} instance", observed=obs.size, anomalies=len(mask))
    return validate_instance(obs, truth, spec=spec, name=name)


def thin_perturb(base: RateMatrix, pattern: SparseObservations, p_a: float, alpha: float,
                 rng: np.random.Generator) -> Tuple[SparseObservations, AnomalyMask]:
    """Draw Poisson sales on the pattern's positions and thin a fraction p_A of them.

    Flagged entries keep each unit with probability α (Binomial(X, α)).
    """
    _check_probability("p_a", p_a)
    _check_probability("alpha", alpha)
    base = np.asarray(base, dtype=np.float64)
    if base.shape != pattern.shape:
        raise ParameterError(f"base matrix is {base.shape}, pattern is {pattern.shape}")

    counts = rng.poisson(base[pattern.rows, pattern.cols])
    flagged = rng.random(pattern.size) < p_a
    counts[flagged] = rng.binomial(counts[flagged], alpha)

    obs = SparseObservations(n=pattern.n, m=pattern.m, rows=pattern.rows, cols=pattern.cols, counts=counts)
    mask = AnomalyMask(n=pattern.n, m=pattern.m, rows=pattern.rows[flagged], cols=pattern.cols[flagged])
    return obs, mask


def representative_spec(seed: int = 0, anomaly_model: str = "exp-onset") -> GenerationSpec:
    """Get the 100×100 rank-3 setting the ROC examples use."""
    setting = dict(REPRESENTATIVE_SETTING)
    setting["alpha"] = (setting["alpha"],)
    return GenerationSpec(**setting, anomaly_model=anomaly_model, seed=seed)


def gen_real_style_instance(rng: np.random.Generator,
                            shape: Tuple[int, int] = (REAL_STYLE_SETTING["n"], REAL_STYLE_SETTING["m"]),
                            rank: int = REAL_STYLE_SETTING["rank"],
                            p_o: float = REAL_STYLE_SETTING["p_o"],
                            mean_level: float = REAL_STYLE_SETTING["mean_level"],
                            p_a: float = 0.05, alpha: float = 0.2,
                            base: Optional[RateMatrix] = None, name: str = "real-style") -> Instance:
    """Build a sales-panel-shaped instance perturbed by binomial thinning.

    ``base`` replaces the drawn rate matrix when given. Thinning a Poisson
    count gives Poisson(α·M), so the generating model is poisson-thinned.
    """
    n, m = int(shape[0]), int(shape[1])
    if base is None:
        base = gen_rate_matrix(n, m, int(rank), mean_level, rng)
    else:
        base = np.asarray(base, dtype=np.float64)
        n, m = base.shape
    _check_probability("p_o", p_o)
    observed = rng.random((n, m)) < p_o
    pattern = SparseObservations.from_dense(np.zeros((n, m), dtype=np.int64), observed)
    obs, mask = thin_perturb(base, pattern, p_a, alpha, rng)
    truth = GroundTruth(rates=base, mask=mask, params=ModelParams(p_a=p_a, alpha=(alpha,)),
                        anomaly_model="poisson-thinned")
    logger.info(f"Generated real-style instance {n}×{m}", observed=obs.size, anomalies=len(mask))
    return validate_instance(obs, truth, name=name)
