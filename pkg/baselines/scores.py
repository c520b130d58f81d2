"""Anomaly scores and selections derived from baseline decompositions."""

from typing import List, Literal, Optional, Sequence, Tuple

import numpy as np
import structlog

from config.ranges import BASELINE_IDS
from core.exceptions import ConfigError, ParameterError
from core.types import SparseObservations
from utils.parallel import ordered_map
from .base import Decomposition
from .drmf import drmf
from .tuning import solve_at_weight, tune_rank_lambda, tune_rank_solution

logger = structlog.get_logger()

ScoringMode = Literal["single-solve", "multi-solve"]

DEFAULT_BUDGET_FRACTION = 0.1
RATIO_SPAN = (0.1, 10.0)
BUDGET_SPAN = (0.0, 0.5)
GRID_SIZE = 12


def check_method(method: str) -> str:
    if method not in BASELINE_IDS:
        raise ConfigError(f"unknown baseline {method!r}; expected one of {BASELINE_IDS}")
    return method


def default_ratio(obs: SparseObservations) -> float:
    """Get the default λ/μ ratio: the mean observed count."""
    return max(float(np.mean(obs.counts)), 1e-6) if obs.size else 1.0


def default_cap(obs: SparseObservations) -> float:
    """Get the RMC cap used when ‖M*‖_max is unknown: twice the largest count."""
    return 2.0 * max(float(np.max(obs.counts)), 1.0) if obs.size else 2.0


def default_budget(obs: SparseObservations, fraction: float = DEFAULT_BUDGET_FRACTION) -> int:
    return int(round(fraction * obs.size))


def solve_baseline(obs: SparseObservations, method: str, rank: int, ratio: Optional[float] = None,
                   e: Optional[int] = None, max_cap: Optional[float] = None,
                   weight: Optional[float] = None, seed: int = 0) -> Decomposition:
    """Run one baseline, tuning its nuclear weight to the target rank when needed."""
    check_method(method)
    if method == "drmf":
        return drmf(obs, rank, default_budget(obs) if e is None else e, seed=seed)

    if method == "rmc" and max_cap is None:
        max_cap = default_cap(obs)
    if method != "soft-impute" and ratio is None:
        ratio = default_ratio(obs)
    if weight is None:
        return tune_rank_solution(obs, rank, solver=method, ratio=ratio, max_cap=max_cap)[1]
    return solve_at_weight(obs, weight, method, ratio=ratio, max_cap=max_cap)


def anomaly_scores(obs: SparseObservations, decomposition: Decomposition, residual: bool = False) -> np.ndarray:
    """Get |Â| per observed entry, in observation order.

    Entries outside the support of Â all score zero. With ``residual`` the
    score is |X − M̂| instead, for soft-impute which has no sparse part.
    """
    if residual:
        return np.abs(obs.counts - obs.values_at(decomposition.m_hat))
    return np.abs(obs.values_at(decomposition.a_hat))


def parameter_grid(obs: SparseObservations, method: str) -> np.ndarray:
    """Get the multi-solve grid: λ/μ ratios, or sparsity budgets e for drmf."""
    check_method(method)
    if method == "soft-impute":
        raise ParameterError("soft-impute has no sparse component to sweep")
    if method == "drmf":
        budgets = np.round(np.linspace(*BUDGET_SPAN, GRID_SIZE) * obs.size)
        return np.unique(budgets.astype(np.int64))
    return default_ratio(obs) * np.geomspace(*RATIO_SPAN, GRID_SIZE)


def multi_solve_selections(obs: SparseObservations, method: str, rank: int,
                           grid: Optional[Sequence[float]] = None, max_cap: Optional[float] = None,
                           threads: Optional[int] = None, seed: int = 0) -> List[Tuple[float, np.ndarray]]:
    """Re-solve across the parameter grid; each solve flags the support of Â.

    The nuclear weight is tuned once at the default ratio and shared by
    every grid point. Returns (parameter, selected-per-observed-entry) pairs
    in grid order.
    """
    grid = parameter_grid(obs, method) if grid is None else np.asarray(grid)
    weight = None
    if method in ("stable-pcp", "rmc"):
        if method == "rmc" and max_cap is None:
            max_cap = default_cap(obs)
        weight = tune_rank_lambda(obs, rank, solver=method, ratio=default_ratio(obs), max_cap=max_cap)

    def run(param: float) -> Tuple[float, np.ndarray]:
        if method == "drmf":
            solution = drmf(obs, rank, int(param), seed=seed)
        else:
            solution = solve_at_weight(obs, weight, method, ratio=float(param), max_cap=max_cap)
        return float(param), obs.values_at(solution.a_hat) != 0

    selections = ordered_map(run, list(grid), threads)
    logger.info(f"Multi-solve {method} over {len(selections)} grid points", rank=rank)
    return selections
