"""Rank-targeting search for the nuclear-norm weight."""

from typing import Optional, Tuple

import structlog

from core.exceptions import ConfigError, ParameterError
from core.types import SparseObservations
from linalg import numerical_rank, singular_values
from .base import Decomposition
from .soft_impute import soft_impute
from .stable_pcp import stable_pcp

logger = structlog.get_logger()

GRID_RATIO = 1.3
START_FRACTION = 0.01
MAX_GRID_STEPS = 120


def solve_at_weight(obs: SparseObservations, weight: float, solver: str, ratio: Optional[float] = None,
                    max_cap: Optional[float] = None, init=None) -> Decomposition:
    """Run a nuclear-norm solver with nuclear weight w.

    soft-impute uses λ = w. stable-pcp and rmc use μ = 1/w and λ = ratio/w,
    so the SVT threshold is w/2 for every solver.
    """
    if solver == "soft-impute":
        return soft_impute(obs, weight, init=init)
    if solver in ("stable-pcp", "rmc"):
        if ratio is None or ratio <= 0:
            raise ParameterError(f"{solver} needs a positive lambda/mu ratio, got {ratio}")
        cap = max_cap if solver == "rmc" else None
        return stable_pcp(obs, lam=ratio / weight, mu=1.0 / weight, max_cap=cap, init=init)
    raise ConfigError(f"no nuclear-norm weight to tune for solver {solver!r}")


def tune_rank_lambda(obs: SparseObservations, target_rank: int, solver: str = "soft-impute",
                     ratio: Optional[float] = None, max_cap: Optional[float] = None) -> float:
    """Get the smallest grid weight whose solution has numerical rank ≤ target_rank."""
    return tune_rank_solution(obs, target_rank, solver, ratio, max_cap)[0]


def tune_rank_solution(obs: SparseObservations, target_rank: int, solver: str = "soft-impute",
                       ratio: Optional[float] = None, max_cap: Optional[float] = None
                       ) -> Tuple[float, Decomposition]:
    """Get the smallest grid weight with numerical rank ≤ target_rank, and its solution.

    The grid is geometric with ratio 1.3 from 0.01·σ₁(X'). Each solve is
    warm-started from the previous one. If no grid point reaches the target
    the weight with the closest rank is returned and a warning is logged.
    """
    if not 1 <= target_rank <= min(obs.n, obs.m):
        raise ParameterError(f"target rank {target_rank} outside [1, {min(obs.n, obs.m)}]")
    sigma_1 = float(singular_values(obs.zero_filled())[0])
    if sigma_1 <= 0:
        raise ParameterError("cannot tune on an all-zero observation matrix")

    weight = START_FRACTION * sigma_1
    best_weight, best_gap, best_solution = weight, None, None
    init = None
    for step in range(MAX_GRID_STEPS):
        solution = solve_at_weight(obs, weight, solver, ratio=ratio, max_cap=max_cap, init=init)
        rank = numerical_rank(solution.m_hat) if solution.m_hat.any() else 0
        logger.debug("rank tuning step", solver=solver, weight=weight, rank=rank)
        if rank <= target_rank:
            if rank < target_rank:
                logger.warning("rank tuning undershot the target", solver=solver,
                               target=target_rank, rank=rank, weight=weight)
            logger.info(f"Tuned {solver} to rank {rank}", weight=weight, steps=step + 1)
            return weight, solution
        gap = rank - target_rank
        if best_gap is None or gap < best_gap:
            best_weight, best_gap, best_solution = weight, gap, solution
        init = solution.m_hat
        weight *= GRID_RATIO

    logger.warning("rank tuning never reached the target", solver=solver,
                   target=target_rank, closest_weight=best_weight, gap=best_gap)
    return best_weight, best_solution
