"""Fractional selection under a false-positive budget, and its randomized rounding."""

from typing import Optional

import numpy as np

from core.exceptions import DimensionMismatchError, ParameterError
from core.types import AnomalyMask, ArrayModel, SparseObservations
from .bands import ConfidenceBand


class DetectionSolution(ArrayModel):
    """Selection probabilities t per observed entry and the sampled mask."""

    t: np.ndarray
    mask: AnomalyMask
    gamma_used: float
    feasibility_slack: float

    @property
    def expected_selected(self) -> float:
        return float(np.sum(self.t))


def _check_gamma(gamma: float) -> None:
    if not 0.0 < gamma <= 1.0:
        raise ParameterError(f"gamma must lie in (0, 1], got {gamma}")


def greedy_fill(costs: np.ndarray, budget: float) -> np.ndarray:
    """Maximize Σt subject to Σ t·cost ≤ budget and t ∈ [0, 1].

    Entries are taken in ascending cost, ties in input order. Zero-cost
    entries are always taken, the first entry that no longer fits whole gets
    the fractional remainder, and the rest get 0.
    """
    costs = np.asarray(costs, dtype=np.float64)
    t = np.zeros(costs.size)
    if costs.size == 0:
        return t
    order = np.argsort(costs, kind="stable")
    spent = np.cumsum(costs[order])
    whole = spent <= budget
    t[order[whole]] = 1.0
    taken = int(np.count_nonzero(whole))
    if taken < costs.size:
        boundary = order[taken]
        remainder = budget - (spent[taken - 1] if taken else 0.0)
        t[boundary] = min(max(remainder / costs[boundary], 0.0), 1.0)
    return t


def solve_pew(band: ConfidenceBand, gamma: float) -> np.ndarray:
    """Solve max Σt s.t. Σ t·f_R ≤ γ·Σ f_L with t ∈ [0, 1].

    The band is in observation order, which is row-major, so ties on f_R
    break by ascending (row, col).
    """
    _check_gamma(gamma)
    return greedy_fill(band.f_r, gamma * float(np.sum(band.f_l)))


def solve_oracle(f_star: np.ndarray, gamma: float) -> np.ndarray:
    """Solve the clairvoyant program with f_L = f_R = f*."""
    _check_gamma(gamma)
    f_star = np.asarray(f_star, dtype=np.float64)
    return greedy_fill(f_star, gamma * float(np.sum(f_star)))


def sample_mask(obs: SparseObservations, t: np.ndarray, seed: int) -> AnomalyMask:
    """Draw A_ij ~ Ber(t_ij) independently for each observed entry."""
    t = np.asarray(t, dtype=np.float64)
    if t.size != obs.size:
        raise DimensionMismatchError(f"{t.size} probabilities for {obs.size} observed entries")
    if np.any((t < 0) | (t > 1)):
        raise ParameterError("selection probabilities must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    chosen = rng.random(t.size) < t
    return AnomalyMask(n=obs.n, m=obs.m, rows=obs.rows[chosen], cols=obs.cols[chosen])


def build_solution(obs: SparseObservations, band: ConfidenceBand, gamma: float,
                   seed: int, t: Optional[np.ndarray] = None) -> DetectionSolution:
    t = solve_pew(band, gamma) if t is None else t
    slack = gamma * float(np.sum(band.f_l)) - float(np.dot(t, band.f_r))
    return DetectionSolution(t=t, mask=sample_mask(obs, t, seed), gamma_used=gamma,
                             feasibility_slack=slack)
