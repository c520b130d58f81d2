"""Comparison algorithms: soft-impute, Stable-PCP / RMC and DRMF."""

from .base import Decomposition
from .drmf import drmf
from .scores import (
    ScoringMode,
    anomaly_scores,
    check_method,
    default_budget,
    default_cap,
    default_ratio,
    multi_solve_selections,
    parameter_grid,
    solve_baseline,
)
from .soft_impute import soft_impute
from .stable_pcp import stable_pcp
from .tuning import solve_at_weight, tune_rank_lambda, tune_rank_solution

__all__ = [
    "Decomposition",
    "ScoringMode",
    "anomaly_scores",
    "check_method",
    "default_budget",
    "default_cap",
    "default_ratio",
    "drmf",
    "multi_solve_selections",
    "parameter_grid",
    "soft_impute",
    "solve_at_weight",
    "solve_baseline",
    "stable_pcp",
    "tune_rank_lambda",
    "tune_rank_solution",
]
