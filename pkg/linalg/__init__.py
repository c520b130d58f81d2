"""Dense linear-algebra kernels."""

from .svd import (
    SvdTriple,
    numerical_rank,
    rank_r_approximation,
    shrink_singular_values,
    singular_values,
    soft_threshold_svd,
    truncated_svd,
)

__all__ = [
    "SvdTriple",
    "numerical_rank",
    "rank_r_approximation",
    "shrink_singular_values",
    "singular_values",
    "soft_threshold_svd",
    "truncated_svd",
]
