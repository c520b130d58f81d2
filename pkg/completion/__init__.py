"""Low-rank rate estimation and recovery diagnostics."""

from .rates import estimate_rank, estimate_rates, estimate_rates_soft_impute, recovery_errors

__all__ = ["estimate_rank", "estimate_rates", "estimate_rates_soft_impute", "recovery_errors"]
