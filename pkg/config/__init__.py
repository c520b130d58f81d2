"""Configuration module for the entrywise anomaly detector."""

from .settings import Settings, NumericDefaults, settings
from utils import logging_config  # noqa: F401  configures structlog on import
from .ranges import ENSEMBLE_RANGES, ANOMALY_MODEL_IDS, BASELINE_IDS, default_gamma_grid

__all__ = [
    "Settings",
    "NumericDefaults",
    "settings",
    "ENSEMBLE_RANGES",
    "ANOMALY_MODEL_IDS",
    "BASELINE_IDS",
    "default_gamma_grid",
]
