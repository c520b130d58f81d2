"""Experiment parameter ranges and identifier tables."""

from typing import Dict, List, Tuple

import numpy as np

# Synthetic ensemble: every instance draws its parameters uniformly from these
ENSEMBLE_RANGES: Dict[str, Tuple[float, float]] = {
    "rank": (1, 10),
    "mean_level": (1.0, 10.0),
    "p_o": (0.5, 1.0),
    "p_a": (0.0, 0.3),
    "alpha": (0.0, 1.0),
}

ENSEMBLE_SHAPE: Tuple[int, int] = (100, 100)

# ROC example setting
REPRESENTATIVE_SETTING: Dict[str, float] = {
    "n": 100,
    "m": 100,
    "rank": 3,
    "mean_level": 5.0,
    "p_o": 0.8,
    "p_a": 0.04,
    "alpha": 0.2,
}

# Shape of the weekly store × product sales panel the thinning mode imitates
REAL_STYLE_SETTING: Dict[str, float] = {
    "n": 2481,
    "m": 290,
    "rank": 30,
    "p_o": 0.14,
    "mean_level": 2.64,
}

ANOMALY_MODEL_IDS: List[str] = ["poisson-thinned", "exp-onset", "zero"]

BASELINE_IDS: List[str] = ["soft-impute", "stable-pcp", "rmc", "drmf"]

# Methods scored by the benchmark, in report order
BENCH_METHODS: List[str] = ["oracle", "ew", "stable-pcp", "rmc", "drmf"]

GAMMA_GRID_POINTS = 33
GAMMA_GRID_MIN = 1e-3

# RMC max-norm cap as a multiple of ||M*||_max
RMC_CAP_SCALE = 1.0

# Detector settings of the benchmark and evaluate runs: likelihood fit, point band
EXPERIMENT_DETECTOR: Dict[str, str] = {"fit_method": "mle", "band_mode": "point"}


def default_gamma_grid() -> np.ndarray:
    """Get the default FPR-target grid for EW sweeps."""
    return np.geomspace(GAMMA_GRID_MIN, 1.0, GAMMA_GRID_POINTS)

