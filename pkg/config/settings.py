"""Application settings and configuration management."""

import os
from pathlib import Path
from typing import Any, Dict

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field


load_dotenv()

_ENV_KEYS = ("EWAD_DEBUG", "EWAD_LOG_LEVEL", "EWAD_THREADS", "EWAD_OUTPUT_DIR")


class NumericDefaults(BaseModel):
    """Solver tolerances, caps and floors shared by every stage."""

    # Model parameters
    p_a_max: float = 0.95  # anomaly probability bounded away from one
    rate_floor: float = 1e-9  # clip floor for estimated Poisson rates

    # Truncated SVD
    svd_tol: float = 1e-8
    svd_max_iter: int = 300
    svd_dense_limit: int = 512  # min(n, m) above which the randomized path is used
    svd_oversample: int = 8
    svd_power_iters: int = 4
    numerical_rank_tol: float = 1e-6  # relative to sigma_1

    # Alternating baselines
    solver_tol: float = 1e-5
    solver_max_iter: int = 300

    # Parameter fitting
    grid_points: int = 21
    refine_tol: float = 1e-6
    refine_max_evals: int = 500
    cdf_subsample: int = 1_000_000


class Settings(BaseModel):
    """Main application settings."""

    model_config = ConfigDict(populate_by_name=True)

    # App settings
    debug: bool = Field(default=False, alias="EWAD_DEBUG")
    log_level: str = Field(default="INFO", alias="EWAD_LOG_LEVEL")
    threads: int = Field(default=os.cpu_count() or 1, alias="EWAD_THREADS", ge=1)

    # Paths
    base_dir: Path = Path(__file__).parent.parent
    output_dir: Path = Field(default=Path("results"), alias="EWAD_OUTPUT_DIR")

    numerics: NumericDefaults = Field(default_factory=NumericDefaults)

    def __init__(self, **data: Any):
        """Initialize settings, letting the environment fill unset values."""
        env: Dict[str, str] = {
            key: os.environ[key] for key in _ENV_KEYS if os.environ.get(key)
        }
        super().__init__(**{**env, **data})


# Global settings instance
settings = Settings()
