"""The entrywise detector: estimate rates, fit θ, band f*, select, round."""

from pathlib import Path
from typing import Optional, Tuple, Union

import numpy as np
import pandas as pd
import structlog

from completion import estimate_rates, estimate_rates_soft_impute
from core.exceptions import ConfigError
from core.types import DetectorConfig, RateMatrix, SparseObservations, TheoreticalConstants
from estimator import MomentFit, fit_theta, fit_theta_mle
from models import AnomalyModel, get_anomaly_model
from .bands import ConfidenceBand, confidence_band
from .selection import DetectionSolution, build_solution

logger = structlog.get_logger()

DETECTION_COLUMNS = ["row", "col", "t", "f_L", "f_point", "f_R", "selected"]


class EntrywiseDetector:
    """Runs the rate, parameter and band stages once and selects for any γ.

    ``prepare`` caches M̂, θ̂ and the band for one set of observations;
    ``select`` then solves the budgeted program and rounds it, so a γ sweep
    costs one sort per γ.
    """

    def __init__(self, config: DetectorConfig, consts: Optional[TheoreticalConstants] = None,
                 model: Union[str, AnomalyModel, None] = None, threads: Optional[int] = None):
        self.config = config
        self.consts = consts
        self.model = get_anomaly_model(model or config.anomaly_model)
        self.threads = threads
        if config.band_mode == "theoretical" and consts is None:
            raise ConfigError("theoretical band mode needs theoretical constants")

        self.obs: Optional[SparseObservations] = None
        self.m_raw: Optional[RateMatrix] = None
        self.m_hat: Optional[RateMatrix] = None
        self.fit: Optional[MomentFit] = None
        self.band: Optional[ConfidenceBand] = None

    def prepare(self, obs: SparseObservations) -> "EntrywiseDetector":
        config = self.config
        logger.info(f"Preparing entrywise detector on {obs.n}×{obs.m}",
                    observed=obs.size, rank=config.rank, model=self.model.name)
        if config.completion_method == "soft-impute":
            self.m_raw, self.m_hat = estimate_rates_soft_impute(obs, config.rank)
        else:
            self.m_raw, self.m_hat = estimate_rates(obs, config.rank, seed=config.seed)

        fitter = fit_theta_mle if config.fit_method == "mle" else fit_theta
        self.fit = fitter(obs, self.m_hat, config, self.model, threads=self.threads)
        if not self.fit.converged:
            logger.warning("parameter fit returned its best point without converging")

        self.band = confidence_band(
            obs, self.m_hat, self.fit, consts=self.consts, mode=config.band_mode,
            model=self.model, delta=config.fixed_delta, rank=config.rank, p_o=config.p_o,
        )
        self.obs = obs
        return self

    def _require_prepared(self) -> None:
        if self.band is None:
            raise ConfigError("call prepare() before select()")

    def select(self, gamma: Optional[float] = None, t: Optional[np.ndarray] = None) -> DetectionSolution:
        """Solve the budgeted selection at γ (default: the configured γ) and round it."""
        self._require_prepared()
        gamma = self.config.gamma if gamma is None else gamma
        solution = build_solution(self.obs, self.band, gamma, self.config.seed, t=t)
        logger.info(f"Selected at gamma={gamma:.4g}", expected=solution.expected_selected,
                    sampled=len(solution.mask), slack=solution.feasibility_slack)
        return solution


def run_ew(obs: SparseObservations, config: DetectorConfig, consts: Optional[TheoreticalConstants] = None,
           model: Union[str, AnomalyModel, None] = None,
           threads: Optional[int] = None) -> Tuple[RateMatrix, MomentFit, ConfidenceBand, DetectionSolution]:
    """Run all five stages and return every intermediate artifact."""
    detector = EntrywiseDetector(config, consts, model, threads).prepare(obs)
    return detector.m_hat, detector.fit, detector.band, detector.select()


def detection_frame(obs: SparseObservations, band: ConfidenceBand, solution: DetectionSolution) -> pd.DataFrame:
    return pd.DataFrame({
        "row": obs.rows,
        "col": obs.cols,
        "t": solution.t,
        "f_L": band.f_l,
        "f_point": band.f_point,
        "f_R": band.f_r,
        "selected": solution.mask.indicator(obs).astype(np.int64),
    }, columns=DETECTION_COLUMNS)


def write_detection(path: Union[str, Path], obs: SparseObservations, band: ConfidenceBand,
                    solution: DetectionSolution) -> Path:
    """Write the row,col,t,f_L,f_point,f_R,selected table."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    detection_frame(obs, band, solution).to_csv(path, index=False, float_format="%.17g")
    return path
