"""ROC curves from γ sweeps, score thresholds or per-parameter selections."""

from pathlib import Path
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from sklearn import metrics

from core.exceptions import DimensionMismatchError, ParameterError
from core.types import ArrayModel
from utils.parallel import ordered_map
from .metrics import tpr_fpr

ROC_COLUMNS = ["param", "fpr", "tpr"]

Point = Tuple[float, float, float]


class RocCurve(ArrayModel):
    """Points (param, fpr, tpr) sorted by fpr, with the trapezoidal AUC."""

    param: np.ndarray
    fpr: np.ndarray
    tpr: np.ndarray
    auc: float

    @property
    def points(self) -> List[Point]:
        return list(zip(self.param.tolist(), self.fpr.tolist(), self.tpr.tolist()))

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"param": self.param, "fpr": self.fpr, "tpr": self.tpr}, columns=ROC_COLUMNS)


def auc(fpr: Sequence[float], tpr: Sequence[float]) -> float:
    """Get the trapezoidal area under points already sorted by fpr."""
    fpr = np.asarray(fpr, dtype=np.float64)
    tpr = np.asarray(tpr, dtype=np.float64)
    if fpr.shape != tpr.shape:
        raise DimensionMismatchError("fpr and tpr differ in length")
    if fpr.size < 2:
        raise ParameterError("AUC needs at least two points")
    if np.any(np.diff(fpr) < 0):
        raise ParameterError("ROC points must be sorted by non-decreasing fpr")
    return float(metrics.auc(fpr, tpr))


def curve_from_points(points: Sequence[Point]) -> RocCurve:
    """Add the (0, 0) and (1, 1) endpoints, sort by (fpr, tpr) and integrate."""
    table = np.array([(np.nan, 0.0, 0.0)] + list(points) + [(np.nan, 1.0, 1.0)], dtype=np.float64)
    order = np.lexsort((table[:, 2], table[:, 1]))
    table = table[order]
    return RocCurve(param=table[:, 0], fpr=table[:, 1], tpr=table[:, 2], auc=auc(table[:, 1], table[:, 2]))


def _point(param: float, selected: np.ndarray, f_star: np.ndarray) -> Point:
    tpr, fpr = tpr_fpr(np.asarray(selected, dtype=np.float64), f_star)
    return float(param), fpr, tpr


def sweep_roc(method: Callable[[float], np.ndarray], f_star: np.ndarray, grid: Sequence[float],
              threads: Optional[int] = None) -> RocCurve:
    """Evaluate a selection rule t = method(param) at every grid point against f*."""
    grid = [float(g) for g in grid]
    if not grid:
        raise ParameterError("ROC sweep needs a non-empty grid")
    selections = ordered_map(method, grid, threads)
    return curve_from_points([_point(g, t, f_star) for g, t in zip(grid, selections)])


def selection_roc(selections: Sequence[Tuple[float, np.ndarray]], f_star: np.ndarray) -> RocCurve:
    """Get one ROC point per (param, selected) pair, e.g. from multi-solve baselines."""
    if not selections:
        raise ParameterError("need at least one selection")
    return curve_from_points([_point(p, s, f_star) for p, s in selections])


def score_roc(scores: np.ndarray, f_star: np.ndarray) -> RocCurve:
    """Exact ROC of thresholding a real-valued anomaly score.

    Every entry counts as a positive with weight 1 − f* and as a negative
    with weight f*; thresholds are the ``param`` column.
    """
    scores = np.asarray(scores, dtype=np.float64)
    f_star = np.asarray(f_star, dtype=np.float64)
    if scores.shape != f_star.shape:
        raise DimensionMismatchError(f"{scores.size} scores for {f_star.size} posteriors")
    if np.sum(1.0 - f_star) <= 0 or np.sum(f_star) <= 0:
        return curve_from_points([])

    labels = np.concatenate([np.ones(scores.size), np.zeros(scores.size)])
    weights = np.concatenate([1.0 - f_star, f_star])
    fpr, tpr, thresholds = metrics.roc_curve(
        labels, np.concatenate([scores, scores]), sample_weight=weights, drop_intermediate=False,
    )
    return curve_from_points(list(zip(thresholds, np.clip(fpr, 0, 1), np.clip(tpr, 0, 1))))


def write_roc(curve: RocCurve, path: Union[str, Path]) -> Path:
    """Write the param,fpr,tpr table."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    curve.to_frame().to_csv(path, index=False, float_format="%.17g")
    return path
