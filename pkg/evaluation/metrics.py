"""Expected TPR/FPR of a randomized selection given the true posterior."""

from typing import Tuple

import numpy as np

from core.exceptions import DimensionMismatchError
from core.instance import Instance
from models import posterior_nonanomaly


def _ratio(numerator: float, denominator: float) -> float:
    return numerator / denominator if denominator > 0 else 0.0


def tpr_fpr(t: np.ndarray, f_star: np.ndarray) -> Tuple[float, float]:
    """Get TPR = Σt(1−f*)/Σ(1−f*) and FPR = Σt·f*/Σf*; a zero denominator gives 0."""
    t = np.asarray(t, dtype=np.float64)
    f_star = np.asarray(f_star, dtype=np.float64)
    if t.shape != f_star.shape:
        raise DimensionMismatchError(f"{t.size} selection probabilities for {f_star.size} posteriors")
    positives = 1.0 - f_star
    tpr = _ratio(float(np.dot(t, positives)), float(np.sum(positives)))
    fpr = _ratio(float(np.dot(t, f_star)), float(np.sum(f_star)))
    return min(max(tpr, 0.0), 1.0), min(max(fpr, 0.0), 1.0)


def true_posterior(instance: Instance) -> np.ndarray:
    """Get f* per observed entry from M*, θ* and the generating anomaly model."""
    truth = instance.require_truth()
    obs = instance.observations
    return posterior_nonanomaly(obs.counts, obs.values_at(truth.rates), truth.params, truth.anomaly_model).f
