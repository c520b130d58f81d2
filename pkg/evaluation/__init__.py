"""Performance metrics, ROC curves, regret curves and the benchmark harness."""

from .benchmark import evaluate_instance, method_curve, run_benchmark, write_benchmark
from .metrics import tpr_fpr, true_posterior
from .regret import regret_at, regret_curve, regret_frame, write_regret
from .roc import RocCurve, auc, curve_from_points, score_roc, selection_roc, sweep_roc, write_roc

__all__ = [
    "RocCurve",
    "auc",
    "curve_from_points",
    "evaluate_instance",
    "method_curve",
    "regret_at",
    "regret_curve",
    "regret_frame",
    "run_benchmark",
    "score_roc",
    "selection_roc",
    "sweep_roc",
    "tpr_fpr",
    "true_posterior",
    "write_benchmark",
    "write_regret",
    "write_roc",
]
