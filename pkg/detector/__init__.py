"""Confidence bands, budgeted selection and the full entrywise pipeline."""

from .bands import ConfidenceBand, band_half_width, confidence_band
from .pipeline import DETECTION_COLUMNS, EntrywiseDetector, detection_frame, run_ew, write_detection
from .selection import DetectionSolution, build_solution, greedy_fill, sample_mask, solve_oracle, solve_pew

__all__ = [
    "ConfidenceBand",
    "DETECTION_COLUMNS",
    "DetectionSolution",
    "EntrywiseDetector",
    "band_half_width",
    "build_solution",
    "confidence_band",
    "detection_frame",
    "greedy_fill",
    "run_ew",
    "sample_mask",
    "solve_oracle",
    "solve_pew",
    "write_detection",
]
