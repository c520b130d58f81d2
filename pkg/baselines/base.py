"""Result type and shared helpers for the alternating baselines."""

from typing import Tuple

import numpy as np

from core.types import ArrayModel, DenseMatrix, SparseObservations


class Decomposition(ArrayModel):
    """Low-rank plus sparse split X ≈ M̂ + Â on Ω."""

    m_hat: DenseMatrix
    a_hat: DenseMatrix
    iterations: int
    converged: bool
    objective: float
    objective_trace: Tuple[float, ...] = ()

    @property
    def support(self) -> np.ndarray:
        """Get the boolean support of Â."""
        return self.a_hat != 0


def observed_arrays(obs: SparseObservations) -> Tuple[np.ndarray, DenseMatrix]:
    """Get (Ω indicator, zero-filled X')."""
    return obs.observed_mask(), obs.zero_filled()


def relative_change(new: DenseMatrix, old: DenseMatrix) -> float:
    """Get ‖new − old‖_F / max(‖old‖_F, 1e-12)."""
    scale = max(float(np.linalg.norm(old)), 1e-12)
    return float(np.linalg.norm(new - old)) / scale


def soft_threshold(values: np.ndarray, tau: float) -> np.ndarray:
    """Entrywise sign(v)·max(|v| − τ, 0)."""
    return np.sign(values) * np.maximum(np.abs(values) - tau, 0.0)
