"""Truncated SVD and singular-value soft-thresholding."""

from typing import Optional, Tuple

import numpy as np
import structlog
from pydantic import model_validator
from sklearn.utils.extmath import randomized_range_finder

from config.settings import settings
from core.exceptions import ConvergenceError, ParameterError
from core.types import ArrayModel, DenseMatrix, as_dense_matrix

logger = structlog.get_logger()


class SvdTriple(ArrayModel):
    """Rank-r factors U, σ, V with A ≈ U·diag(σ)·Vᵀ."""

    u: np.ndarray
    sigma: np.ndarray
    v: np.ndarray

    @model_validator(mode="after")
    def _check_shapes(self) -> "SvdTriple":
        r = self.sigma.size
        if self.u.shape[1] != r or self.v.shape[1] != r:
            raise ParameterError("factor widths must match the number of singular values")
        return self

    @property
    def rank(self) -> int:
        return int(self.sigma.size)

    def reconstruct(self) -> DenseMatrix:
        """Get U·diag(σ)·Vᵀ."""
        return (self.u * self.sigma) @ self.v.T


def _check_rank(shape, r: int) -> None:
    if not 1 <= r <= min(shape):
        raise ParameterError(f"rank {r} out of range for a {shape[0]}×{shape[1]} matrix")


def _dense_svd(a: np.ndarray, r: int) -> SvdTriple:
    u, s, vt = np.linalg.svd(a, full_matrices=False)
    return SvdTriple(u=u[:, :r], sigma=s[:r], v=vt[:r].T)


def _subspace_svd(a: np.ndarray, r: int, tol: float, seed: int) -> SvdTriple:
    """Randomized range finder followed by subspace iteration until σ settles."""
    numerics = settings.numerics
    size = min(r + numerics.svd_oversample, min(a.shape))
    q = randomized_range_finder(
        a,
        size=size,
        n_iter=numerics.svd_power_iters,
        power_iteration_normalizer="QR",
        random_state=np.random.RandomState(seed % 2**32),
    )

    previous: Optional[np.ndarray] = None
    residual = np.inf
    for iteration in range(1, numerics.svd_max_iter + 1):
        ub, s, vt = np.linalg.svd(q.T @ a, full_matrices=False)
        if previous is not None:
            residual = float(np.max(np.abs(s[:r] - previous)) / max(s[0], np.finfo(float).tiny))
            if residual <= tol:
                logger.debug(f"Subspace SVD converged after {iteration} iterations")
                return SvdTriple(u=(q @ ub)[:, :r], sigma=s[:r], v=vt[:r].T)
        previous = s[:r]
        q, _ = np.linalg.qr(a @ np.linalg.qr(a.T @ q)[0])

    raise ConvergenceError("truncated SVD did not converge", numerics.svd_max_iter, residual)


def truncated_svd(a: DenseMatrix, r: int, tol: Optional[float] = None, seed: int = 0) -> SvdTriple:
    """Best rank-r approximation factors of *a*.

    Dense bidiagonalization (LAPACK) up to ``svd_dense_limit``; seeded
    randomized subspace iteration above it.
    """
    a = as_dense_matrix(a)
    _check_rank(a.shape, r)
    tol = settings.numerics.svd_tol if tol is None else tol
    if tol <= 0:
        raise ParameterError(f"tol must be positive, got {tol}")

    if min(a.shape) <= settings.numerics.svd_dense_limit:
        return _dense_svd(a, r)
    return _subspace_svd(a, r, tol, seed)


def rank_r_approximation(a: DenseMatrix, r: int, seed: int = 0) -> DenseMatrix:
    """Get SVD_r(a), the best rank-r Frobenius approximation."""
    return truncated_svd(a, r, seed=seed).reconstruct()


def soft_threshold_svd(a: DenseMatrix, tau: float) -> DenseMatrix:
    """Get Σᵢ max(σᵢ − τ, 0)·uᵢvᵢᵀ."""
    return shrink_singular_values(a, tau)[0]


def shrink_singular_values(a: DenseMatrix, tau: float) -> Tuple[DenseMatrix, float]:
    """Get the soft-thresholded matrix together with its nuclear norm."""
    if tau < 0:
        raise ParameterError(f"tau must be nonnegative, got {tau}")
    try:
        u, s, vt = np.linalg.svd(np.asarray(a, dtype=np.float64), full_matrices=False)
    except np.linalg.LinAlgError as e:
        raise ConvergenceError(f"SVD failed inside soft-thresholding: {e}", 0) from e
    shrunk = np.maximum(s - tau, 0.0)
    keep = shrunk > 0
    return (u[:, keep] * shrunk[keep]) @ vt[keep], float(np.sum(shrunk))


def singular_values(a: DenseMatrix) -> np.ndarray:
    return np.linalg.svd(np.asarray(a, dtype=np.float64), compute_uv=False)


def numerical_rank(a: DenseMatrix, rel_tol: Optional[float] = None) -> int:
    """Count singular values at least rel_tol·σ₁."""
    rel_tol = settings.numerics.numerical_rank_tol if rel_tol is None else rel_tol
    s = singular_values(a)
    if s.size == 0 or s[0] <= 0:
        return 0
    return int(np.sum(s >= rel_tol * s[0]))
