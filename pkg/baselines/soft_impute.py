"""Soft-impute: nuclear-norm penalized matrix completion."""

from typing import Optional

import numpy as np
import structlog

from config.settings import settings
from core.exceptions import ParameterError
from core.types import DenseMatrix, SparseObservations
from linalg import shrink_singular_values
from .base import Decomposition, observed_arrays, relative_change

logger = structlog.get_logger()


def soft_impute(obs: SparseObservations, lam: float, max_iter: Optional[int] = None,
                tol: Optional[float] = None, init: Optional[DenseMatrix] = None) -> Decomposition:
    """Minimize ‖P_Ω(X − M)‖²_F + λ‖M‖_* by M ← SVT(P_Ω X + P_Ω⊥ M, λ/2).

    ``init`` warm-starts the iterate (used by the rank tuner).
    """
    if lam < 0:
        raise ParameterError(f"lambda must be nonnegative, got {lam}")
    max_iter = max_iter or settings.numerics.solver_max_iter
    tol = settings.numerics.solver_tol if tol is None else tol

    omega, x = observed_arrays(obs)
    m = np.zeros(x.shape) if init is None else np.array(init, dtype=np.float64)
    nuclear = float(np.sum(np.linalg.svd(m, compute_uv=False))) if init is not None else 0.0
    trace = [float(np.sum((x - m)[omega] ** 2)) + lam * nuclear]

    converged = False
    iterations = 0
    for iterations in range(1, max_iter + 1):
        filled = np.where(omega, x, m)
        m_new, nuclear = shrink_singular_values(filled, lam / 2.0)
        change = relative_change(m_new, m)
        m = m_new
        trace.append(float(np.sum((x - m)[omega] ** 2)) + lam * nuclear)
        if change < tol or not np.any(m):
            converged = True
            break

    if not converged:
        logger.warning("soft-impute hit the iteration cap", lam=lam, iterations=iterations)
    logger.debug("soft-impute finished", lam=lam, iterations=iterations, objective=trace[-1])
    return Decomposition(
        m_hat=m, a_hat=np.zeros(x.shape), iterations=iterations, converged=converged,
        objective=trace[-1], objective_trace=tuple(trace),
    )
