"""Direct robust matrix factorization with a hard sparsity budget."""

from typing import Literal, Optional

import numpy as np
import structlog

from config.settings import settings
from core.exceptions import ParameterError
from core.types import SparseObservations
from linalg import rank_r_approximation
from .base import Decomposition, observed_arrays

logger = structlog.get_logger()

FillMode = Literal["impute", "zero"]


def drmf(obs: SparseObservations, r: int, e: int, max_iter: Optional[int] = None,
         tol: Optional[float] = None, fill: FillMode = "impute", seed: int = 0) -> Decomposition:
    """Minimize ‖P_Ω(X − A − M)‖_F subject to rank(M) ≤ r and ‖A‖₀ ≤ e.

    A keeps the e largest-magnitude residuals on Ω. The M step takes SVD_r
    of X − A on Ω filled with the current M on Ω⊥ (``fill="impute"``), or
    of the zero-filled X − A (``fill="zero"``). The two agree when Ω is
    everything; only the imputed fill makes the objective non-increasing
    under partial observation. M starts at SVD_r of the zero-filled X.
    """
    if e < 0:
        raise ParameterError(f"sparsity budget e must be nonnegative, got {e}")
    if not 1 <= r <= min(obs.n, obs.m):
        raise ParameterError(f"rank {r} outside [1, {min(obs.n, obs.m)}]")
    if fill not in ("impute", "zero"):
        raise ParameterError(f"unknown fill mode {fill!r}")
    max_iter = max_iter or settings.numerics.solver_max_iter
    tol = settings.numerics.solver_tol if tol is None else tol

    omega, x = observed_arrays(obs)
    rows, cols = obs.rows, obs.cols
    budget = min(e, obs.size)

    m = rank_r_approximation(x, r, seed=seed)
    a = np.zeros(x.shape)
    trace = [float(np.linalg.norm((x - m)[omega]))]

    converged = False
    iterations = 0
    for iterations in range(1, max_iter + 1):
        residual = obs.counts - m[rows, cols]
        keep = np.argsort(-np.abs(residual), kind="stable")[:budget]
        a = np.zeros(x.shape)
        a[rows[keep], cols[keep]] = residual[keep]

        target = x - a
        m = rank_r_approximation(np.where(omega, target, m if fill == "impute" else 0.0), r, seed=seed)

        objective = float(np.linalg.norm((target - m)[omega]))
        previous = trace[-1]
        trace.append(objective)
        if previous - objective <= tol * max(previous, 1e-12):
            converged = True
            break

    if not converged:
        logger.warning("drmf hit the iteration cap", rank=r, e=e, iterations=iterations)
    logger.debug("drmf finished", rank=r, e=e, iterations=iterations, objective=trace[-1])
    return Decomposition(
        m_hat=m, a_hat=a, iterations=iterations, converged=converged,
        objective=trace[-1], objective_trace=tuple(trace),
    )
