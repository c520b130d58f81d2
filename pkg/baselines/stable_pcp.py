"""Stable principal component pursuit by alternating minimization.

Objective on the observed entries:

    ‖M‖_* + λ‖A‖₁ + μ‖P_Ω(M + A − X)‖²_F

With ``max_cap`` set both blocks are clipped entrywise into [−cap, cap]
after every update, which gives the max-norm constrained RMC variant.
"""

from typing import Optional

import numpy as np
import structlog

from config.settings import settings
from core.exceptions import ParameterError
from core.types import DenseMatrix, SparseObservations
from linalg import shrink_singular_values, singular_values
from .base import Decomposition, observed_arrays, relative_change, soft_threshold

logger = structlog.get_logger()


def _objective(m: DenseMatrix, a: DenseMatrix, x: DenseMatrix, omega: np.ndarray,
               lam: float, mu: float, nuclear: float) -> float:
    return nuclear + lam * float(np.abs(a).sum()) + mu * float(np.sum((m + a - x)[omega] ** 2))


def _low_rank_step(filled: DenseMatrix, tau: float, cap: Optional[float]):
    m, nuclear = shrink_singular_values(filled, tau)
    if cap is not None:
        m = np.clip(m, -cap, cap)
        nuclear = float(np.sum(singular_values(m)))
    return m, nuclear


def stable_pcp(obs: SparseObservations, lam: float, mu: float, max_cap: Optional[float] = None,
               max_iter: Optional[int] = None, tol: Optional[float] = None,
               init: Optional[DenseMatrix] = None) -> Decomposition:
    """Split X into low-rank M̂ and sparse Â on Ω.

    Starts from M = SVT(X', 1/(2μ)) and A = 0 (or M = ``init``), then
    alternates A ← soft(X − M on Ω, λ/(2μ)) and
    M ← SVT(P_Ω(X − A) + P_Ω⊥(M), 1/(2μ)). Stops when the relative
    Frobenius change of (M, A) drops below ``tol``.
    """
    if lam <= 0 or mu <= 0:
        raise ParameterError(f"lambda and mu must be positive, got lambda={lam}, mu={mu}")
    if max_cap is not None and max_cap <= 0:
        raise ParameterError(f"max_cap must be positive, got {max_cap}")
    max_iter = max_iter or settings.numerics.solver_max_iter
    tol = settings.numerics.solver_tol if tol is None else tol

    omega, x = observed_arrays(obs)
    tau = 1.0 / (2.0 * mu)
    if init is None:
        m, nuclear = _low_rank_step(x, tau, max_cap)
    else:
        m = np.array(init, dtype=np.float64)
        if max_cap is not None:
            m = np.clip(m, -max_cap, max_cap)
        nuclear = float(np.sum(singular_values(m)))
    a = np.zeros(x.shape)
    trace = [_objective(m, a, x, omega, lam, mu, nuclear)]

    converged = False
    iterations = 0
    for iterations in range(1, max_iter + 1):
        a_new = np.where(omega, soft_threshold(x - m, lam / (2.0 * mu)), 0.0)
        if max_cap is not None:
            a_new = np.clip(a_new, -max_cap, max_cap)
        m_new, nuclear = _low_rank_step(np.where(omega, x - a_new, m), tau, max_cap)

        change = relative_change(np.concatenate([m_new, a_new]), np.concatenate([m, a]))
        m, a = m_new, a_new
        trace.append(_objective(m, a, x, omega, lam, mu, nuclear))
        if change < tol:
            converged = True
            break

    if not converged:
        logger.warning("stable-pcp hit the iteration cap", lam=lam, mu=mu, iterations=iterations)
    logger.debug("stable-pcp finished", lam=lam, mu=mu, capped=max_cap is not None,
                 iterations=iterations, support=int(np.count_nonzero(a)))
    return Decomposition(
        m_hat=m, a_hat=a, iterations=iterations, converged=converged,
        objective=trace[-1], objective_trace=tuple(trace),
    )
