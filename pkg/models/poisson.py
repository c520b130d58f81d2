"""Poisson probabilities computed in log space."""

from typing import Tuple, Union

import numpy as np
from scipy.special import gammaln, xlogy

from core.exceptions import ParameterError

ArrayLike = Union[float, int, np.ndarray]


def check_counts(k: ArrayLike) -> np.ndarray:
    """Validate nonnegative integer counts."""
    counts = np.asarray(k)
    if np.any(counts < 0) or np.any(counts != np.floor(counts)):
        raise ParameterError("counts must be nonnegative integers")
    return counts.astype(np.int64)


def check_rates(lam: ArrayLike) -> np.ndarray:
    """Validate finite nonnegative Poisson rates."""
    rates = np.asarray(lam, dtype=np.float64)
    if not np.all(np.isfinite(rates)) or np.any(rates < 0):
        raise ParameterError("Poisson rate must be finite and nonnegative")
    return rates


def poisson_log_pmf(k: ArrayLike, lam: ArrayLike) -> np.ndarray:
    """Get log P(X = k) for X ~ Poisson(λ); −inf where the mass is zero."""
    k = np.asarray(k, dtype=np.float64)
    lam = np.asarray(lam, dtype=np.float64)
    with np.errstate(divide="ignore"):
        return xlogy(k, lam) - lam - gammaln(k + 1.0)


def poisson_pmf(k: ArrayLike, lam: ArrayLike) -> np.ndarray:
    return np.exp(poisson_log_pmf(k, lam))


def poisson_cdf_table(lam: ArrayLike, t_max: int) -> np.ndarray:
    """Get P(X ≤ t) for t = 0..t_max along a new last axis."""
    lam = np.asarray(lam, dtype=np.float64)
    ks = np.arange(t_max + 1, dtype=np.float64)
    return np.cumsum(poisson_pmf(ks, lam[..., None]), axis=-1)


def poisson_probability(k: ArrayLike, lam: ArrayLike) -> Tuple[np.ndarray, np.ndarray]:
    """Get (pmf, cdf) at k for rate λ; the cdf is the running sum of the pmf."""
    counts = check_counts(k)
    rates = check_rates(lam)
    counts, rates = np.broadcast_arrays(counts, rates)
    pmf = poisson_pmf(counts, rates)
    if counts.size == 0:
        return pmf, pmf.copy()
    table = poisson_cdf_table(rates, int(counts.max()))
    cdf = np.take_along_axis(table, counts[..., None], axis=-1)[..., 0]
    return pmf, np.minimum(cdf, 1.0)
