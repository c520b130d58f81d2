"""Base anomaly-model interface."""

from abc import ABC, abstractmethod
from typing import Sequence, Tuple

import numpy as np

from core.exceptions import ParameterError
from .poisson import ArrayLike, check_counts, check_rates

Box = Tuple[Tuple[float, float], ...]


class AnomalyModel(ABC):
    """Distribution Anom(α, M) of the count at an anomalous entry.

    Implementations must satisfy E[Anom(α, M)] = g(α)·M.
    """

    def __init__(self, name: str, gamma_box: Box):
        """Initialize model with its identifier and parameter box Γ."""
        self.name = name
        self.gamma_box = gamma_box

    @property
    def dim(self) -> int:
        """Get d, the dimension of α."""
        return len(self.gamma_box)

    def check_alpha(self, alpha: Sequence[float]) -> np.ndarray:
        """Validate that α has dimension d and lies inside Γ."""
        alpha = np.atleast_1d(np.asarray(alpha, dtype=np.float64)).reshape(-1)
        if alpha.size != self.dim:
            raise ParameterError(f"{self.name} expects alpha of dimension {self.dim}, got {alpha.size}")
        for value, (lo, hi) in zip(alpha, self.gamma_box):
            if not lo - 1e-12 <= value <= hi + 1e-12:
                raise ParameterError(f"alpha={value} outside [{lo}, {hi}] for {self.name}")
        return alpha

    @abstractmethod
    def _pmf(self, k: np.ndarray, alpha: np.ndarray, rate: np.ndarray) -> np.ndarray:
        """Get P(Anom = k) for validated inputs."""

    @abstractmethod
    def mean_factor(self, alpha: Sequence[float]) -> float:
        """Get g(α) with E[Anom(α, M)] = g(α)·M."""

    @abstractmethod
    def _sample(self, alpha: np.ndarray, rate: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        """Draw counts for validated inputs."""

    def pmf(self, k: ArrayLike, alpha: Sequence[float], rate: ArrayLike) -> np.ndarray:
        """Get P(Anom(α, M) = k), broadcasting k against M."""
        alpha = self.check_alpha(alpha)
        k, rate = np.broadcast_arrays(check_counts(k), check_rates(rate))
        return np.clip(self._pmf(k, alpha, rate), 0.0, 1.0)

    def cdf_table(self, alpha: Sequence[float], rate: ArrayLike, t_max: int) -> np.ndarray:
        """Get P(Anom ≤ t) for t = 0..t_max along a new last axis."""
        alpha = self.check_alpha(alpha)
        rate = check_rates(rate)
        ks = np.arange(t_max + 1)
        k_grid, rate_grid = np.broadcast_arrays(ks, rate[..., None])
        pmf = self._pmf(k_grid, alpha, rate_grid)
        return np.minimum(np.cumsum(np.clip(pmf, 0.0, 1.0), axis=-1), 1.0)

    def cdf(self, k: ArrayLike, alpha: Sequence[float], rate: ArrayLike) -> np.ndarray:
        """Get P(Anom(α, M) ≤ k) as the running sum of the pmf."""
        k, rate = np.broadcast_arrays(check_counts(k), check_rates(rate))
        if k.size == 0:
            return np.zeros(k.shape)
        table = self.cdf_table(alpha, rate, int(k.max()))
        return np.take_along_axis(table, k[..., None], axis=-1)[..., 0]

    def evaluate(self, k: ArrayLike, alpha: Sequence[float], rate: ArrayLike) -> Tuple[np.ndarray, np.ndarray]:
        """Get (pmf, cdf) at k."""
        return self.pmf(k, alpha, rate), self.cdf(k, alpha, rate)

    def sample(self, alpha: Sequence[float], rate: ArrayLike, rng: np.random.Generator) -> np.ndarray:
        """Draw one count per rate entry."""
        alpha = self.check_alpha(alpha)
        rate = check_rates(rate)
        return self._sample(alpha, rate, rng).astype(np.int64)

    def k_max(self, rate: float) -> int:
        """Get the truncation point ⌈M + 12√(M+1) + 20⌉ for normalization checks."""
        return int(np.ceil(rate + 12.0 * np.sqrt(rate + 1.0) + 20.0))

    def __repr__(self) -> str:
        return f"{type(self).__name__}(name={self.name!r})"
