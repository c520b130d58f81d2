"""Built-in anomaly models."""

import math
from typing import Sequence

import numpy as np
from scipy import integrate
from scipy.special import gammainc, xlogy

from .base import AnomalyModel
from .poisson import poisson_log_pmf, poisson_pmf


class PoissonThinned(AnomalyModel):
    """Anom(α, M) = Poisson(α·M); g(α) = α."""

    def __init__(self):
        super().__init__("poisson-thinned", ((0.0, 1.0),))

    def _pmf(self, k, alpha, rate):
        return poisson_pmf(k, alpha[0] * rate)

    def mean_factor(self, alpha: Sequence[float]) -> float:
        return float(self.check_alpha(alpha)[0])

    def _sample(self, alpha, rate, rng):
        return rng.poisson(alpha[0] * rate)


class ExponentialOnset(AnomalyModel):
    """Anom(α, M) = Poisson(U·M) with U = min(E, 1), E exponential with mean α.

    U is the fraction of the period left once the anomaly sets in. Its law is
    the density e^{−u/α}/α on [0, 1) plus an atom e^{−1/α} at u = 1, so
    g(α) = E[U] = α(1 − e^{−1/α}).
    """

    def __init__(self, method: str = "closed-form"):
        super().__init__("exp-onset", ((0.0, 1.0),))
        if method not in ("closed-form", "quadrature"):
            raise ValueError(f"unknown integration method {method!r}")
        self.method = method

    def _pmf(self, k, alpha, rate):
        a = float(alpha[0])
        if a <= 0.0:
            return (k == 0).astype(np.float64)
        if self.method == "quadrature":
            return np.vectorize(self._pmf_quadrature, otypes=[np.float64])(k, rate, a)

        # ∫₀¹ Pois(k; uM) e^{−u/α}/α du = (M/c)^k · P(k+1, c) / (α c), c = M + 1/α
        c = rate + 1.0 / a
        with np.errstate(divide="ignore"):
            log_body = (xlogy(k, rate / c) - np.log(a * c)
                        + np.log(gammainc(k + 1.0, c)))
        return np.exp(log_body) + math.exp(-1.0 / a) * poisson_pmf(k, rate)

    @staticmethod
    def _pmf_quadrature(k: int, rate: float, a: float) -> float:
        body, _ = integrate.quad(
            lambda u: math.exp(poisson_log_pmf(k, u * rate) - u / a) / a,
            0.0, 1.0, epsabs=1e-13, epsrel=1e-11, limit=200,
        )
        return body + math.exp(-1.0 / a) * float(poisson_pmf(k, rate))

    def mean_factor(self, alpha: Sequence[float]) -> float:
        a = float(self.check_alpha(alpha)[0])
        return 0.0 if a <= 0.0 else a * (1.0 - math.exp(-1.0 / a))

    def _sample(self, alpha, rate, rng):
        a = float(alpha[0])
        if a <= 0.0:
            return np.zeros(rate.shape, dtype=np.int64)
        onset = np.minimum(rng.exponential(a, size=rate.shape), 1.0)
        return rng.poisson(onset * rate)


class PointMassZero(AnomalyModel):
    """Anom(α, M) ≡ 0, the censoring model of the lower-bound family."""

    def __init__(self):
        super().__init__("zero", ())

    def _pmf(self, k, alpha, rate):
        return (k == 0).astype(np.float64)

    def mean_factor(self, alpha: Sequence[float] = ()) -> float:
        self.check_alpha(alpha)
        return 0.0

    def _sample(self, alpha, rate, rng):
        return np.zeros(rate.shape, dtype=np.int64)
