"""Paired-row instances on which no detector beats O(1/√n) TPR regret."""

import math
from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from core.types import AnomalyMask, ModelParams, RateMatrix, SparseObservations

LOWERBOUND_P_A = 0.5
LOWERBOUND_MODEL = "zero"


class LowerBoundSpec(BaseModel):
    """Rows (2i, 2i+1) hold (1, 1 − c*/√n) or the swap, chosen by bit bᵢ."""

    model_config = ConfigDict(frozen=True)

    n: int = Field(ge=2)
    m: Optional[int] = Field(default=None, ge=1)  # None: square
    c_star: float = Field(default=0.25, gt=0.0, lt=0.5)
    bits: Optional[List[int]] = None  # None: uniform random per instance

    @model_validator(mode="after")
    def _check(self) -> "LowerBoundSpec":
        if self.n % 2:
            raise ValueError(f"n must be even, got {self.n}")
        if self.bits is not None:
            if len(self.bits) != self.n // 2:
                raise ValueError(f"need {self.n // 2} bits, got {len(self.bits)}")
            if any(b not in (0, 1) for b in self.bits):
                raise ValueError("bits must be 0 or 1")
        return self

    @property
    def columns(self) -> int:
        return self.m if self.m is not None else self.n

    @property
    def gamma(self) -> float:
        """Get the FPR target 1/(2e) used on this family."""
        return 1.0 / (2.0 * math.e)

    @property
    def low_value(self) -> float:
        return 1.0 - self.c_star / math.sqrt(self.n)

    def with_size(self, n: int) -> "LowerBoundSpec":
        return self.model_copy(update={"n": n, "bits": None})


def lowerbound_rates(spec: LowerBoundSpec, bits: np.ndarray) -> RateMatrix:
    pairs = np.where(np.asarray(bits)[:, None] == 0, [1.0, spec.low_value], [spec.low_value, 1.0])
    return np.repeat(pairs.reshape(-1, 1), spec.columns, axis=1)


def gen_lowerbound_instance(spec: LowerBoundSpec, rng: np.random.Generator
                            ) -> Tuple[RateMatrix, SparseObservations, AnomalyMask, ModelParams]:
    """Draw M^b and a fully observed count matrix zeroed wherever B = 1 (p_A = 1/2)."""
    bits = np.asarray(spec.bits) if spec.bits is not None else rng.integers(0, 2, size=spec.n // 2)
    rates = lowerbound_rates(spec, bits)
    anomalous = rng.random(rates.shape) < LOWERBOUND_P_A
    counts = rng.poisson(rates)
    counts[anomalous] = 0
    obs = SparseObservations.from_dense(counts, np.ones(rates.shape, dtype=bool))
    return rates, obs, AnomalyMask.from_dense(anomalous), ModelParams(p_a=LOWERBOUND_P_A, alpha=())
