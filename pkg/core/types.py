"""Domain types shared by every stage of the detector."""

import math
from typing import Any, Dict, FrozenSet, Iterable, List, Literal, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from config.settings import settings
from .exceptions import (
    DimensionMismatchError,
    DuplicateEntryError,
    IndexOutOfRangeError,
    InstanceError,
    NegativeCountError,
    ParameterError,
)

# Dense n×m float arrays; RateMatrix additionally nonnegative.
DenseMatrix = np.ndarray
RateMatrix = np.ndarray

MAX_SEED = 2**64 - 1


def _read_only(array: np.ndarray) -> np.ndarray:
    array.flags.writeable = False
    return array


def as_dense_matrix(values: Any) -> DenseMatrix:
    """Validate a finite 2-D real matrix and return it as float64."""
    array = np.array(values, dtype=np.float64)
    if array.ndim != 2 or min(array.shape) < 1:
        raise DimensionMismatchError(f"expected a non-empty 2-D matrix, got shape {array.shape}")
    if not np.all(np.isfinite(array)):
        raise ParameterError("matrix contains non-finite values")
    return array


def as_rate_matrix(values: Any) -> RateMatrix:
    """Validate a nonnegative finite rate matrix."""
    array = as_dense_matrix(values)
    if np.any(array < 0):
        raise ParameterError("rate matrix has negative entries")
    return array


def rate_bound(rates: RateMatrix) -> float:
    """Get the boundedness constant L = max entry + 1."""
    return float(np.max(rates)) + 1.0


def _check_shape(n: Any, m: Any) -> Tuple[int, int]:
    if int(n) != n or int(m) != m or int(n) < 1 or int(m) < 1:
        raise DimensionMismatchError(f"dimensions must be positive integers, got {n}×{m}")
    return int(n), int(m)


def _as_index_array(values: Any, name: str) -> np.ndarray:
    array = np.asarray(values if values is not None else [], dtype=np.float64).reshape(-1)
    if array.size and not np.all(np.isfinite(array) & (array == np.round(array))):
        raise IndexOutOfRangeError(f"{name} indices must be integers")
    return array.astype(np.int64)


def _check_bounds(rows: np.ndarray, cols: np.ndarray, n: int, m: int) -> None:
    bad = (rows < 0) | (rows >= n) | (cols < 0) | (cols >= m)
    if np.any(bad):
        k = int(np.argmax(bad))
        raise IndexOutOfRangeError(
            f"entry ({rows[k]}, {cols[k]}) outside a {n}×{m} matrix"
        )


class ArrayModel(BaseModel):
    """Immutable pydantic model that may hold numpy arrays."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    def __eq__(self, other: object) -> bool:
        if type(self) is not type(other):
            return NotImplemented
        for name in type(self).model_fields:
            mine, theirs = getattr(self, name), getattr(other, name)
            if isinstance(mine, np.ndarray) or isinstance(theirs, np.ndarray):
                mine, theirs = np.asarray(mine), np.asarray(theirs)
                nan_ok = mine.dtype.kind == "f" and theirs.dtype.kind == "f"
                if not np.array_equal(mine, theirs, equal_nan=nan_ok):
                    return False
            elif mine != theirs:
                return False
        return True

    __hash__ = None  # type: ignore[assignment]


class SparseObservations(ArrayModel):
    """Observed counts X restricted to Ω on an n×m grid.

    Entries are stored in canonical row-major order.
    """

    n: int
    m: int
    rows: np.ndarray
    cols: np.ndarray
    counts: np.ndarray

    @model_validator(mode="before")
    @classmethod
    def _canonicalize(cls, data: Any) -> Any:
        if not isinstance(data, dict):
            return data
        n, m = _check_shape(data.get("n"), data.get("m"))
        rows = _as_index_array(data.get("rows"), "row")
        cols = _as_index_array(data.get("cols"), "column")
        raw_counts = np.asarray(data.get("counts") if data.get("counts") is not None else [],
                                dtype=np.float64).reshape(-1)
        if not (rows.size == cols.size == raw_counts.size):
            raise DimensionMismatchError("rows, cols and counts must have equal length")
        _check_bounds(rows, cols, n, m)
        if raw_counts.size and not np.all(np.isfinite(raw_counts)):
            raise NegativeCountError("counts must be finite")
        if np.any(raw_counts < 0):
            k = int(np.argmax(raw_counts < 0))
            raise NegativeCountError(f"negative count {raw_counts[k]} at ({rows[k]}, {cols[k]})")
        if np.any(raw_counts != np.round(raw_counts)):
            raise NegativeCountError("counts must be integers")

        flat = rows * m + cols
        order = np.argsort(flat, kind="stable")
        flat = flat[order]
        if flat.size > 1 and np.any(flat[1:] == flat[:-1]):
            k = int(np.argmax(flat[1:] == flat[:-1]))
            raise DuplicateEntryError(f"duplicate entry ({flat[k] // m}, {flat[k] % m})")

        return {
            "n": n,
            "m": m,
            "rows": _read_only(rows[order]),
            "cols": _read_only(cols[order]),
            "counts": _read_only(raw_counts[order].astype(np.int64)),
        }

    # ── Constructors ─────────────────────────────────────────────────────

    @classmethod
    def from_entries(cls, n: int, m: int, entries: Iterable[Sequence[int]]) -> "SparseObservations":
        """Build from (row, column, count) triples."""
        triples = np.asarray(list(entries), dtype=np.float64).reshape(-1, 3)
        return cls(n=n, m=m, rows=triples[:, 0], cols=triples[:, 1], counts=triples[:, 2])

    @classmethod
    def from_dense(cls, counts: np.ndarray, observed: np.ndarray) -> "SparseObservations":
        """Build from a dense count matrix and a boolean observation mask."""
        counts = np.asarray(counts)
        observed = np.asarray(observed, dtype=bool)
        if counts.shape != observed.shape:
            raise DimensionMismatchError("count matrix and observation mask differ in shape")
        rows, cols = np.nonzero(observed)
        return cls(n=counts.shape[0], m=counts.shape[1], rows=rows, cols=cols, counts=counts[rows, cols])

    # ── Views ────────────────────────────────────────────────────────────

    @property
    def size(self) -> int:
        """Get |Ω|."""
        return int(self.counts.size)

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.n, self.m)

    @property
    def entries(self) -> List[Tuple[int, int, int]]:
        """Get the observations as (row, column, count) triples."""
        return list(zip(self.rows.tolist(), self.cols.tolist(), self.counts.tolist()))

    @property
    def flat_index(self) -> np.ndarray:
        return self.rows * self.m + self.cols

    @property
    def observed_fraction(self) -> float:
        """Get the empirical observation probability |Ω|/(nm)."""
        return self.size / float(self.n * self.m)

    def observed_mask(self) -> np.ndarray:
        """Get the boolean n×m indicator of Ω."""
        mask = np.zeros((self.n, self.m), dtype=bool)
        mask[self.rows, self.cols] = True
        return mask

    def zero_filled(self) -> np.ndarray:
        """Get X' with unobserved entries set to 0."""
        dense = np.zeros((self.n, self.m), dtype=np.float64)
        dense[self.rows, self.cols] = self.counts
        return dense

    def values_at(self, matrix: np.ndarray) -> np.ndarray:
        """Get the entries of an n×m matrix at the observed positions."""
        if matrix.shape != self.shape:
            raise DimensionMismatchError(f"matrix shape {matrix.shape} != {self.shape}")
        return matrix[self.rows, self.cols]

    def to_frame(self) -> pd.DataFrame:
        """Get the observations as a row,col,count table."""
        return pd.DataFrame({"row": self.rows, "col": self.cols, "count": self.counts})


class AnomalyMask(ArrayModel):
    """Set of (row, column) positions where B = 1."""

    n: int
    m: int
    rows: np.ndarray
    cols: np.ndarray

    @model_validator(mode="before")
    @classmethod
    def _canonicalize(cls, data: Any) -> Any:
        if not isinstance(data, dict):
            return data
        n, m = _check_shape(data.get("n"), data.get("m"))
        rows = _as_index_array(data.get("rows"), "row")
        cols = _as_index_array(data.get("cols"), "column")
        if rows.size != cols.size:
            raise DimensionMismatchError("rows and cols must have equal length")
        _check_bounds(rows, cols, n, m)
        flat = np.unique(rows * m + cols)
        return {
            "n": n,
            "m": m,
            "rows": _read_only(flat // m),
            "cols": _read_only(flat % m),
        }

    @classmethod
    def from_pairs(cls, n: int, m: int, pairs: Iterable[Sequence[int]]) -> "AnomalyMask":
        """Build from (row, column) pairs; repeated pairs collapse."""
        array = np.asarray(list(pairs), dtype=np.float64).reshape(-1, 2)
        return cls(n=n, m=m, rows=array[:, 0], cols=array[:, 1])

    @classmethod
    def from_dense(cls, indicator: np.ndarray) -> "AnomalyMask":
        """Build from a boolean n×m matrix."""
        rows, cols = np.nonzero(np.asarray(indicator, dtype=bool))
        return cls(n=indicator.shape[0], m=indicator.shape[1], rows=rows, cols=cols)

    @classmethod
    def empty(cls, n: int, m: int) -> "AnomalyMask":
        return cls(n=n, m=m, rows=[], cols=[])

    @property
    def positions(self) -> FrozenSet[Tuple[int, int]]:
        return frozenset(zip(self.rows.tolist(), self.cols.tolist()))

    def __len__(self) -> int:
        return int(self.rows.size)

    def to_dense(self) -> np.ndarray:
        dense = np.zeros((self.n, self.m), dtype=bool)
        dense[self.rows, self.cols] = True
        return dense

    def indicator(self, obs: SparseObservations) -> np.ndarray:
        """Get B restricted to Ω, aligned with the observation order."""
        if (self.n, self.m) != obs.shape:
            raise DimensionMismatchError(f"mask is {self.n}×{self.m}, observations are {obs.n}×{obs.m}")
        return np.isin(obs.flat_index, self.rows * self.m + self.cols)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"row": self.rows, "col": self.cols})


class ModelParams(BaseModel):
    """Anomaly-model parameters θ = (p_A, α)."""

    model_config = ConfigDict(frozen=True)

    p_a: float = Field(ge=0.0)
    alpha: Tuple[float, ...] = ()

    @field_validator("p_a")
    @classmethod
    def _bounded_away_from_one(cls, value: float) -> float:
        if value > settings.numerics.p_a_max:
            raise ValueError(f"p_a={value} exceeds p_a_max={settings.numerics.p_a_max}")
        return value

    @field_validator("alpha", mode="before")
    @classmethod
    def _flatten_alpha(cls, value: Any) -> Tuple[float, ...]:
        array = np.atleast_1d(np.asarray(value if value is not None else (), dtype=np.float64)).reshape(-1)
        if not np.all(np.isfinite(array)):
            raise ValueError("alpha must be finite")
        return tuple(float(a) for a in array)

    @property
    def dim(self) -> int:
        """Get d, the dimension of α."""
        return len(self.alpha)

    def as_vector(self) -> np.ndarray:
        """Get θ as the flat vector (p_A, α_1, ..., α_d)."""
        return np.array((self.p_a,) + self.alpha, dtype=np.float64)

    @classmethod
    def from_vector(cls, vector: Sequence[float]) -> "ModelParams":
        values = [float(v) for v in vector]
        return cls(p_a=values[0], alpha=tuple(values[1:]))


class TheoreticalConstants(BaseModel):
    """Regularity constants of M* that set the confidence-band width."""

    model_config = ConfigDict(frozen=True)

    kappa: float = Field(default=1.0, ge=1.0)
    mu: float = Field(default=1.0, ge=1.0)
    l_bound: float = Field(default=1.0, gt=0.0)
    k_lip: float = Field(default=1.0, gt=0.0)
    c1: float = Field(default=1.0, gt=0.0)

    def delta(self, rank: int, n: int, m: int, p_o: float) -> float:
        """Get δ = (K+L)³κ⁴μrL²√(log m/(p_O m)) with m the larger dimension."""
        if not 0.0 < p_o <= 1.0:
            raise ParameterError(f"p_o must lie in (0, 1], got {p_o}")
        big = max(n, m)
        return ((self.k_lip + self.l_bound) ** 3 * self.kappa ** 4 * self.mu * rank
                * self.l_bound ** 2 * math.sqrt(math.log(big) / (p_o * big)))

    def half_width(self, rank: int, n: int, m: int, p_o: float) -> float:
        """Get the band half-width C₁δ."""
        return self.c1 * self.delta(rank, n, m, p_o)

    @classmethod
    def from_rate_matrix(cls, rates: RateMatrix, rank: int, k_lip: float = 1.0,
                         c1: float = 1.0) -> "TheoreticalConstants":
        """Compute κ, μ and L from a known rate matrix."""
        rates = as_rate_matrix(rates)
        n, m = rates.shape
        u, s, vt = np.linalg.svd(rates, full_matrices=False)
        if s[rank - 1] <= 0:
            raise ParameterError(f"rate matrix has rank below {rank}")
        kappa = float(s[0] / s[rank - 1])
        spread = (np.max(np.linalg.norm(u[:, :rank], axis=1))
                  + np.max(np.linalg.norm(vt[:rank].T, axis=1)))
        mu = float(spread ** 2 * (n + m) / rank)
        return cls(kappa=kappa, mu=max(mu, 1.0), l_bound=rate_bound(rates), k_lip=k_lip, c1=c1)


class ThetaDomain(BaseModel):
    """Search box Θ = [p_A range] × Γ."""

    model_config = ConfigDict(frozen=True)

    p_a: Tuple[float, float] = (0.0, settings.numerics.p_a_max)
    alpha: Optional[List[Tuple[float, float]]] = None  # None: the model's declared Γ

    @model_validator(mode="after")
    def _non_empty(self) -> "ThetaDomain":
        boxes = [self.p_a] + list(self.alpha or [])
        for lo, hi in boxes:
            if not lo <= hi:
                raise ValueError(f"empty interval [{lo}, {hi}] in theta domain")
        if self.p_a[0] < 0 or self.p_a[1] > settings.numerics.p_a_max:
            raise ValueError(f"p_a range must lie within [0, {settings.numerics.p_a_max}]")
        return self

    def bounds(self, gamma_box: Sequence[Tuple[float, float]]) -> List[Tuple[float, float]]:
        """Get the full box for θ given the model's declared Γ."""
        alpha_box = list(self.alpha) if self.alpha is not None else list(gamma_box)
        if len(alpha_box) != len(gamma_box):
            raise ValueError(f"alpha box has {len(alpha_box)} intervals, model needs {len(gamma_box)}")
        return [tuple(self.p_a)] + [tuple(b) for b in alpha_box]


BandMode = Literal["point", "theoretical", "fixed"]


class DetectorConfig(BaseModel):
    """Inputs of the entrywise detector besides the observations."""

    model_config = ConfigDict(frozen=True)

    rank: int = Field(default=1, ge=1)
    gamma: float = Field(default=0.05, gt=0.0, le=1.0)
    moments: Optional[int] = Field(default=None, ge=1)  # T; None means d + 3
    band_mode: BandMode = "point"
    fixed_delta: Optional[float] = Field(default=None, ge=0.0)
    theta_domain: ThetaDomain = Field(default_factory=ThetaDomain)
    anomaly_model: str = "poisson-thinned"
    seed: int = Field(default=0, ge=0, le=MAX_SEED)
    p_o: Optional[float] = Field(default=None, gt=0.0, le=1.0)  # None: empirical |Ω|/(nm)
    completion_method: Literal["svd", "soft-impute"] = "svd"
    fit_method: Literal["moments", "mle"] = "moments"
    grid_points: int = Field(default=settings.numerics.grid_points, ge=2)

    @model_validator(mode="after")
    def _check_model(self) -> "DetectorConfig":
        from models.registry import get_anomaly_model

        model = get_anomaly_model(self.anomaly_model)
        if self.moments is not None and self.moments < model.dim + 1:
            raise ValueError(f"moments T={self.moments} must be at least d + 1 = {model.dim + 1}")
        if self.band_mode == "fixed" and self.fixed_delta is None:
            raise ValueError("band_mode 'fixed' needs fixed_delta")
        self.theta_domain.bounds(model.gamma_box)
        return self

    def resolved_moments(self, dim: int) -> int:
        """Get T, defaulting to d + 3."""
        return self.moments if self.moments is not None else dim + 3


class GenerationSpec(BaseModel):
    """Parameters of one synthetic instance."""

    model_config = ConfigDict(frozen=True)

    n: int = Field(ge=1)
    m: int = Field(ge=1)
    rank: int = Field(ge=1)
    mean_level: float = Field(gt=0.0)
    p_o: float = Field(ge=0.0, le=1.0)
    p_a: float = Field(ge=0.0, le=settings.numerics.p_a_max)
    alpha: Tuple[float, ...] = (0.2,)
    anomaly_model: str = "exp-onset"
    seed: int = Field(default=0, ge=0, le=MAX_SEED)

    @field_validator("alpha", mode="before")
    @classmethod
    def _flatten_alpha(cls, value: Any) -> Tuple[float, ...]:
        return tuple(float(a) for a in np.atleast_1d(np.asarray(value, dtype=np.float64)).reshape(-1))

    @model_validator(mode="after")
    def _check_rank(self) -> "GenerationSpec":
        if self.rank > min(self.n, self.m):
            raise ValueError(f"rank {self.rank} exceeds min(n, m) = {min(self.n, self.m)}")
        return self

    def params(self, dim: int) -> ModelParams:
        """Get the generating θ*, truncating α to the model's dimension."""
        return ModelParams(p_a=self.p_a, alpha=self.alpha[:dim])


def describe(model: BaseModel) -> Dict[str, Any]:
    """Get a JSON-ready dict of a config model."""
    return model.model_dump(mode="json")
