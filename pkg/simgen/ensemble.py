"""Seeded ensembles of synthetic instances and their on-disk layout."""

import json
from pathlib import Path
from typing import Iterable, List, Optional, Tuple, Union

import numpy as np
import structlog
from pydantic import BaseModel, ConfigDict, Field, model_validator

from config.ranges import ENSEMBLE_RANGES, ENSEMBLE_SHAPE
from core.exceptions import ConfigError
from core.instance import Instance
from core.instance_store import read_instance, write_instance
from core.types import GenerationSpec
from utils.parallel import ordered_map, task_seed
from .synthetic import gen_instance

logger = structlog.get_logger()

ENSEMBLE_FORMAT = "ewad-ensemble/1"
ENSEMBLE_MANIFEST = "ensemble.json"

Interval = Tuple[float, float]


class EnsembleRanges(BaseModel):
    """Uniform sampling ranges for every instance parameter."""

    model_config = ConfigDict(frozen=True)

    n: int = Field(default=ENSEMBLE_SHAPE[0], ge=1)
    m: int = Field(default=ENSEMBLE_SHAPE[1], ge=1)
    rank: Interval = ENSEMBLE_RANGES["rank"]
    mean_level: Interval = ENSEMBLE_RANGES["mean_level"]
    p_o: Interval = ENSEMBLE_RANGES["p_o"]
    p_a: Interval = ENSEMBLE_RANGES["p_a"]
    alpha: Interval = ENSEMBLE_RANGES["alpha"]
    anomaly_model: str = "exp-onset"

    @model_validator(mode="after")
    def _check(self) -> "EnsembleRanges":
        for name in ("rank", "mean_level", "p_o", "p_a", "alpha"):
            lo, hi = getattr(self, name)
            if lo > hi:
                raise ValueError(f"{name} range [{lo}, {hi}] is empty")
        if self.rank[0] < 1 or self.rank[1] > min(self.n, self.m):
            raise ValueError(f"rank range must lie in [1, {min(self.n, self.m)}]")
        if self.mean_level[0] <= 0:
            raise ValueError("mean level range must be positive")
        if self.p_o[0] < 0 or self.p_o[1] > 1 or self.p_a[0] < 0 or self.p_a[1] >= 1:
            raise ValueError("probability ranges must lie in [0, 1] with p_a below 1")
        return self


def sample_spec(ranges: EnsembleRanges, seed: int) -> GenerationSpec:
    """Draw one instance's parameters; the same seed also drives its generation."""
    rng = np.random.default_rng(seed)
    rank = int(rng.integers(int(ranges.rank[0]), int(ranges.rank[1]) + 1))
    return GenerationSpec(
        n=ranges.n, m=ranges.m, rank=rank,
        mean_level=float(rng.uniform(*ranges.mean_level)),
        p_o=float(rng.uniform(*ranges.p_o)),
        p_a=float(rng.uniform(*ranges.p_a)),
        alpha=(float(rng.uniform(*ranges.alpha)),),
        anomaly_model=ranges.anomaly_model,
        seed=seed,
    )


def member_name(index: int) -> str:
    return f"instance_{index:04d}"


def gen_ensemble(count: int, ranges: Optional[EnsembleRanges] = None, seed: int = 0,
                 threads: Optional[int] = None) -> List[Instance]:
    """Generate ``count`` instances; member i uses seed master ⊕ i."""
    if count < 1:
        raise ConfigError(f"ensemble size must be at least 1, got {count}")
    ranges = ranges or EnsembleRanges()

    def build(index: int) -> Instance:
        spec = sample_spec(ranges, task_seed(seed, index))
        return gen_instance(spec, name=member_name(index))

    instances = ordered_map(build, range(count), threads)
    logger.info(f"Generated ensemble of {count} instances", seed=seed)
    return instances


def write_ensemble(instances: Iterable[Instance], directory: Union[str, Path],
                   ranges: Optional[EnsembleRanges] = None) -> Path:
    """Write each member to its own instance directory plus an ensemble manifest."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    members = []
    for instance in instances:
        write_instance(instance, directory / instance.name)
        members.append({
            "name": instance.name,
            "path": instance.name,
            "generation": instance.spec.model_dump(mode="json") if instance.spec else None,
        })
    manifest = {"format": ENSEMBLE_FORMAT, "members": members}
    if ranges is not None:
        manifest["ranges"] = ranges.model_dump(mode="json")
    path = directory / ENSEMBLE_MANIFEST
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True))
    logger.info(f"Wrote ensemble of {len(members)} instances", directory=str(directory))
    return path


def read_ensemble(directory: Union[str, Path]) -> List[Instance]:
    directory = Path(directory)
    path = directory / ENSEMBLE_MANIFEST
    if not path.is_file():
        raise ConfigError(f"no {ENSEMBLE_MANIFEST} in {directory}")
    try:
        manifest = json.loads(path.read_text())
    except json.JSONDecodeError as e:
        raise ConfigError(f"malformed ensemble manifest {path}: {e}") from e
    if manifest.get("format") != ENSEMBLE_FORMAT:
        raise ConfigError(f"unsupported ensemble format {manifest.get('format')!r}")
    return [read_instance(directory / member["path"]) for member in manifest["members"]]
