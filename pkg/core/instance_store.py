"""Reading and writing instance directories.

Layout of an instance directory::

    manifest.json      n, m, file names, parameters (indices are 0-based)
    observations.csv   row,col,count
    rates.csv          dense M*, no header (optional)
    mask.csv           row,col (optional)
"""

import json
from pathlib import Path
from typing import Any, Dict, Union

import pandas as pd
import structlog

from .exceptions import ConfigError
from .instance import GroundTruth, Instance, validate_instance
from .types import AnomalyMask, GenerationSpec, ModelParams, SparseObservations

logger = structlog.get_logger()

FORMAT_TAG = "ewad-instance/1"
MANIFEST = "manifest.json"
FLOAT_FORMAT = "%.17g"


def write_instance(instance: Instance, directory: Union[str, Path]) -> Path:
    """Write an instance directory and return the manifest path."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)

    manifest: Dict[str, Any] = {
        "format": FORMAT_TAG,
        "index_base": 0,
        "name": instance.name,
        "n": instance.observations.n,
        "m": instance.observations.m,
        "observations": "observations.csv",
    }
    instance.observations.to_frame().to_csv(directory / "observations.csv", index=False)

    if instance.truth is not None:
        truth = instance.truth
        pd.DataFrame(truth.rates).to_csv(
            directory / "rates.csv", header=False, index=False, float_format=FLOAT_FORMAT
        )
        truth.mask.to_frame().to_csv(directory / "mask.csv", index=False)
        manifest.update({
            "rates": "rates.csv",
            "mask": "mask.csv",
            "params": truth.params.model_dump(mode="json"),
            "anomaly_model": truth.anomaly_model,
        })
    if instance.spec is not None:
        manifest["generation"] = instance.spec.model_dump(mode="json")

    path = directory / MANIFEST
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True))
    logger.debug(f"Wrote instance {instance.name} to {directory}")
    return path


def read_instance(directory: Union[str, Path]) -> Instance:
    """Read and validate an instance directory."""
    directory = Path(directory)
    path = directory / MANIFEST
    if not path.is_file():
        raise ConfigError(f"no {MANIFEST} in {directory}")
    try:
        manifest = json.loads(path.read_text())
    except json.JSONDecodeError as e:
        raise ConfigError(f"malformed manifest {path}: {e}") from e
    if manifest.get("format") != FORMAT_TAG:
        raise ConfigError(f"unsupported instance format {manifest.get('format')!r}")

    n, m = int(manifest["n"]), int(manifest["m"])
    frame = _read_table(directory / manifest["observations"], ["row", "col", "count"])
    obs = SparseObservations(n=n, m=m, rows=frame["row"].to_numpy(),
                             cols=frame["col"].to_numpy(), counts=frame["count"].to_numpy())

    truth = None
    if "rates" in manifest:
        rates_path = directory / manifest["rates"]
        if not rates_path.is_file():
            raise ConfigError(f"missing rate matrix {rates_path}")
        rates = pd.read_csv(rates_path, header=None, float_precision="round_trip").to_numpy(dtype=float)
        mask_frame = _read_table(directory / manifest["mask"], ["row", "col"])
        mask = AnomalyMask(n=n, m=m, rows=mask_frame["row"].to_numpy(), cols=mask_frame["col"].to_numpy())
        truth = GroundTruth(
            rates=rates,
            mask=mask,
            params=ModelParams(**manifest["params"]),
            anomaly_model=manifest.get("anomaly_model", "exp-onset"),
        )

    spec = GenerationSpec(**manifest["generation"]) if "generation" in manifest else None
    return validate_instance(obs, truth, spec=spec, name=manifest.get("name", directory.name))


def _read_table(path: Path, columns: list) -> pd.DataFrame:
    if not path.is_file():
        raise ConfigError(f"missing table {path}")
    frame = pd.read_csv(path)
    if list(frame.columns) != columns:
        raise ConfigError(f"{path.name}: expected header {','.join(columns)}, got {','.join(frame.columns)}")
    return frame
