"""Anomaly models selectable by identifier."""

from typing import Callable, Dict, List

from core.exceptions import ConfigError
from .anomaly import ExponentialOnset, PointMassZero, PoissonThinned
from .base import AnomalyModel

_MODEL_FACTORIES: Dict[str, Callable[[], AnomalyModel]] = {
    "poisson-thinned": PoissonThinned,
    "exp-onset": ExponentialOnset,
    "zero": PointMassZero,
}

_instances: Dict[str, AnomalyModel] = {}


def get_anomaly_model(name: str) -> AnomalyModel:
    """Get the shared instance of the model registered under *name*."""
    if isinstance(name, AnomalyModel):
        return name
    if name not in _MODEL_FACTORIES:
        raise ConfigError(f"unknown anomaly model {name!r}; choose from {', '.join(_MODEL_FACTORIES)}")
    if name not in _instances:
        _instances[name] = _MODEL_FACTORIES[name]()
    return _instances[name]


def available_models() -> List[str]:
    return list(_MODEL_FACTORIES)
