"""Shared pytest fixtures and the ``slow`` marker for Monte-Carlo checks."""

import numpy as np
import pytest

from core.types import GenerationSpec, SparseObservations
from simgen import gen_instance, representative_spec as build_representative_spec


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run Monte-Carlo tests")


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: Monte-Carlo acceptance checks (run with --runslow)")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def small_obs():
    """3×4 matrix with five observed entries, given out of order."""
    return SparseObservations.from_entries(3, 4, [(2, 1, 4), (0, 0, 1), (1, 3, 0), (0, 2, 3), (2, 3, 7)])


@pytest.fixture
def representative_spec():
    return build_representative_spec(seed=7)


@pytest.fixture
def small_instance():
    spec = GenerationSpec(n=30, m=24, rank=2, mean_level=4.0, p_o=0.9, p_a=0.1,
                          alpha=(0.3,), anomaly_model="poisson-thinned", seed=3)
    return gen_instance(spec, name="small")


@pytest.fixture
def low_rank_counts(rng):
    """Noiseless rank-2 nonnegative matrix, 40×30."""
    u = rng.uniform(0.5, 2.0, size=(40, 2))
    v = rng.uniform(0.5, 2.0, size=(30, 2))
    return u @ v.T
