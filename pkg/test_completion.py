"""Tests for the rate estimators."""

import math

import numpy as np
import pytest

from completion import estimate_rank, estimate_rates, estimate_rates_soft_impute, recovery_errors
from core.exceptions import DimensionMismatchError, EmptyObservationsError
from core.types import ModelParams, SparseObservations
from estimator import scale_e
from linalg import numerical_rank, rank_r_approximation
from simgen import gen_observation, gen_rate_matrix


def test_full_observation_is_plain_truncated_svd(low_rank_counts):
    obs = SparseObservations.from_dense(np.round(low_rank_counts * 3), np.ones(low_rank_counts.shape, bool))
    raw, clipped = estimate_rates(obs, 2)
    x = obs.zero_filled()
    u, s, vt = np.linalg.svd(x, full_matrices=False)
    assert np.allclose(raw, (u[:, :2] * s[:2]) @ vt[:2], atol=1e-9)
    assert np.all(clipped >= 1e-9)


def test_partial_observation_rescales(rng, low_rank_counts):
    observed = rng.random(low_rank_counts.shape) < 0.5
    counts = np.round(low_rank_counts * 3)
    obs = SparseObservations.from_dense(counts, observed)
    raw, _ = estimate_rates(obs, 2)
    scale = counts.size / observed.sum()
    assert np.allclose(raw, scale * rank_r_approximation(obs.zero_filled(), 2), atol=1e-9)


def test_empty_observations():
    obs = SparseObservations(n=3, m=3, rows=[], cols=[], counts=[])
    with pytest.raises(EmptyObservationsError):
        estimate_rates(obs, 1)


def test_estimate_rank_on_block_matrix():
    counts = np.zeros((40, 30), dtype=np.int64)
    counts[:20, :15] = 5
    counts[20:, 15:] = 3
    obs = SparseObservations.from_dense(counts, np.ones(counts.shape, bool))
    assert estimate_rank(obs) == 2


def test_soft_impute_estimate_has_target_rank(low_rank_counts, rng):
    observed = rng.random(low_rank_counts.shape) < 0.9
    obs = SparseObservations.from_dense(np.round(10 * low_rank_counts), observed)
    raw, clipped = estimate_rates_soft_impute(obs, 2)
    assert numerical_rank(raw) <= 2
    assert clipped.min() >= 1e-9


def test_recovery_errors():
    truth = np.ones((2, 2))
    est = np.array([[2.0, 2.0], [2.0, 4.0]])
    frob, worst = recovery_errors(est, truth, scale=2.0)
    assert frob == pytest.approx(1.0)
    assert worst == pytest.approx(1.0)
    with pytest.raises(DimensionMismatchError):
        recovery_errors(np.ones((2, 3)), truth)


@pytest.mark.slow
def test_entrywise_error_scaling():
    """Median max-norm error over √(log m/m) stays within a factor 2 across sizes."""
    ratios = []
    for size in (100, 200, 400):
        normalized = []
        for seed in range(20):
            rng = np.random.default_rng(seed)
            rates = gen_rate_matrix(size, size, 3, 5.0, rng)
            obs, _ = gen_observation(rates, 1.0, 0.0, (0.2,), "exp-onset", rng)
            raw, _ = estimate_rates(obs, 3)
            _, worst = recovery_errors(raw, rates, scale=scale_e(ModelParams(p_a=0.0), "exp-onset"))
            normalized.append(worst / math.sqrt(math.log(size) / size))
        ratios.append(float(np.median(normalized)))
    assert max(ratios) / min(ratios) < 2.0
