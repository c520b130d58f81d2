"""Tests for the truncated SVD and singular-value thresholding kernels."""

import numpy as np
import pytest

from config.settings import settings
from core.exceptions import ConvergenceError, ParameterError
from linalg import (
    numerical_rank,
    rank_r_approximation,
    shrink_singular_values,
    singular_values,
    soft_threshold_svd,
    truncated_svd,
)


def test_rank_r_is_projection_optimal(rng):
    a = rng.normal(size=(12, 9))
    for r in range(1, 9):
        approx = rank_r_approximation(a, r)
        s = np.linalg.svd(a, compute_uv=False)
        assert np.linalg.norm(a - approx) == pytest.approx(np.sqrt(np.sum(s[r:] ** 2)), rel=1e-10)
        assert numerical_rank(approx) == r


def test_exact_low_rank_recovered(low_rank_counts):
    assert np.allclose(rank_r_approximation(low_rank_counts, 2), low_rank_counts, atol=1e-10)


def test_full_rank_reproduces_input(rng):
    a = rng.normal(size=(6, 4))
    assert np.allclose(rank_r_approximation(a, 4), a, atol=1e-12)


def test_rank_out_of_range(rng):
    with pytest.raises(ParameterError):
        truncated_svd(rng.normal(size=(3, 4)), 4)
    with pytest.raises(ParameterError):
        truncated_svd(rng.normal(size=(3, 4)), 0)


def test_subspace_path_matches_dense(rng, monkeypatch):
    a = rng.normal(size=(60, 3)) @ rng.normal(size=(3, 40)) + 0.01 * rng.normal(size=(60, 40))
    dense = truncated_svd(a, 3)
    monkeypatch.setattr(settings.numerics, "svd_dense_limit", 10)
    randomized = truncated_svd(a, 3, seed=4)
    assert np.allclose(randomized.sigma, dense.sigma, rtol=1e-6)
    assert np.allclose(randomized.reconstruct(), dense.reconstruct(), atol=1e-5)


def test_subspace_path_is_seeded(rng, monkeypatch):
    a = rng.normal(size=(30, 20))
    monkeypatch.setattr(settings.numerics, "svd_dense_limit", 5)
    monkeypatch.setattr(settings.numerics, "svd_max_iter", 1000)
    first = truncated_svd(a, 2, seed=9)
    second = truncated_svd(a, 2, seed=9)
    assert np.array_equal(first.sigma, second.sigma)


def test_subspace_cap_raises(rng, monkeypatch):
    a = rng.normal(size=(30, 20))
    monkeypatch.setattr(settings.numerics, "svd_dense_limit", 5)
    monkeypatch.setattr(settings.numerics, "svd_max_iter", 1)
    with pytest.raises(ConvergenceError):
        truncated_svd(a, 2, tol=1e-15)


def test_soft_threshold_shrinks_spectrum(rng):
    a = rng.normal(size=(8, 6))
    s = singular_values(a)
    tau = float(s[2])
    shrunk, nuclear = shrink_singular_values(a, tau)
    expected = np.maximum(s - tau, 0.0)
    assert np.allclose(singular_values(shrunk)[:2], expected[:2], atol=1e-10)
    assert numerical_rank(shrunk) == 2
    assert nuclear == pytest.approx(expected.sum())


def test_soft_threshold_extremes(rng):
    a = rng.normal(size=(5, 5))
    assert np.allclose(soft_threshold_svd(a, 0.0), a, atol=1e-12)
    assert not soft_threshold_svd(a, 1e6).any()
    with pytest.raises(ParameterError):
        soft_threshold_svd(a, -1.0)


def test_numerical_rank_of_zero():
    assert numerical_rank(np.zeros((3, 3))) == 0
