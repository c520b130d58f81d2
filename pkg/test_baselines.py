"""Tests for the robust-decomposition baselines and their scoring."""

import numpy as np
import pytest

from baselines import (
    anomaly_scores,
    check_method,
    default_budget,
    default_cap,
    default_ratio,
    drmf,
    multi_solve_selections,
    parameter_grid,
    soft_impute,
    solve_baseline,
    stable_pcp,
    tune_rank_lambda,
    tune_rank_solution,
)
from core.exceptions import ConfigError, ParameterError
from core.types import SparseObservations
from linalg import numerical_rank, rank_r_approximation, singular_values


def _full(counts):
    counts = np.asarray(counts)
    return SparseObservations.from_dense(counts, np.ones(counts.shape, bool))


@pytest.fixture
def block_obs():
    """Rank-2 block pattern, σ = 5√300 and 3√300."""
    counts = np.zeros((40, 30), dtype=np.int64)
    counts[:20, :15] = 5
    counts[20:, 15:] = 3
    return _full(counts)


def _non_increasing(trace, rel=1e-9):
    trace = np.asarray(trace)
    return bool(np.all(np.diff(trace) <= rel * max(trace[0], 1.0)))


# ── soft-impute ──────────────────────────────────────────────────────────


class TestSoftImpute:
    def test_zero_lambda_reproduces_full_observation(self, rng):
        counts = rng.poisson(3.0, size=(12, 9))
        result = soft_impute(_full(counts), 0.0)
        assert result.converged
        assert np.allclose(result.m_hat, counts, atol=1e-8)
        assert not result.a_hat.any()

    def test_huge_lambda_gives_zero(self, rng):
        obs = _full(rng.poisson(3.0, size=(12, 9)))
        big = 4.0 * singular_values(obs.zero_filled())[0]
        result = soft_impute(obs, big)
        assert result.converged
        assert not result.m_hat.any()

    def test_completes_noiseless_low_rank(self, low_rank_counts, rng):
        observed = rng.random(low_rank_counts.shape) < 0.8
        obs = SparseObservations.from_dense(np.round(10 * low_rank_counts), observed)
        truth = np.round(10 * low_rank_counts)
        lam = 0.01 * singular_values(obs.zero_filled())[0]
        result = soft_impute(obs, lam)
        assert np.linalg.norm(result.m_hat - truth) / np.linalg.norm(truth) < 0.1

    def test_objective_is_non_increasing(self, rng):
        observed = rng.random((20, 15)) < 0.7
        obs = SparseObservations.from_dense(rng.poisson(4.0, size=(20, 15)), observed)
        result = soft_impute(obs, 5.0)
        assert len(result.objective_trace) == result.iterations + 1
        assert _non_increasing(result.objective_trace)

    def test_negative_lambda(self, small_obs):
        with pytest.raises(ParameterError):
            soft_impute(small_obs, -1.0)


# ── stable-pcp / rmc ─────────────────────────────────────────────────────


class TestStablePcp:
    def test_objective_is_non_increasing(self, rng):
        observed = rng.random((20, 15)) < 0.8
        obs = SparseObservations.from_dense(rng.poisson(4.0, size=(20, 15)), observed)
        result = stable_pcp(obs, lam=0.5, mu=0.2)
        assert _non_increasing(result.objective_trace)

    def test_isolates_a_spike(self):
        counts = np.ones((10, 10), dtype=np.int64)
        counts[3, 4] = 50
        result = stable_pcp(_full(counts), lam=0.5, mu=1.0)
        assert result.a_hat[3, 4] > 0
        assert np.unravel_index(np.argmax(np.abs(result.a_hat)), result.a_hat.shape) == (3, 4)

    def test_cap_bounds_both_blocks(self, rng):
        obs = _full(rng.poisson(5.0, size=(15, 12)))
        result = stable_pcp(obs, lam=0.2, mu=0.5, max_cap=1.5)
        assert np.max(np.abs(result.m_hat)) <= 1.5 + 1e-12
        assert np.max(np.abs(result.a_hat)) <= 1.5 + 1e-12

    def test_cap_separates_rmc_from_stable_pcp(self):
        counts = np.ones((10, 10), dtype=np.int64)
        counts[3, 4] = 50
        obs = _full(counts)
        plain = stable_pcp(obs, lam=0.5, mu=1.0)
        capped = stable_pcp(obs, lam=0.5, mu=1.0, max_cap=5.0)
        assert plain.a_hat[3, 4] > 5.0
        assert np.max(np.abs(capped.a_hat)) <= 5.0 + 1e-12
        assert not np.allclose(plain.a_hat, capped.a_hat)

    def test_huge_lambda_leaves_no_sparse_part(self, rng):
        obs = _full(rng.poisson(5.0, size=(15, 12)))
        result = stable_pcp(obs, lam=1e6, mu=1.0)
        assert not result.a_hat.any()

    def test_sparse_part_lives_on_observed_entries(self, rng):
        observed = rng.random((15, 12)) < 0.6
        obs = SparseObservations.from_dense(rng.poisson(5.0, size=(15, 12)), observed)
        result = stable_pcp(obs, lam=0.1, mu=1.0)
        assert not result.a_hat[~observed].any()

    @pytest.mark.parametrize("lam,mu,cap", [(0.0, 1.0, None), (1.0, 0.0, None), (1.0, 1.0, -2.0)])
    def test_rejects_bad_parameters(self, small_obs, lam, mu, cap):
        with pytest.raises(ParameterError):
            stable_pcp(small_obs, lam=lam, mu=mu, max_cap=cap)


# ── drmf ─────────────────────────────────────────────────────────────────


class TestDrmf:
    def test_zero_budget_is_truncated_svd(self, rng):
        counts = rng.poisson(4.0, size=(18, 14))
        result = drmf(_full(counts), 2, 0)
        assert not result.a_hat.any()
        assert np.allclose(result.m_hat, rank_r_approximation(counts.astype(float), 2), atol=1e-9)

    def test_full_budget_fits_exactly(self, rng):
        obs = _full(rng.poisson(4.0, size=(10, 8)))
        result = drmf(obs, 1, obs.size)
        assert result.objective == pytest.approx(0.0, abs=1e-9)

    def test_budget_bounds_support(self, rng):
        observed = rng.random((20, 15)) < 0.7
        obs = SparseObservations.from_dense(rng.poisson(4.0, size=(20, 15)), observed)
        result = drmf(obs, 2, 7)
        assert np.count_nonzero(result.a_hat) <= 7
        assert not result.a_hat[~observed].any()

    def test_single_spike_is_selected(self, block_obs):
        counts = block_obs.zero_filled().astype(np.int64)
        counts[5, 20] = 40
        result = drmf(_full(counts), 2, 1)
        assert list(zip(*np.nonzero(result.a_hat))) == [(5, 20)]

    @pytest.mark.parametrize("p_o", [1.0, 0.7])
    def test_objective_is_non_increasing(self, rng, p_o):
        observed = rng.random((20, 15)) < p_o
        obs = SparseObservations.from_dense(rng.poisson(4.0, size=(20, 15)), observed)
        result = drmf(obs, 2, 10)
        assert _non_increasing(result.objective_trace)

    def test_zero_fill_matches_impute_under_full_observation(self, rng):
        obs = _full(rng.poisson(4.0, size=(12, 10)))
        imputed = drmf(obs, 2, 5, fill="impute")
        zeroed = drmf(obs, 2, 5, fill="zero")
        assert np.allclose(imputed.m_hat, zeroed.m_hat)
        assert np.array_equal(imputed.a_hat, zeroed.a_hat)

    @pytest.mark.parametrize("kwargs", [{"r": 1, "e": -1}, {"r": 0, "e": 1}, {"r": 1, "e": 1, "fill": "mean"}])
    def test_rejects_bad_parameters(self, small_obs, kwargs):
        with pytest.raises(ParameterError):
            drmf(small_obs, **kwargs)


# ── Rank tuning ──────────────────────────────────────────────────────────


class TestTuning:
    def test_full_rank_target_accepts_first_weight(self, block_obs):
        sigma_1 = singular_values(block_obs.zero_filled())[0]
        weight = tune_rank_lambda(block_obs, min(block_obs.shape))
        assert weight == pytest.approx(0.01 * sigma_1)

    def test_rank_one_target(self, block_obs):
        weight, solution = tune_rank_solution(block_obs, 1)
        assert numerical_rank(solution.m_hat) == 1
        sigma = singular_values(block_obs.zero_filled())
        assert sigma[1] < weight / 2.0 < sigma[0]

    def test_stable_pcp_tuning_reaches_target(self, block_obs):
        _, solution = tune_rank_solution(block_obs, 1, solver="stable-pcp", ratio=default_ratio(block_obs))
        assert numerical_rank(solution.m_hat) <= 1

    def test_drmf_has_no_weight(self, block_obs):
        with pytest.raises(ConfigError):
            tune_rank_lambda(block_obs, 1, solver="drmf")

    def test_ratio_required_for_pcp(self, block_obs):
        with pytest.raises(ParameterError):
            tune_rank_lambda(block_obs, 1, solver="stable-pcp")

    def test_target_out_of_range(self, block_obs):
        with pytest.raises(ParameterError):
            tune_rank_lambda(block_obs, 31)


# ── Scores and grids ─────────────────────────────────────────────────────


class TestScores:
    def test_method_check(self):
        assert check_method("rmc") == "rmc"
        with pytest.raises(ConfigError):
            check_method("pca")

    def test_defaults(self, small_obs):
        assert default_ratio(small_obs) == pytest.approx(3.0)
        assert default_cap(small_obs) == pytest.approx(14.0)
        assert default_budget(small_obs) == 0
        assert default_budget(small_obs, 0.4) == 2

    def test_ratio_grid(self, small_obs):
        grid = parameter_grid(small_obs, "stable-pcp")
        assert grid.size == 12
        assert grid[0] == pytest.approx(0.3)
        assert grid[-1] == pytest.approx(30.0)

    def test_budget_grid(self, small_instance):
        obs = small_instance.observations
        grid = parameter_grid(obs, "drmf")
        assert grid[0] == 0
        assert grid[-1] == round(0.5 * obs.size)
        assert np.all(np.diff(grid) > 0)

    def test_soft_impute_has_no_grid(self, small_obs):
        with pytest.raises(ParameterError):
            parameter_grid(small_obs, "soft-impute")

    def test_scores_are_sparse_magnitudes(self, small_instance):
        obs = small_instance.observations
        result = solve_baseline(obs, "drmf", 2, e=10)
        scores = anomaly_scores(obs, result)
        assert scores.shape == (obs.size,)
        assert np.allclose(scores, np.abs(result.a_hat[obs.rows, obs.cols]))
        assert 0 < np.count_nonzero(scores) <= 10

    def test_residual_scores(self, small_instance):
        obs = small_instance.observations
        result = solve_baseline(obs, "soft-impute", 2)
        assert not anomaly_scores(obs, result).any()
        scores = anomaly_scores(obs, result, residual=True)
        assert np.allclose(scores, np.abs(obs.counts - result.m_hat[obs.rows, obs.cols]))

    def test_rmc_default_cap_applies(self, small_instance):
        obs = small_instance.observations
        result = solve_baseline(obs, "rmc", 2)
        assert np.max(np.abs(result.m_hat)) <= default_cap(obs) + 1e-9

    def test_multi_solve_drmf(self, small_instance):
        obs = small_instance.observations
        selections = multi_solve_selections(obs, "drmf", 2, threads=1)
        grid = parameter_grid(obs, "drmf")
        assert [param for param, _ in selections] == [float(e) for e in grid]
        assert not selections[0][1].any()
        for param, selected in selections:
            assert selected.shape == (obs.size,)
            assert selected.sum() <= param

    def test_multi_solve_is_thread_independent(self, small_instance):
        obs = small_instance.observations
        grid = [0.5, 2.0, 8.0]
        one = multi_solve_selections(obs, "stable-pcp", 2, grid=grid, threads=1)
        two = multi_solve_selections(obs, "stable-pcp", 2, grid=grid, threads=2)
        assert [p for p, _ in one] == [p for p, _ in two]
        for (_, a), (_, b) in zip(one, two):
            assert np.array_equal(a, b)
