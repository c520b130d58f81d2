"""Tests for confidence bands, budgeted selection and the detector pipeline."""

import math

import numpy as np
import pandas as pd
import pytest
from scipy import optimize

from config.ranges import EXPERIMENT_DETECTOR, default_gamma_grid
from core.exceptions import ConfigError, DimensionMismatchError, ParameterError
from core.types import DetectorConfig, ModelParams, SparseObservations, TheoreticalConstants
from detector import (
    DETECTION_COLUMNS,
    ConfidenceBand,
    EntrywiseDetector,
    band_half_width,
    build_solution,
    confidence_band,
    greedy_fill,
    run_ew,
    sample_mask,
    solve_oracle,
    solve_pew,
    write_detection,
)
from estimator import MomentFit, scale_e
from evaluation import sweep_roc, tpr_fpr, true_posterior
from simgen import gen_instance, representative_spec


def _band(f_l, f_r, f_point=None):
    f_l = np.asarray(f_l, dtype=float)
    f_r = np.asarray(f_r, dtype=float)
    f_point = f_l if f_point is None else np.asarray(f_point, dtype=float)
    return ConfidenceBand(f_l=f_l, f_point=f_point, f_r=f_r, x_hat=1.0 - f_point, y_hat=f_point)


def _fit(p_a, alpha=()):
    return MomentFit(theta_hat=ModelParams(p_a=p_a, alpha=alpha), objective_value=0.0)


# ── Bands ────────────────────────────────────────────────────────────────


class TestBands:
    def test_censoring_point_value(self):
        obs = SparseObservations.from_entries(1, 1, [(0, 0, 0)])
        fit = _fit(0.5)
        m_hat = np.array([[scale_e(fit.theta_hat, "zero")]])
        band = confidence_band(obs, m_hat, fit, model="zero")
        assert band.f_point[0] == pytest.approx(math.exp(-1) / (1 + math.exp(-1)), abs=1e-12)
        assert band.f_point[0] == pytest.approx(0.268941, abs=1e-6)
        assert band.f_l[0] == pytest.approx(band.f_point[0])
        assert band.f_r[0] == pytest.approx(band.f_point[0])

    def test_ordering(self, small_instance):
        obs = small_instance.observations
        m_hat = np.clip(small_instance.truth.rates, 1e-9, None)
        band = confidence_band(obs, m_hat, _fit(0.1, (0.3,)), mode="fixed", delta=0.01)
        assert band.size == obs.size
        assert np.all(band.f_l <= band.f_point)
        assert np.all(band.f_point <= band.f_r)
        assert np.all((band.f_l >= 0) & (band.f_r <= 1))
        assert band.half_width == pytest.approx(0.01)

    def test_unit_delta_is_vacuous(self, small_instance):
        obs = small_instance.observations
        band = confidence_band(obs, small_instance.truth.rates + 1e-9, _fit(0.1, (0.3,)),
                               mode="fixed", delta=1.0)
        assert np.all(band.f_l == 0.0)
        assert np.all(band.f_r == 1.0)

    def test_zero_mass_entries(self):
        obs = SparseObservations.from_entries(1, 2, [(0, 0, 200), (0, 1, 1)])
        band = confidence_band(obs, np.array([[1e-9, 1.0]]), _fit(0.5), model="zero")
        assert (band.f_l[0], band.f_point[0], band.f_r[0]) == (0.0, 0.0, 1.0)
        assert 0.0 < band.f_point[1] <= 1.0

    def test_negative_rates_rejected(self, small_obs):
        with pytest.raises(ParameterError):
            confidence_band(small_obs, -np.ones((3, 4)), _fit(0.1, (0.3,)))

    def test_half_width_modes(self, small_obs):
        consts = TheoreticalConstants(c1=2.0)
        assert band_half_width(small_obs, "point") == 0.0
        assert band_half_width(small_obs, "fixed", consts, delta=0.1) == pytest.approx(0.2)
        expected = consts.half_width(1, 3, 4, small_obs.observed_fraction)
        assert band_half_width(small_obs, "theoretical", consts) == pytest.approx(expected)
        with pytest.raises(ConfigError):
            band_half_width(small_obs, "theoretical")
        with pytest.raises(ConfigError):
            band_half_width(small_obs, "fixed")

    def test_theoretical_width_grows_with_rank(self, small_obs):
        consts = TheoreticalConstants()
        assert band_half_width(small_obs, "theoretical", consts, rank=2) > band_half_width(
            small_obs, "theoretical", consts, rank=1)


# ── Selection ────────────────────────────────────────────────────────────


class TestGreedy:
    def test_worked_example(self):
        band = _band([0.05, 0.10, 0.80], [0.1, 0.2, 0.9])
        t = solve_pew(band, 0.5)
        assert np.allclose(t, [1.0, 1.0, 0.175 / 0.9], atol=1e-12)
        assert t[2] == pytest.approx(0.194444, abs=1e-6)

    def test_zero_costs_always_taken(self):
        assert np.array_equal(greedy_fill(np.zeros(4), 0.0), np.ones(4))

    def test_slack_budget_takes_everything(self):
        assert np.array_equal(greedy_fill([0.3, 0.1, 0.2], 10.0), np.ones(3))

    def test_empty(self):
        assert greedy_fill(np.array([]), 1.0).size == 0

    def test_ties_fill_in_input_order(self):
        t = greedy_fill([0.5, 0.5, 0.5], 0.75)
        assert np.allclose(t, [1.0, 0.5, 0.0])

    def test_matches_linear_program(self):
        rng = np.random.default_rng(2024)
        tight = {"primal_feasibility_tolerance": 1e-10, "dual_feasibility_tolerance": 1e-10}
        for _ in range(200):
            size = int(rng.integers(1, 61))
            f_l = rng.uniform(0.0, 0.9, size)
            f_r = np.minimum(f_l + rng.uniform(0.01, 0.3, size), 1.0)
            gamma = float(rng.uniform(0.01, 1.0))
            programs = [(solve_pew(_band(f_l, f_r), gamma), f_r, gamma * f_l.sum()),
                        (solve_oracle(f_l, gamma), f_l, gamma * f_l.sum())]
            for t, costs, budget in programs:
                lp = optimize.linprog(-np.ones(size), A_ub=costs[None, :], b_ub=[budget],
                                      bounds=[(0.0, 1.0)] * size, method="highs", options=tight)
                assert lp.status == 0
                assert t.sum() == pytest.approx(-lp.fun, abs=1e-9)
                assert np.all((t >= 0.0) & (t <= 1.0))
                assert float(np.dot(t, costs)) <= budget + 1e-9

    @pytest.mark.parametrize("gamma", [0.0, -0.1, 1.5])
    def test_gamma_range(self, gamma):
        with pytest.raises(ParameterError):
            solve_pew(_band([0.5], [0.6]), gamma)
        with pytest.raises(ParameterError):
            solve_oracle(np.array([0.5]), gamma)


class TestOracle:
    def test_constant_posterior(self):
        t = solve_oracle(np.full(20, 0.3), 0.25)
        assert t.sum() == pytest.approx(0.25 * 20)

    def test_single_entry(self):
        assert solve_oracle(np.array([0.5]), 0.5)[0] == pytest.approx(0.5)

    def test_fpr_within_budget_on_true_band(self, small_instance):
        f_star = true_posterior(small_instance)
        band = _band(f_star, f_star)
        for gamma in (0.01, 0.05, 0.2, 0.5, 1.0):
            _, fpr = tpr_fpr(solve_pew(band, gamma), f_star)
            assert fpr <= gamma + 1e-9


class TestSampling:
    @pytest.fixture
    def square_obs(self):
        counts = np.ones((100, 100), dtype=np.int64)
        return SparseObservations.from_dense(counts, np.ones(counts.shape, bool))

    def test_certain_probabilities(self, square_obs):
        assert len(sample_mask(square_obs, np.ones(square_obs.size), 0)) == square_obs.size
        assert len(sample_mask(square_obs, np.zeros(square_obs.size), 0)) == 0

    def test_half_probabilities(self, square_obs):
        mask = sample_mask(square_obs, np.full(square_obs.size, 0.5), 11)
        assert 4800 <= len(mask) <= 5200

    def test_seeded(self, square_obs):
        t = np.full(square_obs.size, 0.3)
        assert sample_mask(square_obs, t, 5) == sample_mask(square_obs, t, 5)

    def test_rejects_bad_input(self, small_obs):
        with pytest.raises(DimensionMismatchError):
            sample_mask(small_obs, np.ones(3), 0)
        with pytest.raises(ParameterError):
            sample_mask(small_obs, np.full(small_obs.size, 1.5), 0)

    def test_solution_slack(self):
        obs = SparseObservations.from_entries(1, 3, [(0, 0, 1), (0, 1, 2), (0, 2, 3)])
        band = _band([0.05, 0.10, 0.80], [0.1, 0.2, 0.9])
        solution = build_solution(obs, band, 0.5, seed=1)
        assert solution.feasibility_slack == pytest.approx(0.0, abs=1e-12)
        assert solution.expected_selected == pytest.approx(2.0 + 0.175 / 0.9)
        assert solution.gamma_used == 0.5


# ── Pipeline ─────────────────────────────────────────────────────────────


@pytest.fixture
def detector_config():
    return DetectorConfig(rank=2, gamma=0.1, anomaly_model="poisson-thinned", seed=4, grid_points=11)


class TestPipeline:
    def test_run_ew(self, small_instance, detector_config):
        obs = small_instance.observations
        m_hat, fit, band, solution = run_ew(obs, detector_config, threads=1)
        assert m_hat.shape == obs.shape
        assert m_hat.min() >= 1e-9
        assert 0.0 <= fit.theta_hat.p_a <= 0.95
        assert band.size == obs.size
        assert solution.t.shape == (obs.size,)
        assert solution.feasibility_slack >= -1e-9
        assert solution.mask.positions <= {(r, c) for r, c, _ in obs.entries}

    def test_selection_grows_with_gamma(self, small_instance, detector_config):
        detector = EntrywiseDetector(detector_config, threads=1).prepare(small_instance.observations)
        totals = [detector.select(gamma).expected_selected for gamma in (0.01, 0.05, 0.1, 0.3, 1.0)]
        assert all(a <= b + 1e-12 for a, b in zip(totals, totals[1:]))

    def test_select_needs_prepare(self, detector_config):
        with pytest.raises(ConfigError):
            EntrywiseDetector(detector_config).select()

    def test_theoretical_needs_constants(self):
        with pytest.raises(ConfigError):
            EntrywiseDetector(DetectorConfig(band_mode="theoretical"))

    def test_theoretical_band_runs(self, small_instance):
        config = DetectorConfig(rank=2, band_mode="theoretical", grid_points=6)
        consts = TheoreticalConstants.from_rate_matrix(small_instance.truth.rates, 2, c1=1e-3)
        detector = EntrywiseDetector(config, consts, threads=1).prepare(small_instance.observations)
        assert detector.band.half_width > 0
        assert np.all(detector.band.f_l <= detector.band.f_r)

    def test_soft_impute_and_mle_variants(self, small_instance):
        config = DetectorConfig(rank=2, completion_method="soft-impute", fit_method="mle", grid_points=6)
        detector = EntrywiseDetector(config, threads=1).prepare(small_instance.observations)
        assert detector.fit.method == "mle"
        assert detector.m_hat.min() >= 1e-9

    def test_write_detection(self, small_instance, detector_config, tmp_path):
        obs = small_instance.observations
        _, _, band, solution = run_ew(obs, detector_config, threads=1)
        path = write_detection(tmp_path / "out" / "detection.csv", obs, band, solution)
        frame = pd.read_csv(path)
        assert list(frame.columns) == DETECTION_COLUMNS
        assert len(frame) == obs.size
        assert frame["selected"].sum() == len(solution.mask)
        assert np.allclose(frame["t"].to_numpy(), solution.t, rtol=1e-15, atol=0)


@pytest.mark.slow
def test_representative_auc_is_near_oracle():
    grid = default_gamma_grid()
    config = DetectorConfig(rank=3, anomaly_model="exp-onset", **EXPERIMENT_DETECTOR)
    gaps = []
    for seed in range(20):
        instance = gen_instance(representative_spec(seed=seed))
        f_star = true_posterior(instance)
        detector = EntrywiseDetector(config).prepare(instance.observations)
        ew = sweep_roc(lambda g: solve_pew(detector.band, g), f_star, grid)
        oracle = sweep_roc(lambda g: solve_oracle(f_star, g), f_star, grid)
        gaps.append(oracle.auc - ew.auc)
    assert np.mean(gaps) <= 0.05


@pytest.mark.slow
def test_fpr_stays_below_target():
    grid = default_gamma_grid()
    plug_in = DetectorConfig(rank=3, anomaly_model="exp-onset", fit_method="mle",
                             band_mode="fixed", fixed_delta=0.01)
    exact, covered = [], []
    for seed in range(50):
        instance = gen_instance(representative_spec(seed=seed))
        truth = instance.require_truth()
        obs = instance.observations
        f_star = true_posterior(instance)
        control = confidence_band(obs, truth.rates * scale_e(truth.params, "exp-onset"),
                                  MomentFit(theta_hat=truth.params, objective_value=0.0), model="exp-onset")
        detector = EntrywiseDetector(plug_in).prepare(obs)
        for gamma in grid:
            exact.append(tpr_fpr(solve_pew(control, gamma), f_star)[1] <= gamma + 1e-9)
            covered.append(tpr_fpr(solve_pew(detector.band, gamma), f_star)[1] <= gamma + 1e-9)
    assert all(exact)
    assert np.mean(covered) >= 0.95
